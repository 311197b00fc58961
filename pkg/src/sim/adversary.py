"""故障注入

エンジンは各ロールの処理の前後でアダプタのフックを呼ぶ。既定の Honest は何もしない。

- equivocating-server: メンバーの後半に、クライアントを1人除いた別の C を見せる
- inconsistent-share-client: 最小番号のクライアントが証明の後でメンバー1へのシェアを改ざんする
- replaying-server: 前の反復の暗号文をメンバーへ転送する
"""

import logging
from collections.abc import Mapping, Sequence

from src.errors import ParameterError
from src.protocol.messages import ClientMessage

logger = logging.getLogger(__name__)


class Adversary:
    """正直な振る舞い（全てのフックが恒等）"""

    name = "honest"
    needs_active = False

    def __init__(self):
        self.injected = False

    def begin(self, label: int) -> None:
        self.injected = False

    def corrupt_share(self, client: int, clients: Sequence[int]) -> int | None:
        return None

    def member_view(self, group: int, member: int, online: Sequence[int], m: int) -> tuple[int, ...]:
        return tuple(online)

    def forwarded(self, group: int, member: int, forwarded: dict[int, bytes]) -> dict[int, bytes]:
        return forwarded

    def observe(self, messages: Mapping[int, ClientMessage]) -> None:
        pass


class EquivocatingServer(Adversary):
    name = "equivocating-server"
    needs_active = True

    def member_view(self, group: int, member: int, online: Sequence[int], m: int) -> tuple[int, ...]:
        if member > m // 2 and len(online) > 1:
            self.injected = True
            return tuple(online[1:])
        return tuple(online)


class InconsistentShareClient(Adversary):
    name = "inconsistent-share-client"
    needs_active = True

    def corrupt_share(self, client: int, clients: Sequence[int]) -> int | None:
        if clients and client == min(clients):
            self.injected = True
            return 1
        return None


class ReplayingServer(Adversary):
    name = "replaying-server"
    needs_active = True

    def __init__(self):
        super().__init__()
        self._previous: dict[int, tuple[bytes, ...]] = {}

    def forwarded(self, group: int, member: int, forwarded: dict[int, bytes]) -> dict[int, bytes]:
        for client in sorted(forwarded):
            stale = self._previous.get(client)
            if stale is not None:
                self.injected = True
                return {**forwarded, client: stale[member - 1]}
        return forwarded

    def observe(self, messages: Mapping[int, ClientMessage]) -> None:
        self._previous = {i: msg.aux_ciphertexts for i, msg in messages.items()}


ADVERSARIES: dict[str, type[Adversary]] = {
    cls.name: cls for cls in (Adversary, EquivocatingServer, InconsistentShareClient, ReplayingServer)
}


def make_adversary(name: str) -> Adversary:
    try:
        return ADVERSARIES[name]()
    except KeyError as exc:
        raise ParameterError(f"unknown adversary {name!r}; choose from {sorted(ADVERSARIES)}") from exc
