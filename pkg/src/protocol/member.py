"""委員会メンバーのロール

サーバーから転送された C 内のクライアントの暗号文を復号し、シェアを足し合わせて
1回だけ返信する。復号・ラベル・コミットメントのいずれかの検査に失敗したら
結合結果の代わりに苦情（complaint）を返す。
"""

import logging
from collections.abc import Mapping, Sequence

from src.errors import DecodeError, DecryptionError
from src.protocol.messages import Abort, AbortReason, AuxPayload, CommitteeMessage, IterationId, view_digest
from src.protocol.opa_prime import prime_member_partial
from src.protocol.params import Mode, ProtocolParams
from src.protocol.pke import Keypair, PkeBackend, associated_data
from src.sharing.shares import Share
from src.verify.group import GroupBackend
from src.verify.proof import committee_share_check

logger = logging.getLogger(__name__)


def _complaint(member: int, iteration: IterationId, view: bytes, group_index: int, detail: str) -> CommitteeMessage:
    logger.info("member %d complains in iteration %d: %s", member, iteration.label, detail)
    return CommitteeMessage(
        member=member,
        label=iteration.label,
        aux=(),
        view=view,
        complaint=Abort(AbortReason.COMMITTEE_COMPLAINT, detail),
        group=group_index,
    )


def committee_combine(
    member: int,
    forwarded: Mapping[int, bytes],
    online: Sequence[int],
    iteration: IterationId,
    params: ProtocolParams,
    keypair: Keypair,
    cipher: PkeBackend,
    commitments: Mapping[int, Sequence[int]] | None = None,
    group: GroupBackend | None = None,
    group_index: int = 0,
) -> CommitteeMessage:
    """C 内のクライアントのシェアを合算する

    Args:
        member: メンバー番号 j（1..m）
        forwarded: クライアント i → メンバー j 宛ての暗号文
        online: サーバーが示したオンライン集合 C（このグループの分）
        iteration: 反復の識別子
        params: 公開パラメータ
        keypair: メンバーの鍵ペア
        cipher: 補助情報の暗号化方式
        commitments: クライアント i → チャンクごとのコミットメント（能動的安全性モード）
        group: コミットメントの群
        group_index: 委員会グループ番号

    Returns:
        CommitteeMessage: シェアの和、または苦情
    """
    view = view_digest(online)
    if not online:
        return _complaint(member, iteration, view, group_index, "empty online set")

    width = params.vec_len if params.mode is Mode.PRIME_LWR else params.chunks
    payloads: list[AuxPayload] = []
    for client in sorted(online):
        ciphertext = forwarded.get(client)
        if ciphertext is None:
            return _complaint(member, iteration, view, group_index, f"no ciphertext from client {client}")
        try:
            raw = cipher.open(keypair, associated_data(iteration.label, client), ciphertext)
            payload = AuxPayload.deserialize(raw, params.field_modulus)
        except (DecryptionError, DecodeError) as exc:
            return _complaint(member, iteration, view, group_index, f"client {client}: {exc}")
        if payload.label != iteration.label or payload.client != client:
            return _complaint(member, iteration, view, group_index, f"client {client}: label or sender mismatch")
        if len(payload.values) != width:
            return _complaint(member, iteration, view, group_index, f"client {client}: expected {width} shares")
        if commitments is not None and group is not None:
            expected = commitments.get(client, ())
            if len(expected) != len(payload.values) or not all(
                committee_share_check(Share(member, value), commitment, group)
                for value, commitment in zip(payload.values, expected)
            ):
                return _complaint(member, iteration, view, group_index, f"client {client}: share does not match commitment")
        payloads.append(payload)

    if params.mode is Mode.PRIME_LWR:
        dp = params.dprf_params()
        summed = [sum(col) % dp.p for col in zip(*(p.values for p in payloads))]
        aux = prime_member_partial(summed, dp)
    else:
        q = params.field_modulus
        aux = tuple(sum(col) % q for col in zip(*(p.values for p in payloads)))

    dig_shares = tuple(
        (p.client, p.dig_share) for p in payloads if p.dig_share is not None
    )
    logger.debug("member %d combined %d clients", member, len(payloads))
    return CommitteeMessage(
        member=member,
        label=iteration.label,
        aux=aux,
        view=view,
        dig_shares=dig_shares,
        group=group_index,
    )
