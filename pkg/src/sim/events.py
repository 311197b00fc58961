"""離散イベント型のネットワークシミュレータ

ノードごとにローカル時刻を持ち、送信イベントは「送信者の時刻 + 遅延」で
優先度キュー（heapq）に積む。deliver() は到着順にイベントを取り出し、
受信者の時刻を到着時刻まで進める。脱落したノード宛てのメッセージは
配送されず dropped としてバイト数だけ計上する。
"""

import heapq
import itertools
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Any

from src.sim.latency import LatencyModel

logger = logging.getLogger(__name__)

SERVER = "server"


def client_node(client: int) -> str:
    return f"client:{client}"


def member_node(group: int, member: int) -> str:
    return f"member:{group}:{member}"


@dataclass(order=True)
class Event:
    """キューに積まれる1通のメッセージ"""

    time_us: float
    seq: int
    src: str = field(compare=False)
    dst: str = field(compare=False)
    kind: str = field(compare=False)
    size: int = field(compare=False)
    payload: Any = field(compare=False, default=None)


@dataclass(frozen=True)
class TranscriptEntry:
    label: int
    src: str
    dst: str
    kind: str
    size: int
    sent_us: float
    delivered: bool


class NetworkSimulator:
    """1反復分のネットワーク

    Args:
        latency: 遅延モデル
        rng: ジッタの乱数源
        label: トランスクリプトに記録する反復番号
    """

    def __init__(self, latency: LatencyModel, rng: random.Random, label: int = 0):
        self.latency = latency
        self.rng = rng
        self.label = label
        self._queue: list[Event] = []
        self._seq = itertools.count()
        self._clock: dict[str, float] = {}
        self.offline: set[str] = set()
        self.transcript: list[TranscriptEntry] = []
        self.bytes_sent = 0
        self.bytes_received = 0
        self.bytes_dropped = 0

    def ready(self, node: str) -> float:
        return self._clock.get(node, 0.0)

    def advance(self, node: str, compute_us: float) -> None:
        """ノードの計算時間だけローカル時刻を進める"""
        self._clock[node] = self.ready(node) + compute_us

    def send(self, src: str, dst: str, kind: str, size: int, payload: Any = None) -> None:
        sent = self.ready(src)
        self.bytes_sent += size
        delivered = dst not in self.offline
        self.transcript.append(TranscriptEntry(self.label, src, dst, kind, size, sent, delivered))
        if not delivered:
            self.bytes_dropped += size
            logger.debug("%s -> %s lost (%s offline)", src, dst, dst)
            return
        arrival = sent + self.latency.delay(src, dst, self.rng)
        heapq.heappush(self._queue, Event(arrival, next(self._seq), src, dst, kind, size, payload))

    def deliver(self) -> list[Event]:
        """キューが空になるまで到着順に配送する"""
        out = []
        while self._queue:
            event = heapq.heappop(self._queue)
            self._clock[event.dst] = max(self.ready(event.dst), event.time_us)
            self.bytes_received += event.size
            out.append(event)
        return out

    @property
    def now(self) -> float:
        """全ノードの時刻の最大値（反復の完了時刻）"""
        return max(self._clock.values(), default=0.0)

    def outbound_counts(self) -> Counter:
        return Counter(entry.src for entry in self.transcript)

    def balanced(self) -> bool:
        return self.bytes_sent == self.bytes_received + self.bytes_dropped + self.in_flight()

    def in_flight(self) -> int:
        return sum(event.size for event in self._queue)
