"""委員会のサンプリングと割り当て、汚染率の裾確率

全体 N 人のクライアントからビーコンで決定的に m·M 人を選び、M グループの
委員会に分ける。クライアント i はグループ i mod M の m 人とだけ通信する。

委員会の汚染率が期待値 η を d 以上超える確率は超幾何分布の裾の評価
Pr[X ≥ (η + d)·m] ≤ e^{−2d²m} で抑える。
"""

import logging
import math
import random
from collections.abc import Iterable
from dataclasses import dataclass

from src.errors import ParameterError
from src.shprg.xof import TAG_BEACON, xof_bytes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CommitteeAssignment:
    """委員会の割り当て

    Attributes:
        groups: グループごとのメンバー（全体集合のクライアント番号）。添字 j-1 がメンバー番号 j
    """

    groups: tuple[tuple[int, ...], ...]

    @property
    def group_count(self) -> int:
        return len(self.groups)

    @property
    def size(self) -> int:
        return len(self.groups[0])

    def group_of(self, client: int) -> int:
        return client % self.group_count

    def members_for(self, client: int) -> tuple[int, ...]:
        return self.groups[self.group_of(client)]

    def clients_of(self, group: int, clients: Iterable[int]) -> list[int]:
        """clients のうちグループ group に属するもの（昇順）"""
        return sorted(i for i in clients if self.group_of(i) == group)


def sample_committee(universe: int, m: int, groups: int, beacon: bytes) -> CommitteeAssignment:
    """ビーコンから決定的に委員会を選ぶ

    Args:
        universe: 全体のクライアント数 N
        m: 1グループの委員会サイズ
        groups: グループ数 M
        beacon: 公開ランダムビーコン
    """
    if m <= 0 or groups <= 0:
        raise ParameterError("m and groups must be positive")
    if universe < m * groups:
        raise ParameterError(f"universe N={universe} is smaller than m*M={m * groups}")
    seed = int.from_bytes(xof_bytes(TAG_BEACON, [beacon], 32), "little")
    chosen = random.Random(seed).sample(range(universe), m * groups)
    logger.debug("sampled %d committee members in %d groups", m * groups, groups)
    return CommitteeAssignment(tuple(tuple(chosen[g * m : (g + 1) * m]) for g in range(groups)))


def fan_in(n: int, groups: int) -> int:
    """1メンバーが受け取るクライアント数の上限 ⌈n/M⌉"""
    return -(-n // groups)


def hypergeom_tail_bound(m: int, d: float) -> float:
    """e^{−2d²m}"""
    if not 0 < d < 1:
        raise ParameterError(f"deviation d must lie in (0, 1), got {d}")
    return math.exp(-2 * d * d * m)


def union_tail_bound(m: int, d: float, groups: int) -> float:
    """M グループのいずれかが閾値を超える確率の上界 M·e^{−2d²m}（= M·2^{−γ}）"""
    return min(1.0, groups * hypergeom_tail_bound(m, d))


def tail_bits(m: int, d: float) -> float:
    """γ = 2d²m·log2(e)"""
    return 2 * d * d * m * math.log2(math.e)
