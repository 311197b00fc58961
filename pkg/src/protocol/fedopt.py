"""連合最適化との接続

実数値のモデル更新を固定小数点でメッセージ空間 [0, 2^bits) に写し、集約後に
平均更新 Δ_t に戻してフックへ渡す。最適化アルゴリズム自体は持たない。
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from src.errors import ParameterError, RangeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Quantizer:
    """[-clip, clip] の実数を bits ビットの非負整数に写す

    Attributes:
        clip: 値域の半幅
        bits: 1座標あたりのビット数
    """

    clip: float
    bits: int

    def __post_init__(self):
        if self.clip <= 0 or self.bits < 1:
            raise ParameterError("clip must be positive and bits at least 1")

    @property
    def levels(self) -> int:
        return (1 << self.bits) - 1

    @property
    def scale(self) -> float:
        return self.levels / (2 * self.clip)


def quantize(update: Sequence[float], qz: Quantizer) -> list[int]:
    """切り詰めてから最近接の格子点に丸める"""
    arr = np.clip(np.asarray(update, dtype=np.float64), -qz.clip, qz.clip)
    return np.rint((arr + qz.clip) * qz.scale).astype(np.int64).tolist()


def dequantize(aggregate: Sequence[int], count: int, qz: Quantizer) -> list[float]:
    """count 人分の和から平均更新を復元する"""
    if count <= 0:
        raise RangeError("cannot average over an empty online set")
    arr = np.asarray(aggregate, dtype=np.float64)
    return (arr / (count * qz.scale) - qz.clip).tolist()


class PostAggregationHook(Protocol):
    def __call__(self, label: int, update: list[float], online: int) -> None: ...


@dataclass
class AverageUpdateRecorder:
    """各反復の平均更新を記録するフック"""

    history: list[tuple[int, list[float], int]] = field(default_factory=list)

    def __call__(self, label: int, update: list[float], online: int) -> None:
        logger.debug("recorded update for iteration %d over %d clients", label, online)
        self.history.append((label, update, online))

    @property
    def latest(self) -> list[float] | None:
        return self.history[-1][1] if self.history else None
