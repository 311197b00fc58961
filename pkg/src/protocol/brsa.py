"""符号ベクトルの集約（bRSA）

更新の符号 u ∈ {−1, 1}^L を v = (u+1)/2 ∈ {0, 1}^L に写して OPA で和を取り、
Σu = 2·Σv − |C| で符号の和に戻す。
"""

from collections.abc import Sequence

import numpy as np

from src.errors import RangeError


def brsa_encode(signs: Sequence[int]) -> list[int]:
    """u ∈ {−1, 1}^L → v = (u+1)/2"""
    arr = np.asarray(signs, dtype=np.int64)
    if not np.isin(arr, (-1, 1)).all():
        raise RangeError("sign vector entries must be -1 or 1")
    return ((arr + 1) // 2).tolist()


def brsa_aggregate(vectors: Sequence[Sequence[int]]) -> list[int]:
    """2·Σv − |C|

    Args:
        vectors: C 内のクライアントの2値ベクトル

    Returns:
        座標ごとの符号の和
    """
    if not vectors:
        return []
    if len({len(v) for v in vectors}) != 1:
        raise RangeError("binary vectors must all have the same length")
    arr = np.asarray(vectors, dtype=np.int64)
    if not np.isin(arr, (0, 1)).all():
        raise RangeError("binary vector entries must be 0 or 1")
    return (2 * arr.sum(axis=0) - len(vectors)).tolist()


def brsa_from_sum(aggregate: Sequence[int], online: int) -> list[int]:
    """OPA の集約値 Σv から符号の和を得る"""
    return [2 * s - online for s in aggregate]
