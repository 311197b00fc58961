"""シード準同型PRG（LWR / LWE）

LWR: Expand(s) = ⌊A⊤·s⌋_p （ほぼ準同型。和ごとに {0,1} の誤差）
LWE: Expand((s, e)) = A·s + e （厳密に準同型）
"""

import random
from collections.abc import Sequence
from dataclasses import dataclass
from operator import mul

import numpy as np

from src.errors import ParameterError
from src.shprg.matrix import PrgParams, PublicMatrix


@dataclass(frozen=True)
class PrgSeed:
    """PRGのシード。LWEモードでは誤差ベクトル e を伴う

    e は非負の代表元 [1, 2η+1] に平行移動して保持する。
    """

    s: tuple[int, ...]
    e: tuple[int, ...] | None = None


def sample_seed(params: PrgParams, rng: random.Random) -> PrgSeed:
    q = params.q.value
    return PrgSeed(s=tuple(rng.randrange(q) for _ in range(params.lambda_)))


def sample_lwe_seed(params: PrgParams, rng: random.Random, eta: int | None = None) -> PrgSeed:
    """一様な s と中心二項分布の誤差 e（+η+1 で非負化）を持つシード"""
    eta = params.eta if eta is None else eta
    seed = sample_seed(params, rng)
    gen = np.random.default_rng(rng.getrandbits(64))
    centered = gen.binomial(2 * eta, 0.5, size=params.big_l) - eta
    errors = tuple(int(v) + eta + 1 for v in centered)
    return PrgSeed(s=seed.s, e=errors)


def _dot_rows(A: PublicMatrix, s: Sequence[int]) -> list[int]:
    q = A.modulus
    return [sum(map(mul, row, s)) % q for row in A.rows]


def _check_dims(params: PrgParams, A: PublicMatrix, s: Sequence[int]) -> None:
    rows, cols = A.shape
    if len(s) != params.lambda_ or cols != params.lambda_ or rows != params.big_l:
        raise ParameterError(
            f"dimension mismatch: A is {rows}x{cols}, seed has {len(s)}, "
            f"params expect L={params.big_l}, lambda={params.lambda_}"
        )


def expand_lwr(params: PrgParams, A: PublicMatrix, sd: PrgSeed) -> list[int]:
    """⌊A⊤·s⌋_p を L 個の Z_p の値として返す"""
    _check_dims(params, A, sd.s)
    q, p = params.q.value, params.p.value
    return [(v * p) // q for v in _dot_rows(A, sd.s)]


def expand_lwe(
    params: PrgParams, A: PublicMatrix, sd: PrgSeed, error_bound: int | None = None
) -> list[int]:
    """A·s + e mod q。e を省略した場合は A·s のみ

    error_bound を渡すと誤差の上界を上書きする（和を取ったシードの検算用）。
    """
    _check_dims(params, A, sd.s)
    q = params.q.value
    products = _dot_rows(A, sd.s)
    if sd.e is None:
        return products
    if len(sd.e) != params.big_l:
        raise ParameterError(f"error vector has {len(sd.e)} entries, expected {params.big_l}")
    bound = params.error_bound if error_bound is None else error_bound
    if any(abs(err) > bound for err in sd.e):
        raise ParameterError(f"error entry exceeds bound {bound}")
    return [(v + err) % q for v, err in zip(products, sd.e)]


def add_seeds(params: PrgParams, *seeds: PrgSeed) -> PrgSeed:
    """シードの和（s は mod q、e は整数和）"""
    q = params.q.value
    s = tuple(sum(col) % q for col in zip(*(sd.s for sd in seeds)))
    if all(sd.e is not None for sd in seeds):
        e = tuple(sum(col) for col in zip(*(sd.e for sd in seeds)))
        return PrgSeed(s=s, e=e)
    return PrgSeed(s=s)
