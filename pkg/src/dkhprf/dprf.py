"""LWRベースの分散・ほぼ鍵準同型PRF

    Eval(k, x)    = ⌊Δ·⌊Δ·⌊⟨H(x), k⟩⌋_p⌋_u⌋_v
    P-Eval(k⁽ʲ⁾, x) = ⌊Δ·⌊⟨H(x), k⁽ʲ⁾⟩⌋_p⌋_u
    Combine       = ⌊Σ Λ_j·y_j mod u⌋_v,  Λ_j = Δ·λ_j（有理ラグランジュ係数を整数化）

Δ = m!。鍵は座標ごとに独立な多項式で体 F_q 上にShamir分散する。
Combine と Eval の差は最後の丸めの直前で有界な整数 D に収まり
（|D| ≤ Δ²u/p + Δ + Σ|Λ_j|·(Δu/p + 1)）、⌊u/v⌋ が D に比べて十分大きければ
両者は圧倒的な確率で一致する。
"""

import random
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from operator import mul

from src.errors import ParameterError, ThresholdError
from src.ringmath.modulus import Modulus
from src.ringmath.poly import integer_lagrange
from src.sharing.field import share_field
from src.sharing.shares import ShareParams
from src.shprg.xof import TAG_DPRF, sample_mod


@dataclass(frozen=True)
class DprfParams:
    """DPRFのパラメータ

    Attributes:
        rho_dim: 鍵の次元
        q, p, u, v: 丸めの連鎖 q > p > u > v
        m: 鍵シェアの保持者数
        r: 再構成閾値
        enforce_bounds: False にすると u, v の制約検査を省く（制約の必要性を確かめる負のテスト用）
    """

    rho_dim: int
    q: int
    p: int
    u: int
    v: int
    m: int
    r: int
    enforce_bounds: bool = True

    def __post_init__(self):
        if not self.q > self.p > self.u > self.v >= 2:
            raise ParameterError("need q > p > u > v >= 2")
        if not 1 <= self.r <= self.m:
            raise ParameterError("need 1 <= r <= m")
        if self.rho_dim <= 0:
            raise ParameterError("rho_dim must be positive")
        if self.enforce_bounds:
            failures = self.violations()
            if failures:
                raise ParameterError("; ".join(failures))

    @property
    def delta_fact(self) -> int:
        return factorial(self.m)

    def violations(self) -> list[str]:
        """⌊p/u⌋ > (Δ+1)·r·Δ と ⌊u/v⌋ > Δ·r の検査結果"""
        delta = self.delta_fact
        out = []
        if not self.p // self.u > (delta + 1) * self.r * delta:
            out.append(f"floor(p/u)={self.p // self.u} <= (D+1)rD={(delta + 1) * self.r * delta}")
        if not self.u // self.v > delta * self.r:
            out.append(f"floor(u/v)={self.u // self.v} <= Dr={delta * self.r}")
        return out

    def share_params(self) -> ShareParams:
        return ShareParams(m=self.m, r=self.r, t=self.r - 1, field=Modulus(self.q, is_prime=True))


@dataclass(frozen=True)
class DprfKey:
    k: tuple[int, ...]


def _round(x: int, src: int, dst: int) -> int:
    return ((x % src) * dst) // src


def hash_point(x: bytes, params: DprfParams) -> list[int]:
    """H: 入力 → Z_q^{rho_dim}"""
    return sample_mod(TAG_DPRF, [x], params.q, params.rho_dim)


def label_bytes(label: int) -> bytes:
    return label.to_bytes(8, "little")


def gen_key(params: DprfParams, rng: random.Random) -> DprfKey:
    return DprfKey(tuple(rng.randrange(params.q) for _ in range(params.rho_dim)))


def share_key(key: DprfKey, params: DprfParams, rng: random.Random) -> list[DprfKey]:
    """鍵を座標ごとに分散し、メンバー j=1..m の鍵シェアを返す"""
    sp = params.share_params()
    per_coord = [share_field(k, sp, rng) for k in key.k]
    return [DprfKey(tuple(col[j].value for col in per_coord)) for j in range(params.m)]


def inner(h: Sequence[int], key: DprfKey, q: int) -> int:
    if len(key.k) != len(h):
        raise ParameterError("key dimension mismatch")
    return sum(map(mul, h, key.k)) % q


def first_level(key: DprfKey, x: bytes, params: DprfParams, h: Sequence[int] | None = None) -> int:
    """⌊⟨H(x), k⟩⌋_p"""
    h = hash_point(x, params) if h is None else h
    return _round(inner(h, key, params.q), params.q, params.p)


def lift_to_u(a: int, params: DprfParams) -> int:
    """⌊Δ·a mod p⌋_u"""
    return _round(params.delta_fact * a, params.p, params.u)


def eval_prf(key: DprfKey, x: bytes, params: DprfParams, h: Sequence[int] | None = None) -> int:
    """Eval: 3段の丸め"""
    y = lift_to_u(first_level(key, x, params, h), params)
    return _round(params.delta_fact * y, params.u, params.v)


def p_eval(key_share: DprfKey, x: bytes, params: DprfParams, h: Sequence[int] | None = None) -> int:
    """P-Eval: 部分評価（Z_u の値）"""
    return lift_to_u(first_level(key_share, x, params, h), params)


def combine_weights(indices: Sequence[int], params: DprfParams) -> list[int]:
    """Λ_j = Δ·λ_j(0)（整数）"""
    return integer_lagrange(indices, 0, params.delta_fact)


def combine(partials: Sequence[tuple[int, int]], params: DprfParams) -> int:
    """(index, y) の組 r 個以上から Eval 相当の値を得る"""
    indices = [i for i, _ in partials]
    if len(set(indices)) != len(indices):
        raise ParameterError(f"duplicate partial index in {indices}")
    if len(partials) < params.r:
        raise ThresholdError(f"need {params.r} partials, got {len(partials)}")
    chosen = sorted(partials)[: params.r]
    weights = combine_weights([i for i, _ in chosen], params)
    total = sum(w * y for w, (_, y) in zip(weights, chosen)) % params.u
    return _round(total, params.u, params.v)


def lambda_mass(params: DprfParams, exhaustive_limit: int = 5000) -> int:
    """全ての r 部分集合にわたる Σ|Λ_j| の最大値

    部分集合が多すぎる場合は |λ_j| ≤ m^{r-1} による上界 r·Δ·m^{r-1} を返す。
    """
    delta = params.delta_fact
    if comb(params.m, params.r) > exhaustive_limit:
        return params.r * delta * params.m ** (params.r - 1)
    return max(
        sum(abs(w) for w in integer_lagrange(list(subset), 0, delta))
        for subset in combinations(range(1, params.m + 1), params.r)
    )


def combine_gap_bound(params: DprfParams) -> int:
    """最後の丸め前の差 |D| の上界を v 側に写した、Combine と Eval の差の上界"""
    delta = params.delta_fact
    mass = lambda_mass(params)
    d_bound = (delta * delta * params.u) / params.p + delta + mass * (delta * params.u / params.p + 1)
    return int(d_bound * params.v / params.u) + 1


def centered(value: int, modulus: int) -> int:
    """(-modulus/2, modulus/2] の代表元"""
    value %= modulus
    return value - modulus if value > modulus // 2 else value
