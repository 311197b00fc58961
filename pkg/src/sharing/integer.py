"""整数上のShamir秘密分散（通常版・パック版）と掃き出し多項式

位数の分からない群で使うため、逆元を使わずに Δ = m! で分母を払う。
    通常版: f(0) = s·Δ、再構成は Σ Λ_j·s_j = s·Δ²
    パック版: f(pos_i) = s_i·Δ²、再構成は s_i·Δ³
"""

import logging
import random
from collections.abc import Sequence
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import ceil, comb, log2

from src.errors import MathError, ParameterError, RangeError, ThresholdError
from src.ringmath.poly import horner, integer_lagrange, poly_mul_linear
from src.sharing.shares import Share, ShareParams, check_indices

logger = logging.getLogger(__name__)


def _randomness_range(sp: ShareParams) -> int:
    return 1 << (sp.ell_r + sp.kappa_s)


def _check_secret(secret: int, sp: ShareParams) -> None:
    if not 0 <= secret < (1 << sp.ell_s):
        raise RangeError(f"secret outside [0, 2^{sp.ell_s})")


def _warn_if_not_private(sp: ShareParams) -> None:
    need = min_randomness_bits(sp)
    if sp.ell_r < need:
        logger.warning("ell_r=%d is below the %d bits needed for statistical privacy", sp.ell_r, need)


def share_integer(
    secret: int,
    sp: ShareParams,
    rng: random.Random,
    coeffs: Sequence[int] | None = None,
) -> list[Share]:
    """f(X) = s·Δ + Σ r_k X^k（r_k ← [0, 2^{ℓ_r+κ_s})）の値を配る"""
    _check_secret(secret, sp)
    if coeffs is None:
        _warn_if_not_private(sp)
        top = _randomness_range(sp)
        coeffs = [rng.randrange(top) for _ in range(sp.r - 1)]
    elif len(coeffs) != sp.r - 1:
        raise ParameterError(f"expected {sp.r - 1} random coefficients")
    poly = [secret * sp.delta_fact, *coeffs]
    return [Share(j, horner(poly, j)) for j in range(1, sp.m + 1)]


def _chosen(shares: Sequence[Share], sp: ShareParams) -> list[Share]:
    check_indices(shares)
    if len(shares) < sp.r:
        raise ThresholdError(f"need {sp.r} shares, got {len(shares)}")
    return sorted(shares, key=lambda s: s.index)[: sp.r]


def reconstruct_integer(shares: Sequence[Share], sp: ShareParams) -> int:
    """Σ Λ_j·s_j を返す（= s·Δ²。呼び出し側で Δ² で割る）"""
    chosen = _chosen(shares, sp)
    lams = integer_lagrange([s.index for s in chosen], 0, sp.delta_fact)
    return sum(l * s.value for l, s in zip(lams, chosen))


def _packed_basis(sp: ShareParams) -> list[list[int]]:
    """Δ·L_i(X) の整数係数（X^0 から）"""
    delta = sp.delta_fact
    positions = sp.positions
    basis = []
    for i, pos_i in enumerate(positions):
        coeffs = [Fraction(1)]
        for k, pos_k in enumerate(positions):
            if k != i:
                coeffs = poly_mul_linear(coeffs, pos_k)
                coeffs = [c / (pos_i - pos_k) for c in coeffs]
        scaled = [c * delta for c in coeffs]
        if any(c.denominator != 1 for c in scaled):
            raise MathError("packing basis is not integral")
        basis.append([c.numerator for c in scaled])
    return basis


def share_packed_integer(
    secrets: Sequence[int],
    sp: ShareParams,
    rng: random.Random,
    q_coeffs: Sequence[int] | None = None,
) -> list[Share]:
    """f(X) = q(X)·∏(X − pos_i) + Σ s_i·Δ·(Δ·L_i(X)) を配る"""
    if len(secrets) != sp.rho:
        raise ParameterError(f"expected {sp.rho} secrets")
    for s in secrets:
        _check_secret(s, sp)
    if q_coeffs is None:
        _warn_if_not_private(sp)
        top = _randomness_range(sp)
        q_coeffs = [rng.randrange(top) for _ in range(sp.r - sp.rho)]
    elif len(q_coeffs) != sp.r - sp.rho:
        raise ParameterError(f"q(X) needs {sp.r - sp.rho} coefficients")
    delta = sp.delta_fact
    basis = _packed_basis(sp)
    shares = []
    for j in range(1, sp.m + 1):
        vanish = 1
        for pos in sp.positions:
            vanish *= j - pos
        value = horner(q_coeffs, j) * vanish
        value += sum(s * delta * horner(b, j) for s, b in zip(secrets, basis))
        shares.append(Share(j, value))
    return shares


def reconstruct_packed_integer(shares: Sequence[Share], sp: ShareParams) -> list[int]:
    """各スロットの s_k·Δ³ を返す"""
    chosen = _chosen(shares, sp)
    points = [s.index for s in chosen]
    out = []
    for pos in sp.positions:
        lams = integer_lagrange(points, pos, sp.delta_fact)
        out.append(sum(l * s.value for l, s in zip(lams, chosen)))
    return out


# === 掃き出し多項式（プライバシーの証拠） ===

def sweeping_polynomial(corrupt: Sequence[int], slot: int, sp: ShareParams) -> list[int]:
    """汚染集合 C とスロット i に対する掃き出し多項式の整数係数

    sp_{i,C}(m+i) = Δ²、sp_{i,C}(m+j) = 0 (j≠i)、sp_{i,C}(c) = 0 (c∈C)。
    """
    corrupt = list(corrupt)
    if len(corrupt) != sp.t or len(set(corrupt)) != len(corrupt):
        raise ParameterError(f"corrupt set must have {sp.t} distinct members")
    if any(not 1 <= c <= sp.m for c in corrupt):
        raise ParameterError("corrupt set must lie in [1, m]")
    if not 1 <= slot <= sp.rho:
        raise ParameterError(f"slot must be in [1, {sp.rho}]")
    target = sp.m + slot
    coeffs = [Fraction(sp.delta_fact**2)]
    for c in corrupt:
        coeffs = [v / (target - c) for v in poly_mul_linear(coeffs, c)]
    for j in range(1, sp.rho + 1):
        if j != slot:
            coeffs = [v / (slot - j) for v in poly_mul_linear(coeffs, sp.m + j)]
    if any(v.denominator != 1 for v in coeffs):
        raise MathError("sweeping polynomial is not integral")
    return [v.numerator for v in coeffs]


def sweeping_coefficient_bound(sp: ShareParams) -> int:
    """全ての C, i に対する掃き出し多項式係数の上界 h_max

    ∏(X − a) の係数の絶対値は ∏(1 + |a|) 以下であることを使う。
    C は比 (1+c)/(m+i−c) の大きい順に選べば最悪になる。
    """
    delta_sq = sp.delta_fact**2
    best = Fraction(0)
    for slot in range(1, sp.rho + 1):
        target = sp.m + slot
        ratios = sorted(
            (Fraction(1 + c, target - c) for c in range(1, sp.m + 1)), reverse=True
        )
        bound = Fraction(delta_sq)
        for ratio in ratios[: sp.t]:
            bound *= ratio
        for j in range(1, sp.rho + 1):
            if j != slot:
                bound *= Fraction(1 + sp.m + j, abs(slot - j))
        best = max(best, bound)
    return ceil(best)


def sweeping_max(sp: ShareParams, exhaustive_limit: int = 5000) -> int:
    """h_max。汚染集合が少なければ全列挙の最大値、多ければ sweeping_coefficient_bound"""
    if comb(sp.m, sp.t) * sp.rho > exhaustive_limit:
        return sweeping_coefficient_bound(sp)
    return exact_sweeping_max(sp)


@lru_cache(maxsize=32)
def min_randomness_bits(sp: ShareParams) -> int:
    """統計的プライバシーに必要な ℓ_r の下限"""
    factor = sweeping_max(sp) * max(1, sp.r - 1) * sp.rho
    return sp.ell_s + ceil(log2(factor)) + 1


def exact_sweeping_max(sp: ShareParams) -> int:
    """全ての C とスロットを列挙した係数の最大値"""
    best = 0
    for corrupt in combinations(range(1, sp.m + 1), sp.t):
        for slot in range(1, sp.rho + 1):
            best = max(best, max(abs(c) for c in sweeping_polynomial(corrupt, slot, sp)))
    return best
