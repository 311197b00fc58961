"""多項式とラグランジュ補間

秘密分散で使う多項式評価と補間係数を提供する。
体の上（素数モジュラス）と整数上（有理数 → Δ倍で整数化）の両方を扱う。
"""

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from src.errors import ParameterError
from src.ringmath.modulus import Fe, Modulus, inv_mod


@dataclass(frozen=True, slots=True)
class Poly:
    """係数列で表した多項式（coeffs[k] が X^k の係数）

    末尾のゼロ係数は許容する。全係数が同じモジュラスを持つこと。
    """

    coeffs: tuple[Fe, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ParameterError("polynomial needs at least one coefficient")
        mod = self.coeffs[0].modulus.value
        if any(c.modulus.value != mod for c in self.coeffs):
            raise ParameterError("all coefficients must share one modulus")

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], modulus: Modulus) -> "Poly":
        return cls(tuple(modulus.element(c) for c in coeffs))

    @property
    def modulus(self) -> Modulus:
        return self.coeffs[0].modulus

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def poly_eval(f: Poly, x: Fe) -> Fe:
    """Horner法で f(x) を評価する"""
    if x.modulus.value != f.modulus.value:
        raise ParameterError("evaluation point modulus differs from polynomial")
    value = horner([c.residue for c in f.coeffs], x.residue, f.modulus.value)
    return Fe(value, f.modulus)


def horner(coeffs: Sequence[int], x: int, modulus: int | None = None) -> int:
    """int版のHorner評価。modulus=None なら整数上で評価する"""
    acc = 0
    if modulus is None:
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc
    for c in reversed(coeffs):
        acc = (acc * x + c) % modulus
    return acc


def lagrange_coefficients(
    points: Sequence[int], target: int, modulus: int
) -> list[int]:
    """体の上で、points の各点のラグランジュ基底を target で評価した値

    Returns:
        λ_j = ∏_{k≠j} (target - x_k) / (x_j - x_k) mod modulus のリスト
    """
    return list(_lagrange_cached(tuple(points), target, modulus))


@lru_cache(maxsize=4096)
def _lagrange_cached(points: tuple[int, ...], target: int, modulus: int) -> tuple[int, ...]:
    if len(set(p % modulus for p in points)) != len(points):
        raise ParameterError(f"duplicate interpolation points: {points}")
    coeffs = []
    for j, xj in enumerate(points):
        num, den = 1, 1
        for k, xk in enumerate(points):
            if k == j:
                continue
            num = num * (target - xk) % modulus
            den = den * (xj - xk) % modulus
        coeffs.append(num * inv_mod(den, modulus) % modulus)
    return tuple(coeffs)


def rational_lagrange(points: Sequence[int], target: int) -> list[Fraction]:
    """有理数上のラグランジュ係数"""
    return list(_rational_cached(tuple(points), target))


@lru_cache(maxsize=4096)
def _rational_cached(points: tuple[int, ...], target: int) -> tuple[Fraction, ...]:
    if len(set(points)) != len(points):
        raise ParameterError(f"duplicate interpolation points: {points}")
    coeffs = []
    for j, xj in enumerate(points):
        value = Fraction(1)
        for k, xk in enumerate(points):
            if k != j:
                value *= Fraction(target - xk, xj - xk)
        coeffs.append(value)
    return tuple(coeffs)


def integer_lagrange(points: Sequence[int], target: int, delta: int) -> list[int]:
    """Δ倍して整数化したラグランジュ係数 Λ_j = Δ·λ_j

    点が [1, m] の相異なる整数で Δ = m! のとき必ず整数になる。
    """
    result = []
    for lam in rational_lagrange(points, target):
        scaled = lam * delta
        if scaled.denominator != 1:
            raise ParameterError(
                f"offset {delta} does not clear the Lagrange denominator {lam.denominator}"
            )
        result.append(scaled.numerator)
    return result


def poly_mul_linear(coeffs: Sequence[Fraction], root: int) -> list[Fraction]:
    """有理係数多項式に (X - root) を掛ける"""
    out = [Fraction(0)] * (len(coeffs) + 1)
    for k, c in enumerate(coeffs):
        out[k + 1] += c
        out[k] -= c * root
    return out
