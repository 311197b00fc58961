"""SCRAPE テスト（双対符号による次数検査）

相異なる評価点 α_0..α_{P-1} 上の値ベクトル s が次数 d 以下の多項式の評価値であるとき、

    v_i = ∏_{j≠i} (α_i − α_j)^{-1},  w_i = v_i · m*(α_i),  deg m* ≤ P − d − 2

に対して ⟨w, s⟩ = 0 が成り立つ。次数 d を超える場合はランダムな m* に対して
確率 1/q でしか 0 にならない。

通常の分散では評価点は 0..m（0 は秘密）、パック分散では m+1..m+ρ（秘密）と 1..m。
"""

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

from src.errors import ParameterError
from src.ringmath.modulus import inv_mod
from src.ringmath.poly import horner
from src.sharing.shares import ShareParams
from src.shprg.xof import TAG_SCRAPE, sample_mod


@dataclass(frozen=True)
class ScrapeWeights:
    """検査ベクトル w

    Attributes:
        w: 各評価点の重み
        points: 評価点（w と同じ順）
        modulus: 体のモジュラス
        m_star: 乗数多項式 m* の係数（X^0 から）
    """

    w: tuple[int, ...]
    points: tuple[int, ...]
    modulus: int
    m_star: tuple[int, ...]


@lru_cache(maxsize=64)
def _dual_cached(points: tuple[int, ...], modulus: int) -> tuple[int, ...]:
    if len(set(p % modulus for p in points)) != len(points):
        raise ParameterError(f"evaluation points must be distinct mod {modulus}")
    out = []
    for i, a in enumerate(points):
        den = 1
        for j, b in enumerate(points):
            if j != i:
                den = den * (a - b) % modulus
        out.append(inv_mod(den, modulus))
    return tuple(out)


def dual_code_weights(points: Sequence[int], modulus: int) -> list[int]:
    """v_i = ∏_{j≠i} (α_i − α_j)^{-1} mod q"""
    return list(_dual_cached(tuple(points), modulus))


def default_points(sp: ShareParams) -> tuple[int, ...]:
    """通常の分散: 0（秘密）と 1..m"""
    return tuple(range(sp.m + 1))


def packed_points(sp: ShareParams) -> tuple[int, ...]:
    """パック分散: 秘密の位置 m+1..m+ρ を先頭に、続けて 1..m"""
    return (*sp.positions, *range(1, sp.m + 1))


def multiplier_length(point_count: int, degree: int) -> int:
    """m* の係数の個数（P − d − 1）"""
    return point_count - degree - 1


def weights_from_multiplier(points: Sequence[int], modulus: int, m_star: Sequence[int]) -> ScrapeWeights:
    """m* を与えて w を作る（テストや固定の m* で使う）"""
    v = dual_code_weights(points, modulus)
    w = tuple(vi * horner(m_star, a, modulus) % modulus for vi, a in zip(v, points))
    return ScrapeWeights(w=w, points=tuple(points), modulus=modulus, m_star=tuple(m_star))


def scrape_weights(
    sp: ShareParams,
    transcript: bytes,
    points: Sequence[int] | None = None,
) -> ScrapeWeights:
    """トランスクリプトのハッシュから m* を導出して検査ベクトルを作る

    Args:
        sp: 分散パラメータ（d = r − 1、体は sp.field）
        transcript: Fiat–Shamir に入れるバイト列（コミットメントの連結）
        points: 評価点。省略時は default_points(sp)
    """
    if sp.field is None:
        raise ParameterError("SCRAPE needs a prime field")
    q = sp.field.value
    points = tuple(points) if points is not None else default_points(sp)
    count = multiplier_length(len(points), sp.r - 1)
    if count < 1:
        raise ParameterError(
            f"{len(points)} points leave no room for the multiplier at degree {sp.r - 1}"
        )
    m_star = sample_mod(TAG_SCRAPE, [transcript], q, count)
    return weights_from_multiplier(points, q, m_star)


def inner_product(w: Sequence[int], values: Sequence[int], modulus: int) -> int:
    if len(w) != len(values):
        raise ParameterError(f"length mismatch: {len(w)} weights vs {len(values)} values")
    return sum(a * b for a, b in zip(w, values)) % modulus


def scrape_check(values: Sequence[int], weights: ScrapeWeights) -> bool:
    """⟨w, values⟩ = 0 なら True"""
    return inner_product(weights.w, values, weights.modulus) == 0
