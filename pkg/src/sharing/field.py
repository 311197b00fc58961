"""素体上のShamir秘密分散（通常版・パック版）

パック版は1つの多項式 f（次数 r-1）に ρ 個の秘密を埋め込む:
    f(X) = q(X)·∏(X − pos_i) + Σ s_i·L_i(X),  pos_i = m + i
q の次数は r−ρ−1。パーティ j は f(j) を受け取る。
体の上では Δ 倍は不要で、再構成は r 点で行う。
"""

import random
from collections.abc import Sequence
from functools import lru_cache

from src.errors import ParameterError, ThresholdError
from src.ringmath.modulus import Fe
from src.ringmath.poly import horner, lagrange_coefficients
from src.sharing.shares import PackedSecret, Share, ShareBundle, ShareParams, check_indices


def _field(sp: ShareParams) -> int:
    if sp.field is None:
        raise ParameterError("field sharing needs sp.field")
    return sp.field.value


def share_field(
    secret: Fe | int,
    sp: ShareParams,
    rng: random.Random,
    coeffs: Sequence[int] | None = None,
) -> list[Share]:
    """秘密を次数 r−1 の多項式で m 個のシェアに分ける

    Args:
        secret: 秘密（f(0)）
        sp: 分散パラメータ（rho は無視し、通常のShamirとして扱う）
        rng: 係数の乱数源
        coeffs: X^1..X^{r-1} の係数を固定する場合に指定
    """
    q = _field(sp)
    if sp.m >= q:
        raise ParameterError(f"m={sp.m} must be smaller than the field")
    s = int(secret) % q
    if coeffs is None:
        coeffs = [rng.randrange(q) for _ in range(sp.r - 1)]
    elif len(coeffs) != sp.r - 1:
        raise ParameterError(f"expected {sp.r - 1} random coefficients")
    poly = [s, *coeffs]
    return [Share(j, horner(poly, j, q)) for j in range(1, sp.m + 1)]


def _select(shares: Sequence[Share], sp: ShareParams) -> list[Share]:
    check_indices(shares)
    if len(shares) < sp.r:
        raise ThresholdError(f"need {sp.r} shares, got {len(shares)}")
    return sorted(shares, key=lambda s: s.index)[: sp.r]


def reconstruct_field(shares: Sequence[Share], sp: ShareParams) -> int:
    """ラグランジュ補間で f(0) を復元する"""
    q = _field(sp)
    chosen = _select(shares, sp)
    lams = lagrange_coefficients([s.index for s in chosen], 0, q)
    return sum(l * s.value for l, s in zip(lams, chosen)) % q


@lru_cache(maxsize=64)
def _packing_table(m: int, rho: int, q: int) -> tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """各パーティ点 j について Z(j) = ∏(j − pos_i) と L_i(j) を前計算する"""
    positions = [m + i for i in range(1, rho + 1)]
    vanishing = []
    basis = []
    for j in range(1, m + 1):
        z = 1
        for pos in positions:
            z = z * (j - pos) % q
        vanishing.append(z)
        basis.append(tuple(lagrange_coefficients(positions, j, q)))
    return tuple(vanishing), tuple(basis)


def share_packed_field(
    secrets: PackedSecret | Sequence[int],
    sp: ShareParams,
    rng: random.Random,
    q_coeffs: Sequence[int] | None = None,
) -> list[Share]:
    """ρ 個の秘密を1つの多項式にパックして m 個のシェアを作る"""
    q = _field(sp)
    values = secrets.values if isinstance(secrets, PackedSecret) else tuple(secrets)
    if len(values) != sp.rho:
        raise ParameterError(f"expected {sp.rho} secrets, got {len(values)}")
    if q_coeffs is None:
        q_coeffs = [rng.randrange(q) for _ in range(sp.r - sp.rho)]
    elif len(q_coeffs) != sp.r - sp.rho:
        raise ParameterError(f"q(X) needs {sp.r - sp.rho} coefficients")
    vanishing, basis = _packing_table(sp.m, sp.rho, q)
    shares = []
    for j in range(1, sp.m + 1):
        value = horner(q_coeffs, j, q) * vanishing[j - 1]
        value += sum(s * l for s, l in zip(values, basis[j - 1]))
        shares.append(Share(j, value % q))
    return shares


def reconstruct_packed_field(shares: Sequence[Share], sp: ShareParams) -> PackedSecret:
    """r 個のシェアから m+1..m+ρ の値を復元する"""
    q = _field(sp)
    chosen = _select(shares, sp)
    points = [s.index for s in chosen]
    out = []
    for pos in sp.positions:
        lams = lagrange_coefficients(points, pos, q)
        out.append(sum(l * s.value for l, s in zip(lams, chosen)) % q)
    return PackedSecret(tuple(out))


# === ベクトル（シード）単位の分散 ===

def chunk_count(length: int, rho: int) -> int:
    return -(-length // rho)


def share_packed_vector(values: Sequence[int], sp: ShareParams, rng: random.Random) -> list[ShareBundle]:
    """長さ λ のベクトルを ⌈λ/ρ⌉ チャンクに分けて各チャンクをパック分散する

    チャンクは座標の小さい順（末尾はゼロ埋め）。戻り値はメンバー j=1..m のバンドル。
    """
    q = _field(sp)
    rho = sp.rho
    vanishing, basis = _packing_table(sp.m, rho, q)
    columns: list[list[int]] = [[] for _ in range(sp.m)]
    for c in range(chunk_count(len(values), rho)):
        chunk = list(values[c * rho : (c + 1) * rho])
        chunk += [0] * (rho - len(chunk))
        q_coeffs = [rng.randrange(q) for _ in range(sp.r - rho)]
        for j in range(1, sp.m + 1):
            value = horner(q_coeffs, j, q) * vanishing[j - 1]
            value += sum(s * l for s, l in zip(chunk, basis[j - 1]))
            columns[j - 1].append(value % q)
    return [ShareBundle(j, tuple(columns[j - 1])) for j in range(1, sp.m + 1)]


def reconstruct_packed_vector(bundles: Sequence[ShareBundle], sp: ShareParams, length: int) -> list[int]:
    """share_packed_vector の逆。任意の r 個のバンドルから長さ length のベクトルを復元する"""
    q = _field(sp)
    indices = [b.index for b in bundles]
    if len(set(indices)) != len(indices):
        raise ParameterError(f"duplicate bundle index in {indices}")
    if len(bundles) < sp.r:
        raise ThresholdError(f"need {sp.r} bundles, got {len(bundles)}")
    chosen = sorted(bundles, key=lambda b: b.index)[: sp.r]
    points = [b.index for b in chosen]
    weights = [lagrange_coefficients(points, pos, q) for pos in sp.positions]
    out: list[int] = []
    for c in range(chunk_count(length, sp.rho)):
        column = [b.values[c] for b in chosen]
        for lams in weights:
            out.append(sum(l * v for l, v in zip(lams, column)) % q)
    return out[:length]
