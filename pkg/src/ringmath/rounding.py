"""モジュラス間の丸め写像

⌊x⌋_p := ⌊x·p/q⌋ を多倍長整数で厳密に計算する。浮動小数点は使わない。
"""

from collections.abc import Sequence

from src.errors import ParameterError
from src.ringmath.modulus import Fe, Modulus


def round_int(x: int, q: int, p: int) -> int:
    """int版の丸め。x は [0, q) の正準代表元であること"""
    return (x * p) // q


def round_down(x: Fe, p: Modulus) -> Fe:
    """Z_q の元を Z_p に丸める

    Args:
        x: q を法とする正準な元
        p: 丸め先モジュラス（p < q）

    Returns:
        ⌊x·p/q⌋ を [0, p) に置いた元
    """
    q = x.modulus.value
    if p.value >= q:
        raise ParameterError(f"rounding target {p.value} must be smaller than {q}")
    return Fe(round_int(x.residue, q, p.value) % p.value, p)


def round_vector(values: Sequence[int], q: int, p: int) -> list[int]:
    """ベクトルの各成分を丸める（q を法として還元してから）"""
    return [((v % q) * p) // q for v in values]
