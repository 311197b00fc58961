"""シェアの型と共通操作

体上・整数上のShamir秘密分散で共通に使う型、シェアの加算、
正準シリアライズ（index 2バイトLE + 値）を定義する。
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from math import ceil, factorial

from src.errors import DecodeError, ParameterError
from src.ringmath.modulus import Modulus


@dataclass(frozen=True)
class ShareParams:
    """秘密分散のパラメータ

    Attributes:
        m: パーティ数
        r: 再構成閾値（多項式の次数は r-1）
        t: 汚染閾値。パック版では t = r - rho
        rho: パッキング係数（1なら通常のShamir）
        field: 体のモジュラス（整数版では None）
        kappa_s, ell_s, ell_r: 整数版のビット長パラメータ
    """

    m: int
    r: int
    t: int
    rho: int = 1
    field: Modulus | None = None
    kappa_s: int = 40
    ell_s: int = 64
    ell_r: int = 256

    def __post_init__(self):
        if not 0 <= self.t < self.r <= self.m:
            raise ParameterError(f"need t < r <= m, got t={self.t} r={self.r} m={self.m}")
        if self.rho < 1 or self.t != self.r - self.rho:
            raise ParameterError(f"packed sharing needs t = r - rho, got t={self.t}")
        if self.m < ceil(3 * self.rho / 2):
            raise ParameterError(f"m={self.m} is below 3/2 * rho={self.rho}")
        if self.field is not None:
            self.field.require_prime()
            if self.m + self.rho >= self.field.value:
                raise ParameterError("field too small for the evaluation points")

    @classmethod
    def packed(cls, m: int, r: int, rho: int, field: Modulus | None = None, **kwargs) -> "ShareParams":
        return cls(m=m, r=r, t=r - rho, rho=rho, field=field, **kwargs)

    @property
    def delta_fact(self) -> int:
        """整数版のオフセット Δ = m!"""
        return factorial(self.m)

    @property
    def positions(self) -> tuple[int, ...]:
        """パックされた秘密の位置 pos_i = m + i"""
        return tuple(self.m + i for i in range(1, self.rho + 1))


@dataclass(frozen=True, slots=True)
class Share:
    """1パーティ分のシェア（index は 1 始まり）"""

    index: int
    value: int


@dataclass(frozen=True)
class ShareBundle:
    """1メンバーが受け取るチャンクごとのシェア列"""

    index: int
    values: tuple[int, ...]


@dataclass(frozen=True)
class PackedSecret:
    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values:
            raise ParameterError("packed secret cannot be empty")


def add_shares(a: Share, b: Share, modulus: int | None = None) -> Share:
    """同じ index のシェアの和（modulus=None なら整数和）"""
    if a.index != b.index:
        raise ParameterError(f"share index mismatch: {a.index} vs {b.index}")
    value = a.value + b.value
    return Share(a.index, value % modulus if modulus is not None else value)


def add_bundles(bundles: Iterable[ShareBundle], modulus: int) -> ShareBundle:
    """同じメンバー宛てのバンドルをチャンクごとに加算する"""
    bundles = list(bundles)
    if not bundles:
        raise ParameterError("nothing to add")
    index = bundles[0].index
    if any(b.index != index for b in bundles):
        raise ParameterError("bundle index mismatch")
    values = tuple(sum(col) % modulus for col in zip(*(b.values for b in bundles)))
    return ShareBundle(index, values)


def check_indices(shares: Sequence[Share]) -> None:
    indices = [s.index for s in shares]
    if len(set(indices)) != len(indices):
        raise ParameterError(f"duplicate share index in {indices}")


# === シリアライズ ===

def field_width(field: Modulus) -> int:
    return max(16, (field.value.bit_length() + 7) // 8)


def serialize_share(share: Share, field: Modulus | None = None) -> bytes:
    """体版: index(2B LE) + 値(固定幅 LE)、整数版: index + 符号(1B) + 長さ(4B) + 絶対値"""
    head = share.index.to_bytes(2, "little")
    if field is not None:
        return head + share.value.to_bytes(field_width(field), "little")
    magnitude = abs(share.value)
    body = magnitude.to_bytes(max(1, (magnitude.bit_length() + 7) // 8), "little")
    sign = b"\x01" if share.value < 0 else b"\x00"
    return head + sign + len(body).to_bytes(4, "little") + body


def deserialize_share(data: bytes, field: Modulus | None = None, offset: int = 0) -> tuple[Share, int]:
    """serialize_share の逆変換。(Share, 次のオフセット) を返す"""
    try:
        index = int.from_bytes(data[offset : offset + 2], "little")
        offset += 2
        if field is not None:
            width = field_width(field)
            chunk = data[offset : offset + width]
            if len(chunk) != width:
                raise DecodeError("truncated field share")
            value = int.from_bytes(chunk, "little")
            if value >= field.value:
                raise DecodeError("share value is not canonical")
            return Share(index, value), offset + width
        sign = data[offset]
        length = int.from_bytes(data[offset + 1 : offset + 5], "little")
        offset += 5
        body = data[offset : offset + length]
        if len(body) != length:
            raise DecodeError("truncated integer share")
        value = int.from_bytes(body, "little")
        return Share(index, -value if sign else value), offset + length
    except IndexError as exc:
        raise DecodeError("truncated share") from exc
