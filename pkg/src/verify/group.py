"""素数位数の群（コミットメント用）

シェアのコミットメント g^{s} を計算する群。位数は Shamir の体のモジュラス q と
一致しなければならない。既定のバックエンドは Z_P* の位数 q の部分群
（Schnorr群、P = k·q + 1）。楕円曲線など別の実装に差し替えられるように
GroupBackend プロトコルで操作を抽象化している。

注意: 定数時間実装ではない。
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

from sympy import isprime

from src.errors import DecodeError, ParameterError

logger = logging.getLogger(__name__)


class GroupBackend(Protocol):
    """コミットメントに使う群の操作"""

    @property
    def order(self) -> int: ...

    @property
    def identity(self) -> int: ...

    def commit(self, exponent: int) -> int: ...

    def exp(self, base: int, exponent: int) -> int: ...

    def mul(self, a: int, b: int) -> int: ...

    def inv(self, a: int) -> int: ...

    def encode(self, element: int) -> bytes: ...

    def decode(self, data: bytes) -> int: ...


@dataclass(frozen=True)
class SchnorrGroup:
    """Z_P* の位数 q の部分群

    Attributes:
        modulus: 素数 P（P = k·q + 1）
        order: 部分群の位数 q（素数）
        generator: 部分群の生成元 g
    """

    modulus: int
    order: int
    generator: int

    def __post_init__(self):
        if (self.modulus - 1) % self.order != 0:
            raise ParameterError("order must divide P - 1")
        if self.generator in (0, 1) or pow(self.generator, self.order, self.modulus) != 1:
            raise ParameterError("generator does not have order q")

    @property
    def identity(self) -> int:
        return 1

    @property
    def width(self) -> int:
        """群要素の固定幅エンコードのバイト数"""
        return (self.modulus.bit_length() + 7) // 8

    def commit(self, exponent: int) -> int:
        """g^exponent"""
        return pow(self.generator, exponent % self.order, self.modulus)

    def exp(self, base: int, exponent: int) -> int:
        return pow(base, exponent % self.order, self.modulus)

    def mul(self, a: int, b: int) -> int:
        return a * b % self.modulus

    def inv(self, a: int) -> int:
        return pow(a, -1, self.modulus)

    def is_element(self, x: int) -> bool:
        return 0 < x < self.modulus and pow(x, self.order, self.modulus) == 1

    def encode(self, element: int) -> bytes:
        return element.to_bytes(self.width, "little")

    def decode(self, data: bytes) -> int:
        """固定幅エンコードを読み、部分群の元であることを検査する"""
        if len(data) != self.width:
            raise DecodeError(f"group element must be {self.width} bytes")
        value = int.from_bytes(data, "little")
        if not self.is_element(value):
            raise DecodeError("not an element of the order-q subgroup")
        return value


@lru_cache(maxsize=16)
def schnorr_group(order: int, bits: int = 256) -> SchnorrGroup:
    """位数 order の部分群を持つ bits ビット程度の素数 P を決定的に探す

    k = 2^(bits - |order|) から偶数 k を順に試し、P = k·order + 1 が素数になった
    最初の P を採用する。生成元は h = 2, 3, ... について h^k ≠ 1 となる最初の h^k。

    Args:
        order: 部分群の位数（Shamir の体のモジュラスと同じ素数）
        bits: P の目標ビット長。order のビット長より大きいこと
    """
    if not isprime(order):
        raise ParameterError(f"group order {order} must be prime")
    qbits = order.bit_length()
    if bits <= qbits:
        raise ParameterError(f"bits={bits} must exceed the order's {qbits} bits")
    k = 1 << (bits - qbits)
    while not isprime(k * order + 1):
        k += 2
    modulus = k * order + 1
    for h in range(2, modulus):
        g = pow(h, k, modulus)
        if g != 1:
            break
    logger.debug("schnorr group: %d-bit P, cofactor bits %d", modulus.bit_length(), k.bit_length())
    return SchnorrGroup(modulus=modulus, order=order, generator=g)
