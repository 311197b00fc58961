"""モジュラスと体の元

Z_q, Z_p の元を正準代表元 [0, modulus) で保持する値型を定義する。
ホットパス（行列積・シェア計算）では Fe を作らず int のリストと
Modulus を組で扱い、この型は API 境界と小さな計算で使う。

注意: 定数時間実装ではない（研究用コード）。
"""

from dataclasses import dataclass

from sympy import isprime

from src.errors import MathError, ParameterError


@dataclass(frozen=True, slots=True)
class Modulus:
    """整数モジュラス

    Attributes:
        value: モジュラスの値（3以上）
        is_prime: 素数であるか。Trueを宣言した場合は構築時に検査する
    """

    value: int
    is_prime: bool = False

    def __post_init__(self):
        if self.value < 3:
            raise ParameterError(f"modulus must be >= 3, got {self.value}")
        if self.is_prime and not isprime(self.value):
            raise ParameterError(f"{self.value} is declared prime but is composite")

    @classmethod
    def of(cls, value: int) -> "Modulus":
        """素数判定を行ってModulusを作る"""
        return cls(value, is_prime=bool(isprime(value)))

    def require_prime(self) -> None:
        """Shamir体として使う前の検査"""
        if not self.is_prime:
            raise ParameterError(f"modulus {self.value} must be prime here")

    def reduce(self, x: int) -> int:
        return x % self.value

    def element(self, x: int) -> "Fe":
        """任意の整数を還元して体の元にする"""
        return Fe(x % self.value, self)

    @property
    def bits(self) -> int:
        return self.value.bit_length()


@dataclass(frozen=True, slots=True)
class Fe:
    """Z_modulus の元（常に正準代表元）"""

    residue: int
    modulus: Modulus

    def __post_init__(self):
        if not 0 <= self.residue < self.modulus.value:
            raise ParameterError(
                f"residue {self.residue} is not canonical mod {self.modulus.value}"
            )

    def __int__(self) -> int:
        return self.residue

    def __add__(self, other: "Fe") -> "Fe":
        return fe_add(self, other)

    def __sub__(self, other: "Fe") -> "Fe":
        return fe_sub(self, other)

    def __mul__(self, other: "Fe") -> "Fe":
        return fe_mul(self, other)

    def __neg__(self) -> "Fe":
        return Fe((-self.residue) % self.modulus.value, self.modulus)

    def inverse(self) -> "Fe":
        return fe_inv(self)


def _same_modulus(a: Fe, b: Fe) -> Modulus:
    if a.modulus.value != b.modulus.value:
        raise ParameterError(
            f"modulus mismatch: {a.modulus.value} vs {b.modulus.value}"
        )
    return a.modulus


def fe_add(a: Fe, b: Fe) -> Fe:
    mod = _same_modulus(a, b)
    return Fe((a.residue + b.residue) % mod.value, mod)


def fe_sub(a: Fe, b: Fe) -> Fe:
    mod = _same_modulus(a, b)
    return Fe((a.residue - b.residue) % mod.value, mod)


def fe_mul(a: Fe, b: Fe) -> Fe:
    mod = _same_modulus(a, b)
    return Fe((a.residue * b.residue) % mod.value, mod)


def fe_inv(a: Fe) -> Fe:
    """逆元を返す。gcd(a, modulus) != 1 なら MathError"""
    return Fe(inv_mod(a.residue, a.modulus.value), a.modulus)


def inv_mod(a: int, modulus: int) -> int:
    """int版の逆元（ホットパス用）"""
    try:
        return pow(a, -1, modulus)
    except ValueError as exc:
        raise MathError(f"{a} is not invertible mod {modulus}") from exc
