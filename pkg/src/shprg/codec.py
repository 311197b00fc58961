"""入力のエンコード／デコード

PRGの準同型誤差を吸収するための符号化。

LWR: Encode(x) = Δ·x + r + 1,  Δ = 2^κ_s·n,  r ← [0, 2^κ_s)
     集約後の残差 Σr + n − e′ は [1, Δ] に収まるので Decode(X) = ⌈X/Δ⌉ − 1 が厳密。
     正しさの条件は Σx < (p − Δ)/Δ。
LWE: Encode(x) = Δ·x,  Δ = ⌊q/p⌋
     誤差は [1, 2η+1] に平行移動済みで、n·(2η+1) < Δ/2 なら Decode が厳密。
"""

import random
from collections.abc import Sequence
from dataclasses import dataclass

from src.errors import ParameterError, RangeError
from src.ringmath.modulus import Fe, Modulus


@dataclass(frozen=True)
class EncodeParams:
    """符号化パラメータ

    Attributes:
        kappa_s: 統計的安全パラメータ（LWEでは未使用）
        n: 想定する加算数（クライアント数）
        delta: オフセット Δ
        modulus: 暗号文の空間（LWR: p, LWE: q）
        mode: "lwr" または "lwe"
    """

    kappa_s: int
    n: int
    delta: int
    modulus: Modulus
    mode: str = "lwr"

    @classmethod
    def for_lwr(cls, kappa_s: int, n: int, p: Modulus) -> "EncodeParams":
        if n <= 0 or kappa_s < 0:
            raise ParameterError("n must be positive and kappa_s non-negative")
        return cls(kappa_s=kappa_s, n=n, delta=(1 << kappa_s) * n, modulus=p, mode="lwr")

    @classmethod
    def for_lwe(cls, n: int, q: Modulus, p: Modulus) -> "EncodeParams":
        if p.value >= q.value:
            raise ParameterError("p must be smaller than q")
        return cls(kappa_s=0, n=n, delta=q.value // p.value, modulus=q, mode="lwe")

    def max_aggregate(self) -> int:
        """復号が厳密になる Σx の最大値"""
        if self.mode == "lwr":
            # Δ·Σx < p − Δ
            return (self.modulus.value - self.delta - 1) // self.delta
        # Δ·Σx + Δ/2 ≤ q − 1
        return (self.modulus.value - 1 - self.delta // 2) // self.delta

    def max_summand(self) -> int:
        """1クライアントあたりの入力の最大値"""
        total = self.max_aggregate()
        return total // self.n if total >= 0 else -1

    def input_bits(self) -> int:
        """メッセージ空間 [0, 2^ℓ) が予算に収まる最大の ℓ"""
        top = self.max_summand() + 1
        return max(0, top.bit_length() - 1)


def encode_lwr(x: int, ep: EncodeParams, rng: random.Random, noise: int | None = None) -> Fe:
    """Δ·x + r + 1 mod p

    Args:
        x: 入力値
        ep: 符号化パラメータ
        rng: r のサンプリングに使う乱数源
        noise: r を固定する場合に指定（テスト・再現用）
    """
    if not 0 <= x <= ep.max_summand():
        raise RangeError(f"input {x} exceeds the per-summand budget")
    r = rng.randrange(1 << ep.kappa_s) if noise is None else noise
    if not 0 <= r < (1 << ep.kappa_s):
        raise RangeError(f"noise {r} outside [0, 2^{ep.kappa_s})")
    return ep.modulus.element(ep.delta * x + r + 1)


def decode_lwr(X: int, ep: EncodeParams) -> int:
    """⌈X/Δ⌉ − 1（X は [0, p) に持ち上げた集約値）"""
    return -(-X // ep.delta) - 1


def encode_lwe(x: int, ep: EncodeParams) -> Fe:
    """Δ·x mod q"""
    if x < 0:
        raise RangeError(f"input {x} must be non-negative")
    return ep.modulus.element(ep.delta * x)


def decode_lwe(X: int, ep: EncodeParams) -> int:
    """⌈X/Δ⌉ − 1。誤差ゼロの 0 は −1 になるので 0 に切り上げる"""
    return max(0, -(-X // ep.delta) - 1)


def encode_vector(xs: Sequence[int], ep: EncodeParams, rng: random.Random) -> list[int]:
    """ベクトル版のエンコード（ホットパス用に int のリストを返す）"""
    top = ep.max_summand()
    for x in xs:
        if not 0 <= x <= top:
            raise RangeError(f"input {x} outside [0, {top}]")
    mod = ep.modulus.value
    if ep.mode == "lwr":
        top = 1 << ep.kappa_s
        return [(ep.delta * x + rng.randrange(top) + 1) % mod for x in xs]
    return [(ep.delta * x) % mod for x in xs]


def decode_vector(values: Sequence[int], ep: EncodeParams) -> list[int]:
    if ep.mode == "lwr":
        return [decode_lwr(v, ep) for v in values]
    return [decode_lwe(v, ep) for v in values]
