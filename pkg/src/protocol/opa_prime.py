"""OPA′: 分散PRFによるマスク

座標 z ごとに鍵 k_{i,z} を持ち、鍵のシェアはセットアップ時に1回だけ委員会へ配る。
各反復で:
    クライアント: ct_z = Encode(x_z) + Eval(k_{i,z}, ℓ) mod v
                  メンバー j へ a^(j)_z = ⌊⟨H(ℓ), k^(j)_{i,z}⟩⌋_p を送る
    メンバー j:   Y_j = ⌊Δ·Σ_{i∈C} a^(j)_i mod p⌋_u
    サーバー:     Z = ⌊Σ Λ_j·Y_j mod u⌋_v,  X = Σct − Z mod v,  Decode(X)

Z − ΣEval の誤差 e は (−B−1, |C|·α + B) に収まる（α = 1 + Δv/u + Δ²v/p、
B = Σ|Λ_j|·(Δnv/p + v/u)）。クライアント1人あたりのオフセット c を α + B + 1 以上、
重み W を n·c + ⌊B⌋ + 1 に取ると、|C| によらず X = W·Σx + (1..W) となり
Decode(X) = ⌈X/W⌉ − 1 が厳密になる。
"""

from __future__ import annotations

import logging
import math
import random
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from src.dkhprf.dprf import (
    DprfKey,
    DprfParams,
    combine,
    eval_prf,
    first_level,
    gen_key,
    hash_point,
    lambda_mass,
    lift_to_u,
    share_key,
)
from src.errors import RangeError
from src.protocol.messages import AuxPayload, ClientMessage, CommitteeMessage, IterationId
from src.protocol.pke import PkeBackend, associated_data

if TYPE_CHECKING:
    from src.protocol.params import ProtocolParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PrimeCodec:
    """OPA′ の符号化

    Attributes:
        weight: W
        offset: クライアントごとのオフセット c
        error_low, error_high: 誤差 e の整数範囲の端
        max_aggregate: 復号が厳密になる Σx の最大値
    """

    weight: int
    offset: int
    error_low: int
    error_high: int
    max_aggregate: int

    def encode(self, x: int) -> int:
        return self.weight * x + self.offset

    def decode(self, X: int) -> int:
        return -(-X // self.weight) - 1


def prime_codec(dp: DprfParams, n: int) -> PrimeCodec:
    """丸め誤差の範囲から W と c を決める"""
    delta = dp.delta_fact
    mass = lambda_mass(dp)
    b = mass * (Fraction(delta * n * dp.v, dp.p) + Fraction(dp.v, dp.u))
    alpha = 1 + Fraction(delta * dp.v, dp.u) + Fraction(delta * delta * dp.v, dp.p)
    offset = math.ceil(alpha + b + 1)
    error_low = -math.floor(b) - 1
    error_high = math.ceil(n * alpha + b)
    weight = n * offset - error_low
    return PrimeCodec(
        weight=weight,
        offset=offset,
        error_low=error_low,
        error_high=error_high,
        max_aggregate=(dp.v - 1) // weight - 1,
    )


def dprf_rounding_floor(dp: DprfParams, n: int) -> int:
    """⌊p/u⌋ が超えなければならない値 max(rΔ + rΔ², nΔ)"""
    delta = dp.delta_fact
    return max(dp.r * delta + dp.r * delta * delta, n * delta)


# === セットアップ ===

@dataclass(frozen=True)
class PrimeClientKeys:
    """クライアント1人分の鍵

    Attributes:
        keys: 座標ごとの鍵
        shares: shares[z][j-1] が座標 z の鍵のメンバー j 宛てシェア
    """

    keys: tuple[DprfKey, ...]
    shares: tuple[tuple[DprfKey, ...], ...]


def prime_setup(dp: DprfParams, vec_len: int, rng: random.Random) -> PrimeClientKeys:
    keys = tuple(gen_key(dp, rng) for _ in range(vec_len))
    shares = tuple(tuple(share_key(k, dp, rng)) for k in keys)
    return PrimeClientKeys(keys=keys, shares=shares)


# === ロール ===

def prime_client_encrypt(
    client: int,
    x: Sequence[int],
    params: ProtocolParams,
    iteration: IterationId,
    keys: PrimeClientKeys,
    public_keys: Sequence[bytes],
    rng: random.Random,
    cipher: PkeBackend,
    enforce_budget: bool = True,
) -> ClientMessage:
    """入力を Eval でマスクし、メンバーごとの部分評価を暗号化する

    enforce_budget=False は入力の範囲検査を省く。予算を超えた和は v を法として
    折り返し、サーバーは誤った集約値を得る（故障の再現用）。
    """
    dp = params.dprf_params()
    codec = prime_codec(dp, params.n)
    if len(x) != params.vec_len or len(keys.keys) != params.vec_len:
        raise RangeError(f"expected {params.vec_len} coordinates")
    per_client = codec.max_aggregate // params.n
    for value in x:
        if value < 0 or (enforce_budget and value > per_client):
            raise RangeError(f"input {value} outside [0, {per_client}]")
    point = iteration.label_bytes
    h = hash_point(point, dp)
    ct = tuple(
        (codec.encode(value) + eval_prf(key, point, dp, h)) % dp.v
        for value, key in zip(x, keys.keys)
    )
    ad = associated_data(iteration.label, client)
    ciphertexts = []
    for j, public in enumerate(public_keys, start=1):
        partials = tuple(first_level(coord[j - 1], point, dp, h) for coord in keys.shares)
        payload = AuxPayload(label=iteration.label, client=client, values=partials)
        ciphertexts.append(cipher.seal(public, ad, payload.serialize(dp.q), rng))
    return ClientMessage(client=client, label=iteration.label, ct=ct, aux_ciphertexts=tuple(ciphertexts))


def prime_member_partial(summed: Sequence[int], dp: DprfParams) -> tuple[int, ...]:
    """Σa mod p を Δ 倍して u に丸める"""
    return tuple(lift_to_u(value % dp.p, dp) for value in summed)


def prime_unmask(
    replies: Sequence[CommitteeMessage],
    ct_sum: Sequence[int],
    params: ProtocolParams,
) -> list[int]:
    """委員会の返信を Combine してマスクを外し、復号する"""
    dp = params.dprf_params()
    codec = prime_codec(dp, params.n)
    out = []
    for z, total in enumerate(ct_sum):
        mask = combine([(reply.member, reply.aux[z]) for reply in replies], dp)
        out.append(codec.decode((total - mask) % dp.v))
    return out
