"""正しい分散の証明（コミットメント + SCRAPE + Fiat–Shamir）

クライアントは秘密とシェア s_0..s_P をそれぞれ C_j = g^{s_j} でコミットし、
ランダムな t をマスクに使って ⟨w, s⟩ = 0 であることを示す:

    r = ⟨t, w⟩,  c = H'(C, C_t, w, r),  z_j = t_j + c·s_j

検証側は ⟨w, z⟩ = r を確かめ、C_t^(j) = g^{z_j}·C_j^{−c} を再計算して
同じチャレンジが得られるかを見る。委員会メンバーは受け取ったシェアが
サーバー経由で届いたコミットメントと一致するかを検査する。
"""

import random
from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce

from src.errors import DecodeError, ParameterError
from src.sharing.shares import Share, ShareParams
from src.shprg.xof import TAG_CHALLENGE, field_bytes, sample_mod
from src.verify.group import GroupBackend, SchnorrGroup
from src.verify.scrape import ScrapeWeights, inner_product, scrape_weights


@dataclass(frozen=True)
class SharingProof:
    """分散の正しさの証明

    Attributes:
        commitments: 各評価点の値へのコミットメント g^{s_j}
        inner_resp: r = ⟨t, w⟩
        z: 応答 z_j = t_j + c·s_j
        challenge: チャレンジ c
    """

    commitments: tuple[int, ...]
    inner_resp: int
    z: tuple[int, ...]
    challenge: int


def _field_order(sp: ShareParams, group: GroupBackend) -> int:
    if sp.field is None or sp.field.value != group.order:
        raise ParameterError("group order must equal the sharing field modulus")
    return group.order


def commitment_transcript(commitments: Sequence[int], group: GroupBackend) -> bytes:
    return b"".join(group.encode(c) for c in commitments)


def _challenge(
    commitments: Sequence[int],
    nonce_commitments: Sequence[int],
    weights: ScrapeWeights,
    inner_resp: int,
    group: GroupBackend,
) -> int:
    q = group.order
    parts = [group.encode(c) for c in commitments]
    parts += [group.encode(c) for c in nonce_commitments]
    parts += [field_bytes(w, q) for w in weights.w]
    parts.append(field_bytes(inner_resp, q))
    return sample_mod(TAG_CHALLENGE, parts, q, 1)[0]


def prove_sharing(
    values: Sequence[int],
    sp: ShareParams,
    group: GroupBackend,
    rng: random.Random,
    points: Sequence[int] | None = None,
) -> SharingProof:
    """秘密とシェアの列 values が次数 r−1 の多項式上にあることの証明を作る

    Args:
        values: 評価点の順に並べた値（通常は秘密、シェア1..m の順）
        sp: 分散パラメータ
        group: コミットメントの群（位数 = sp.field）
        rng: マスク t の乱数源
        points: 評価点（省略時は scrape.default_points）
    """
    q = _field_order(sp, group)
    commitments = tuple(group.commit(v) for v in values)
    weights = scrape_weights(sp, commitment_transcript(commitments, group), points)
    if len(weights.w) != len(values):
        raise ParameterError(f"expected {len(weights.w)} values, got {len(values)}")
    t = [rng.randrange(q) for _ in values]
    nonce_commitments = [group.commit(ti) for ti in t]
    inner_resp = inner_product(t, weights.w, q)
    c = _challenge(commitments, nonce_commitments, weights, inner_resp, group)
    z = tuple((ti + c * v) % q for ti, v in zip(t, values))
    return SharingProof(commitments=commitments, inner_resp=inner_resp, z=z, challenge=c)


def verify_sharing(
    proof: SharingProof,
    sp: ShareParams,
    group: GroupBackend,
    points: Sequence[int] | None = None,
) -> bool:
    """証明を検証する。形式の不正も含めて失敗は False"""
    q = _field_order(sp, group)
    try:
        weights = scrape_weights(sp, commitment_transcript(proof.commitments, group), points)
    except ParameterError:
        return False
    if not len(proof.z) == len(proof.commitments) == len(weights.w):
        return False
    if inner_product(weights.w, proof.z, q) != proof.inner_resp % q:
        return False
    c = proof.challenge
    nonce_commitments = [
        group.mul(group.commit(z), group.exp(commitment, -c))
        for z, commitment in zip(proof.z, proof.commitments)
    ]
    return _challenge(proof.commitments, nonce_commitments, weights, proof.inner_resp, group) == c


def committee_share_check(share: Share, commitment: int, group: GroupBackend) -> bool:
    """g^{share} がサーバーから転送されたコミットメントと一致するか"""
    return group.commit(share.value) == commitment


def aggregate_commitment_check(
    commitments: Sequence[int],
    reconstructed_sum: int,
    group: GroupBackend,
) -> bool:
    """∏ C_i = g^{Σ s_i}（空集合なら単位元 = g^0）"""
    product = reduce(group.mul, commitments, group.identity)
    return product == group.commit(reconstructed_sum)


# === シリアライズ ===

def serialize_proof(proof: SharingProof, group: SchnorrGroup) -> bytes:
    """個数(4B LE) + コミットメント（固定幅） + r + z（各16B以上 LE） + c"""
    q = group.order
    out = [len(proof.commitments).to_bytes(4, "little")]
    out += [group.encode(c) for c in proof.commitments]
    out.append(field_bytes(proof.inner_resp, q))
    out += [field_bytes(z, q) for z in proof.z]
    out.append(field_bytes(proof.challenge, q))
    return b"".join(out)


def deserialize_proof(data: bytes, group: SchnorrGroup) -> SharingProof:
    """serialize_proof の逆変換。不正な形式は DecodeError"""
    q = group.order
    width = len(field_bytes(0, q))
    if len(data) < 4:
        raise DecodeError("truncated proof header")
    count = int.from_bytes(data[:4], "little")
    expected = 4 + count * group.width + (count + 2) * width
    if len(data) != expected:
        raise DecodeError(f"proof must be {expected} bytes, got {len(data)}")
    offset = 4
    commitments = []
    for _ in range(count):
        commitments.append(group.decode(data[offset : offset + group.width]))
        offset += group.width
    scalars = []
    for _ in range(count + 2):
        value = int.from_bytes(data[offset : offset + width], "little")
        if value >= q:
            raise DecodeError("scalar is not canonical")
        scalars.append(value)
        offset += width
    return SharingProof(
        commitments=tuple(commitments),
        inner_resp=scalars[0],
        z=tuple(scalars[1:-1]),
        challenge=scalars[-1],
    )
