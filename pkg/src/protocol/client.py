"""クライアントのロール

1反復で1回だけメッセージを送る:
    ct = Encode(x) + PRG(sd) (+ mask'(dig))
    aux_j = Enc(pk_j, シード sd のパック分散のシェア (+ dig のシェア))
能動的安全性モードではチャンクごとに分散の正しさの証明を付ける。
"""

import logging
import random
from collections.abc import Sequence

from src.errors import ParameterError, RangeError
from src.protocol.messages import AuxPayload, ClientMessage, IterationId
from src.protocol.params import Mode, ProtocolParams
from src.protocol.pke import PkeBackend, associated_data
from src.sharing.field import share_field, share_packed_vector
from src.sharing.shares import ShareBundle
from src.shprg.codec import encode_vector
from src.shprg.matrix import PublicMatrix, derive_matrix, second_mask, tweak_matrix_seed
from src.shprg.prg import expand_lwe, expand_lwr, sample_lwe_seed, sample_seed
from src.verify.group import GroupBackend
from src.verify.proof import SharingProof, prove_sharing
from src.verify.scrape import packed_points

logger = logging.getLogger(__name__)


def iteration_matrix(params: ProtocolParams, iteration: IterationId) -> PublicMatrix:
    """反復で使う公開行列 A（hash_twist 有効時はモデルのハッシュで調整したシードから）"""
    prg = params.prg_params()
    if params.hash_twist:
        seed = tweak_matrix_seed(prg.matrix_seed, iteration.label, iteration.model_digest)
        return derive_matrix(prg, seed)
    return derive_matrix(prg)


def _prove_chunks(
    seed: Sequence[int],
    bundles: Sequence[ShareBundle],
    params: ProtocolParams,
    group: GroupBackend,
    rng: random.Random,
) -> tuple[SharingProof, ...]:
    sp = params.share_params()
    points = packed_points(sp)
    proofs = []
    for c in range(params.chunks):
        secrets = list(seed[c * sp.rho : (c + 1) * sp.rho])
        secrets += [0] * (sp.rho - len(secrets))
        values = secrets + [b.values[c] for b in bundles]
        proofs.append(prove_sharing(values, sp, group, rng, points))
    return tuple(proofs)


def client_encrypt(
    client: int,
    x: Sequence[int],
    params: ProtocolParams,
    iteration: IterationId,
    public_keys: Sequence[bytes],
    rng: random.Random,
    cipher: PkeBackend,
    group: GroupBackend | None = None,
    corrupt_share_for: int | None = None,
) -> ClientMessage:
    """入力 x をマスクし、シードのシェアを委員会宛てに暗号化する

    Args:
        client: クライアント番号 i
        x: 長さ L の非負整数ベクトル
        params: 公開パラメータ（mode は lwr か lwe）
        iteration: 反復の識別子
        public_keys: 自分の委員会グループのメンバー 1..m の公開鍵
        rng: シード・符号化ノイズ・暗号化の乱数源（シード付きならシミュレーション専用）
        cipher: 補助情報の暗号化方式
        group: 能動的安全性モードで証明に使う群
        corrupt_share_for: 指定したメンバーへのシェアを証明の後で改ざんする（攻撃シナリオ用）

    Returns:
        ClientMessage: マスク済み入力と m 個の暗号文
    """
    if params.mode is Mode.PRIME_LWR:
        raise ParameterError("prime_lwr clients use prime_client_encrypt")
    if len(x) != params.vec_len:
        raise RangeError(f"expected {params.vec_len} coordinates, got {len(x)}")
    if len(public_keys) != params.m:
        raise ParameterError(f"expected {params.m} public keys, got {len(public_keys)}")
    if params.active and group is None:
        raise ParameterError("active security needs a commitment group")

    prg = params.prg_params()
    ep = params.encode_params()
    A = iteration_matrix(params, iteration)
    encoded = encode_vector(x, ep, rng)
    if params.mode is Mode.LWE:
        sd = sample_lwe_seed(prg, rng)
        mask = expand_lwe(prg, A, sd)
    else:
        sd = sample_seed(prg, rng)
        mask = expand_lwr(prg, A, sd)
    out_mod = params.ct_modulus
    ct = [(a + b) % out_mod for a, b in zip(encoded, mask)]

    dig_shares = None
    if params.active:
        q = params.field_modulus
        dig = rng.randrange(q)
        ct = [(a + b) % out_mod for a, b in zip(ct, second_mask(dig, params.vec_len, out_mod, q))]
        dig_shares = share_field(dig, params.digest_share_params(), rng)

    bundles = share_packed_vector(sd.s, params.share_params(), rng)
    proofs: tuple[SharingProof, ...] = ()
    if params.active:
        proofs = _prove_chunks(sd.s, bundles, params, group, rng)
    if corrupt_share_for is not None:
        j = corrupt_share_for
        values = list(bundles[j - 1].values)
        values[0] = (values[0] + 1) % params.field_modulus
        bundles[j - 1] = ShareBundle(j, tuple(values))
        logger.debug("client %d tampered with the share for member %d", client, j)

    ad = associated_data(iteration.label, client)
    ciphertexts = []
    for j, public in enumerate(public_keys, start=1):
        payload = AuxPayload(
            label=iteration.label,
            client=client,
            values=bundles[j - 1].values,
            dig_share=dig_shares[j - 1].value if dig_shares is not None else None,
        )
        ciphertexts.append(cipher.seal(public, ad, payload.serialize(params.field_modulus), rng))
    return ClientMessage(
        client=client,
        label=iteration.label,
        ct=tuple(ct),
        aux_ciphertexts=tuple(ciphertexts),
        proofs=proofs,
    )
