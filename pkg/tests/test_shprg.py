"""シード準同型PRGと符号化のテスト"""

import random

import numpy as np
import pytest

from src.errors import ParameterError, RangeError
from src.ringmath.modulus import Modulus
from src.shprg.codec import (
    EncodeParams,
    decode_lwe,
    decode_lwr,
    decode_vector,
    encode_lwe,
    encode_lwr,
    encode_vector,
)
from src.shprg.matrix import PrgParams, PublicMatrix, derive_matrix, model_digest, second_mask, tweak_matrix_seed
from src.shprg.prg import PrgSeed, add_seeds, expand_lwe, expand_lwr, sample_lwe_seed, sample_seed
from src.shprg.xof import TAG_MATRIX, sample_mod, xof_bytes

SEED = bytes(32)


def _params(q: int, p: int, lambda_: int = 2, big_l: int = 2, eta: int = 1) -> PrgParams:
    return PrgParams(lambda_=lambda_, big_l=big_l, q=Modulus(q), p=Modulus(p), matrix_seed=SEED, eta=eta)


class TestXof:
    """XOF による決定的サンプリング"""

    def test_deterministic(self):
        """同じタグと入力からは同じ値が得られること"""
        assert sample_mod(TAG_MATRIX, [b"a"], 97, 10) == sample_mod(TAG_MATRIX, [b"a"], 97, 10)

    def test_values_below_modulus(self):
        """全ての値が [0, modulus) に入ること"""
        values = sample_mod(TAG_MATRIX, [b"x"], 1000, 500)
        assert len(values) == 500
        assert all(0 <= v < 1000 for v in values)

    def test_length_prefix_separates_parts(self):
        """部分の区切りが異なれば出力も異なること"""
        assert xof_bytes(b"T", [b"ab", b"c"], 16) != xof_bytes(b"T", [b"a", b"bc"], 16)


class TestExpand:
    """Expand の計算"""

    def test_lwr_small_matrix(self):
        """A=((1,2),(3,4)), s=(1,1), q=16, p=4 で (0, 1) になること"""
        A = PublicMatrix(rows=((1, 2), (3, 4)), modulus=16, seed=SEED)
        assert expand_lwr(_params(16, 4), A, PrgSeed(s=(1, 1))) == [0, 1]

    def test_lwe_identity_matrix(self):
        """単位行列、q=97, s=(5,6), e=(1,-1) で (6, 5) になること"""
        A = PublicMatrix(rows=((1, 0), (0, 1)), modulus=97, seed=SEED)
        assert expand_lwe(_params(97, 4), A, PrgSeed(s=(5, 6), e=(1, -1))) == [6, 5]

    def test_lwe_error_bound(self):
        """誤差が上界を超えると ParameterError になること"""
        A = PublicMatrix(rows=((1, 0), (0, 1)), modulus=97, seed=SEED)
        with pytest.raises(ParameterError):
            expand_lwe(_params(97, 4), A, PrgSeed(s=(5, 6), e=(10, 0)))

    def test_dimension_mismatch(self):
        """シードの次元が λ と違えば ParameterError になること"""
        params = _params(16, 4)
        with pytest.raises(ParameterError):
            expand_lwr(params, derive_matrix(params), PrgSeed(s=(1, 2, 3)))

    def test_lwr_almost_homomorphic(self):
        """k 個のシードの和の展開との差が各座標で {0, …, k-1} に収まること"""
        params = _params(1 << 10, 1 << 4, big_l=8)
        A = derive_matrix(params)
        rng = random.Random(1)
        for _ in range(200):
            k = rng.randint(2, 8)
            seeds = [sample_seed(params, rng) for _ in range(k)]
            parts = [expand_lwr(params, A, sd) for sd in seeds]
            joint = expand_lwr(params, A, add_seeds(params, *seeds))
            for z, value in enumerate(joint):
                assert (value - sum(part[z] for part in parts)) % 16 <= k - 1

    def test_lwr_pairwise_gap_exhaustive(self):
        """q=64, p=8, λ=2 の全てのシードの組で和の展開との差が各座標で {0, 1} に入ること"""
        q, p = 64, 8
        params = _params(q, p, big_l=4)
        A = derive_matrix(params)
        table = np.array(
            [expand_lwr(params, A, PrgSeed(s=(a, b))) for a in range(q) for b in range(q)],
            dtype=np.int64,
        )
        s0, s1 = np.divmod(np.arange(q * q), q)
        for index in range(q * q):
            a, b = divmod(index, q)
            joint = table[((a + s0) % q) * q + (b + s1) % q]
            gap = (joint - table[index] - table) % p
            assert np.isin(gap, (0, 1)).all(), f"seed=({a}, {b})"

    def test_lwe_exactly_homomorphic(self):
        """LWE では展開の和とシードの和の展開が一致すること"""
        params = _params(97, 4, lambda_=4, big_l=3)
        A = derive_matrix(params)
        rng = random.Random(2)
        a, b = sample_lwe_seed(params, rng), sample_lwe_seed(params, rng)
        joint = expand_lwe(params, A, add_seeds(params, a, b), error_bound=2 * params.error_bound)
        summed = [(x + y) % 97 for x, y in zip(expand_lwe(params, A, a), expand_lwe(params, A, b))]
        assert joint == summed

    def test_lwe_errors_are_shifted(self):
        """LWE の誤差が [1, 2η+1] に平行移動されていること"""
        params = _params(97, 4, big_l=50, eta=2)
        sd = sample_lwe_seed(params, random.Random(3))
        assert all(1 <= e <= 5 for e in sd.e)


class TestMatrix:
    """公開行列と第2マスク"""

    def test_derive_is_deterministic(self):
        """同じシードから同じ行列が導出されること"""
        params = _params(97, 4, lambda_=3, big_l=5)
        assert derive_matrix(params).rows == derive_matrix(params).rows
        assert derive_matrix(params).shape == (5, 3)

    def test_tweak_depends_on_label_and_model(self):
        """反復番号やモデルが変わると調整済みシードも変わること"""
        digest = model_digest(b"weights")
        base = tweak_matrix_seed(SEED, 1, digest)
        assert len(base) == 32
        assert base != tweak_matrix_seed(SEED, 2, digest)
        assert base != tweak_matrix_seed(SEED, 1, model_digest(b"other"))

    def test_second_mask(self):
        """第2マスクが決定的で Z_p に収まること"""
        mask = second_mask(12345, 16, 1 << 20, 2**127 - 1)
        assert mask == second_mask(12345, 16, 1 << 20, 2**127 - 1)
        assert len(mask) == 16
        assert all(0 <= v < 1 << 20 for v in mask)

    def test_invalid_params(self):
        """p >= q や短い matrix_seed は拒否されること"""
        with pytest.raises(ParameterError):
            _params(16, 16)
        with pytest.raises(ParameterError):
            PrgParams(lambda_=2, big_l=2, q=Modulus(97), p=Modulus(4), matrix_seed=b"short")


class TestCodec:
    """入力の符号化と復号"""

    def test_encode_lwr(self):
        """n=3, κ=4, p=2^10, x=2, r=5 で 102 になること"""
        ep = EncodeParams.for_lwr(4, 3, Modulus(1 << 10))
        assert ep.delta == 48
        assert encode_lwr(2, ep, random.Random(0), noise=5).residue == 102

    def test_decode_lwr_trace(self):
        """Σx=3, Σr=15, 誤差2 の集約値 160 が 3 に復号されること"""
        ep = EncodeParams.for_lwr(4, 3, Modulus(1 << 10))
        assert decode_lwr(160, ep) == 3

    def test_decode_lwe(self):
        """q=2^10, p=2^4 で 212 が 3 に復号されること"""
        ep = EncodeParams.for_lwe(3, Modulus(1 << 10), Modulus(1 << 4))
        assert ep.delta == 64
        assert decode_lwe(212, ep) == 3
        assert decode_lwe(0, ep) == 0
        assert encode_lwe(3, ep).residue == 192

    def test_lwr_budget(self):
        """1クライアントの予算を超える入力は RangeError になること"""
        ep = EncodeParams.for_lwr(4, 3, Modulus(1 << 10))
        assert ep.max_summand() == 6
        with pytest.raises(RangeError):
            encode_lwr(7, ep, random.Random(0))
        with pytest.raises(RangeError):
            encode_lwr(1, ep, random.Random(0), noise=16)

    def test_vector_sum_decodes(self):
        """符号化したベクトルの和が元の和に復号されること"""
        ep = EncodeParams.for_lwr(4, 3, Modulus(1 << 10))
        rng = random.Random(4)
        inputs = [[1, 6, 0], [2, 5, 6], [3, 0, 6]]
        encoded = [encode_vector(x, ep, rng) for x in inputs]
        total = [sum(col) % (1 << 10) for col in zip(*encoded)]
        assert decode_vector(total, ep) == [6, 11, 12]

    def test_invalid_encode_params(self):
        """n <= 0 や p >= q は拒否されること"""
        with pytest.raises(ParameterError):
            EncodeParams.for_lwr(4, 0, Modulus(1 << 10))
        with pytest.raises(ParameterError):
            EncodeParams.for_lwe(3, Modulus(16), Modulus(16))
