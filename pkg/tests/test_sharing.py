"""秘密分散（体上・整数上、通常版・パック版）のテスト"""

import random
from math import ceil, log2

import pytest

from src.errors import DecodeError, ParameterError, RangeError, ThresholdError
from src.ringmath.modulus import Modulus
from src.ringmath.poly import horner
from src.sharing.field import (
    chunk_count,
    reconstruct_field,
    reconstruct_packed_field,
    reconstruct_packed_vector,
    share_field,
    share_packed_field,
    share_packed_vector,
)
from src.sharing.integer import (
    exact_sweeping_max,
    min_randomness_bits,
    reconstruct_integer,
    reconstruct_packed_integer,
    share_integer,
    share_packed_integer,
    sweeping_coefficient_bound,
    sweeping_max,
    sweeping_polynomial,
)
from src.sharing.shares import (
    Share,
    ShareBundle,
    ShareParams,
    add_bundles,
    add_shares,
    deserialize_share,
    serialize_share,
)

F97 = Modulus(97, is_prime=True)


class TestShareParams:
    """パラメータの検査"""

    def test_packed_sets_threshold(self):
        """packed() が t = r - rho を設定すること"""
        sp = ShareParams.packed(5, 4, 2, field=F97)
        assert sp.t == 2
        assert sp.positions == (6, 7)
        assert sp.delta_fact == 120

    def test_rejects_bad_thresholds(self):
        """t < r <= m を満たさなければ拒否されること"""
        with pytest.raises(ParameterError):
            ShareParams(m=3, r=4, t=3)
        with pytest.raises(ParameterError):
            ShareParams(m=5, r=4, t=1, rho=2)

    def test_rejects_small_committee(self):
        """m < 3ρ/2 は拒否されること"""
        with pytest.raises(ParameterError):
            ShareParams.packed(5, 5, 4)

    def test_rejects_composite_field(self):
        """体のモジュラスは素数であること"""
        with pytest.raises(ParameterError):
            ShareParams(m=3, r=2, t=1, field=Modulus(96))


class TestFieldSharing:
    """素体上の Shamir 分散"""

    def test_known_shares(self):
        """f(X) = 5 + 3X のシェアが 8, 11, 14 になること"""
        sp = ShareParams(m=3, r=2, t=1, field=F97)
        shares = share_field(5, sp, random.Random(0), coeffs=[3])
        assert [s.value for s in shares] == [8, 11, 14]

    def test_reconstruct_from_any_subset(self):
        """どの r 個の組からも秘密が復元されること"""
        sp = ShareParams(m=3, r=2, t=1, field=F97)
        shares = share_field(5, sp, random.Random(0), coeffs=[3])
        assert reconstruct_field([shares[0], shares[2]], sp) == 5
        assert reconstruct_field([shares[2], shares[1]], sp) == 5

    def test_homomorphism(self):
        """シェアの和から秘密の和が復元されること"""
        sp = ShareParams(m=5, r=3, t=2, field=F97)
        rng = random.Random(1)
        a, b = share_field(40, sp, rng), share_field(70, sp, rng)
        summed = [add_shares(x, y, 97) for x, y in zip(a, b)]
        assert reconstruct_field(summed[2:], sp) == (40 + 70) % 97

    def test_too_few_shares(self):
        """シェアが r 個未満なら ThresholdError になること"""
        sp = ShareParams(m=3, r=2, t=1, field=F97)
        shares = share_field(5, sp, random.Random(0))
        with pytest.raises(ThresholdError):
            reconstruct_field(shares[:1], sp)

    def test_duplicate_indices(self):
        """同じ index のシェアが混ざると ParameterError になること"""
        sp = ShareParams(m=3, r=2, t=1, field=F97)
        with pytest.raises(ParameterError):
            reconstruct_field([Share(1, 8), Share(1, 8)], sp)


class TestPackedFieldSharing:
    """パック版の分散"""

    def test_known_packed_shares(self):
        """q(X)=7, 秘密 (10, 20) のシェアが (64, 32, 14) になること"""
        sp = ShareParams.packed(3, 3, 2, field=F97)
        shares = share_packed_field([10, 20], sp, random.Random(0), q_coeffs=[7])
        assert [s.value for s in shares] == [64, 32, 14]
        assert reconstruct_packed_field(shares, sp).values == (10, 20)

    def test_wrong_secret_count(self):
        """秘密の個数が rho と違えば ParameterError になること"""
        sp = ShareParams.packed(3, 3, 2, field=F97)
        with pytest.raises(ParameterError):
            share_packed_field([1, 2, 3], sp, random.Random(0))

    def test_vector_round_trip_with_padding(self):
        """長さが rho の倍数でないベクトルも任意の r 個のバンドルから復元されること"""
        sp = ShareParams.packed(5, 4, 2, field=F97)
        values = [3, 1, 4, 1, 5]
        bundles = share_packed_vector(values, sp, random.Random(2))
        assert chunk_count(5, 2) == 3
        assert all(len(b.values) == 3 for b in bundles)
        assert reconstruct_packed_vector(bundles[1:], sp, 5) == values
        assert reconstruct_packed_vector([bundles[4], bundles[0], bundles[2], bundles[3]], sp, 5) == values

    def test_vector_sum(self):
        """バンドルを足すとベクトルの和が復元されること"""
        sp = ShareParams.packed(5, 4, 2, field=F97)
        rng = random.Random(3)
        a = share_packed_vector([10, 20, 30], sp, rng)
        b = share_packed_vector([1, 2, 3], sp, rng)
        summed = [add_bundles([x, y], 97) for x, y in zip(a, b)]
        assert reconstruct_packed_vector(summed, sp, 3) == [11, 22, 33]

    def test_vector_too_few_bundles(self):
        """バンドルが r 個未満なら ThresholdError になること"""
        sp = ShareParams.packed(5, 4, 2, field=F97)
        bundles = share_packed_vector([1, 2], sp, random.Random(0))
        with pytest.raises(ThresholdError):
            reconstruct_packed_vector(bundles[:3], sp, 2)

    def test_add_bundles_index_mismatch(self):
        """異なるメンバーのバンドルは足せないこと"""
        with pytest.raises(ParameterError):
            add_bundles([ShareBundle(1, (1,)), ShareBundle(2, (1,))], 97)


class TestIntegerSharing:
    """整数上の分散"""

    def _sp(self, **kwargs) -> ShareParams:
        return ShareParams(ell_s=8, ell_r=8, kappa_s=4, **kwargs)

    def test_reconstruct_scaled_secret(self):
        """再構成値が s·Δ² になること"""
        sp = self._sp(m=3, r=2, t=1)
        shares = share_integer(5, sp, random.Random(0))
        assert reconstruct_integer(shares[1:], sp) == 5 * 36

    def test_packed_reconstruct(self):
        """パック版の再構成値が s_k·Δ³ になること"""
        sp = self._sp(m=3, r=3, t=1, rho=2)
        shares = share_packed_integer([3, 7], sp, random.Random(1))
        assert reconstruct_packed_integer(shares, sp) == [3 * 216, 7 * 216]

    def test_secret_out_of_range(self):
        """2^ℓ_s 以上の秘密は RangeError になること"""
        sp = self._sp(m=3, r=2, t=1)
        with pytest.raises(RangeError):
            share_integer(256, sp, random.Random(0))

    def test_short_randomness_warns(self, caplog):
        """ℓ_r がプライバシーに必要な長さより短ければ警告を出すこと"""
        sp = self._sp(m=3, r=2, t=1)
        with caplog.at_level("WARNING", logger="src.sharing.integer"):
            share_integer(5, sp, random.Random(0))
        assert "statistical privacy" in caplog.text

    def test_long_randomness_is_quiet(self, caplog):
        """十分な ℓ_r なら警告を出さないこと"""
        sp = ShareParams(m=3, r=2, t=1, ell_s=8, ell_r=64, kappa_s=4)
        with caplog.at_level("WARNING", logger="src.sharing.integer"):
            share_integer(5, sp, random.Random(0))
        assert caplog.text == ""


class TestSweeping:
    """掃き出し多項式"""

    def _sp(self) -> ShareParams:
        return ShareParams(m=5, r=3, t=2)

    def test_values_at_points(self):
        """スロットで Δ²、汚染集合で 0 を取ること"""
        sp = self._sp()
        coeffs = sweeping_polynomial([1, 2], 1, sp)
        assert horner(coeffs, 6) == 120**2
        assert horner(coeffs, 1) == 0
        assert horner(coeffs, 2) == 0

    def test_invalid_corrupt_set(self):
        """大きさが t でない集合や範囲外の番号は拒否されること"""
        sp = self._sp()
        with pytest.raises(ParameterError):
            sweeping_polynomial([1], 1, sp)
        with pytest.raises(ParameterError):
            sweeping_polynomial([1, 9], 1, sp)

    def test_bound_dominates_exact_maximum(self):
        """係数の上界が全列挙の最大値以上であること"""
        sp = self._sp()
        assert exact_sweeping_max(sp) <= sweeping_coefficient_bound(sp)
        assert min_randomness_bits(sp) > sp.ell_s

    def test_small_committee_uses_exact_maximum(self):
        """列挙できる大きさなら h_max に全列挙の最大値を使うこと"""
        sp = self._sp()
        assert sweeping_max(sp) == exact_sweeping_max(sp)
        assert sweeping_max(sp, exhaustive_limit=0) == sweeping_coefficient_bound(sp)
        assert min_randomness_bits(sp) == sp.ell_s + ceil(log2(exact_sweeping_max(sp) * (sp.r - 1))) + 1


class TestSerialization:
    """シェアの正準シリアライズ"""

    def test_field_share_width(self):
        """体のシェアが index 2B + 16B になること"""
        data = serialize_share(Share(3, 14), F97)
        assert len(data) == 18
        assert deserialize_share(data, F97) == (Share(3, 14), 18)

    def test_negative_integer_share(self):
        """負の整数シェアが符号付きで読み戻せること"""
        data = serialize_share(Share(2, -1234))
        assert deserialize_share(data)[0] == Share(2, -1234)

    def test_non_canonical_field_share(self):
        """法以上の値は DecodeError になること"""
        data = (1).to_bytes(2, "little") + (97).to_bytes(16, "little")
        with pytest.raises(DecodeError):
            deserialize_share(data, F97)

    def test_truncated(self):
        """途中で切れたデータは DecodeError になること"""
        with pytest.raises(DecodeError):
            deserialize_share(serialize_share(Share(2, 99))[:-1])
