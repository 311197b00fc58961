"""SCRAPE テスト・コミットメント群・分散の証明のテスト

群は小さな位数（97, 10007）の Schnorr 群を使う。
"""

import random

import pytest

from src.errors import DecodeError, ParameterError
from src.ringmath.modulus import Modulus
from src.sharing.field import share_field, share_packed_field
from src.sharing.shares import Share, ShareParams
from src.verify.group import schnorr_group
from src.verify.proof import (
    SharingProof,
    aggregate_commitment_check,
    committee_share_check,
    deserialize_proof,
    prove_sharing,
    serialize_proof,
    verify_sharing,
)
from src.verify.scrape import (
    default_points,
    dual_code_weights,
    packed_points,
    scrape_check,
    scrape_weights,
    weights_from_multiplier,
)

F10007 = Modulus(10007, is_prime=True)


class TestScrape:
    """双対符号による次数検査"""

    def test_dual_weights(self):
        """点 0..3, q=97 の v が (-1/6, 1/2, -1/2, 1/6) になること"""
        assert dual_code_weights([0, 1, 2, 3], 97) == [16, 49, 48, 81]

    def test_quadratic_passes_and_perturbation_fails(self):
        """次数2の値列は通り、1点ずらすと落ちること"""
        weights = weights_from_multiplier([0, 1, 2, 3], 97, [1])
        assert scrape_check([0, 1, 4, 9], weights)
        assert not scrape_check([0, 1, 4, 10], weights)

    def test_honest_sharings_pass(self):
        """正しい分散は常に検査を通ること"""
        sp = ShareParams(m=6, r=3, t=2, field=F10007)
        rng = random.Random(1)
        for k in range(100):
            secret = rng.randrange(10007)
            values = [secret] + [s.value for s in share_field(secret, sp, rng)]
            assert scrape_check(values, scrape_weights(sp, k.to_bytes(8, "little")))

    def test_random_vectors_rarely_pass(self):
        """ランダムなベクトルの誤受理率が 10/q 以下であること"""
        sp = ShareParams(m=6, r=3, t=2, field=F10007)
        rng = random.Random(2)
        trials = 20000
        accepted = sum(
            scrape_check(
                [rng.randrange(10007) for _ in range(7)],
                scrape_weights(sp, k.to_bytes(8, "little")),
            )
            for k in range(trials)
        )
        assert accepted / trials <= 10 / 10007

    def test_packed_points(self):
        """パック版の評価点が秘密の位置、1..m の順であること"""
        sp = ShareParams.packed(3, 3, 2, field=Modulus(97, is_prime=True))
        assert packed_points(sp) == (4, 5, 1, 2, 3)
        assert default_points(sp) == (0, 1, 2, 3)

    def test_packed_sharing_passes(self):
        """パック分散の値列（秘密、シェア）が次数 r-1 の検査を通ること"""
        sp = ShareParams.packed(5, 4, 2, field=F10007)
        shares = share_packed_field([123, 456], sp, random.Random(3))
        values = [123, 456] + [s.value for s in shares]
        assert scrape_check(values, scrape_weights(sp, b"packed", packed_points(sp)))

    def test_no_room_for_multiplier(self):
        """評価点が足りなければ ParameterError になること"""
        sp = ShareParams(m=3, r=2, t=1, field=Modulus(97, is_prime=True))
        with pytest.raises(ParameterError):
            scrape_weights(sp, b"", points=[0, 1])


class TestSchnorrGroup:
    """コミットメント用の群"""

    def test_small_group(self):
        """位数 97 の部分群が作られ、生成元の位数が 97 であること"""
        group = schnorr_group(97, 16)
        assert (group.modulus - 1) % 97 == 0
        assert group.generator != 1
        assert pow(group.generator, 97, group.modulus) == 1
        assert group.is_element(group.commit(5))

    def test_commit_homomorphic(self):
        """g^a·g^b = g^(a+b) であること"""
        group = schnorr_group(97, 16)
        assert group.mul(group.commit(40), group.commit(70)) == group.commit(110)
        assert group.mul(group.commit(3), group.inv(group.commit(3))) == group.identity

    def test_decode_checks_membership(self):
        """幅違い・部分群外の値は DecodeError になること"""
        group = schnorr_group(97, 16)
        with pytest.raises(DecodeError):
            group.decode(b"\x01")
        with pytest.raises(DecodeError):
            group.decode(group.encode(0))
        assert group.decode(group.encode(group.commit(7))) == group.commit(7)

    def test_invalid_order(self):
        """位数が合成数、または bits が小さすぎると ParameterError になること"""
        with pytest.raises(ParameterError):
            schnorr_group(96, 16)
        with pytest.raises(ParameterError):
            schnorr_group(97, 7)


class TestSharingProof:
    """分散の正しさの証明"""

    def _setup(self):
        sp = ShareParams(m=4, r=2, t=1, field=F10007)
        return sp, schnorr_group(10007, 32)

    def test_honest_proof_verifies(self):
        """正しい分散の証明が検証を通ること"""
        sp, group = self._setup()
        rng = random.Random(4)
        values = [77] + [s.value for s in share_field(77, sp, rng)]
        proof = prove_sharing(values, sp, group, rng)
        assert verify_sharing(proof, sp, group)

    def test_tampered_response_rejected(self):
        """応答を書き換えた証明は拒否されること"""
        sp, group = self._setup()
        rng = random.Random(5)
        values = [77] + [s.value for s in share_field(77, sp, rng)]
        proof = prove_sharing(values, sp, group, rng)
        forged = SharingProof(
            commitments=proof.commitments,
            inner_resp=proof.inner_resp,
            z=((proof.z[0] + 1) % 10007, *proof.z[1:]),
            challenge=proof.challenge,
        )
        assert not verify_sharing(forged, sp, group)

    def test_inconsistent_shares_rejected(self):
        """多項式に乗らないシェアの証明は拒否されること"""
        sp, group = self._setup()
        rng = random.Random(6)
        values = [77] + [s.value for s in share_field(77, sp, rng)]
        values[2] = (values[2] + 1) % 10007
        assert not verify_sharing(prove_sharing(values, sp, group, rng), sp, group)

    def test_wrong_group_order(self):
        """群の位数が体と違えば ParameterError になること"""
        sp, _ = self._setup()
        with pytest.raises(ParameterError):
            prove_sharing([0] * 5, sp, schnorr_group(97, 16), random.Random(0))

    def test_committee_share_check(self):
        """メンバーのシェアがコミットメントと照合できること"""
        sp, group = self._setup()
        rng = random.Random(7)
        shares = share_field(9, sp, rng)
        proof = prove_sharing([9] + [s.value for s in shares], sp, group, rng)
        assert committee_share_check(shares[0], proof.commitments[1], group)
        assert not committee_share_check(Share(1, shares[0].value + 1), proof.commitments[1], group)

    def test_aggregate_commitment_check(self):
        """コミットメントの積が和のコミットメントと一致すること"""
        _, group = self._setup()
        commitments = [group.commit(v) for v in (3, 5, 11)]
        assert aggregate_commitment_check(commitments, 19, group)
        assert not aggregate_commitment_check(commitments, 20, group)
        assert aggregate_commitment_check([], 0, group)

    def test_serialization(self):
        """シリアライズした証明が読み戻せ、切り詰めると DecodeError になること"""
        sp, group = self._setup()
        rng = random.Random(8)
        values = [1] + [s.value for s in share_field(1, sp, rng)]
        proof = prove_sharing(values, sp, group, rng)
        data = serialize_proof(proof, group)
        assert deserialize_proof(data, group) == proof
        with pytest.raises(DecodeError):
            deserialize_proof(data[:-1], group)
