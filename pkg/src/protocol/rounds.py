"""ロールの組み立て

セットアップ（委員会の選出、鍵生成、OPA′ の鍵分散）と、ネットワークを介さずに
1反復を直接実行する run_round。エンジンとテストの両方から使う。
"""

import logging
import random
from collections.abc import Collection, Mapping, Sequence
from dataclasses import dataclass, field

from src.errors import ParameterError
from src.protocol.client import client_encrypt
from src.protocol.committee import CommitteeAssignment, sample_committee
from src.protocol.member import committee_combine
from src.protocol.messages import ClientMessage, CommitteeMessage, IterationId, IterationResult
from src.protocol.opa_prime import PrimeClientKeys, prime_client_encrypt, prime_setup
from src.protocol.params import Mode, ProtocolParams
from src.protocol.pke import Keypair, PkeBackend
from src.protocol.server import server_aggregate, server_intersect, verify_client_proofs
from src.verify.group import SchnorrGroup, schnorr_group

logger = logging.getLogger(__name__)


@dataclass
class RoundSetup:
    """セッションを通して変わらない状態

    Attributes:
        assignment: 委員会の割り当て
        keypairs: keypairs[g][j-1] がグループ g のメンバー j の鍵ペア
        cipher: 補助情報の暗号化方式
        group: コミットメントの群（能動的安全性モードのみ）
        prime_keys: OPA′ のクライアントごとの鍵
    """

    assignment: CommitteeAssignment
    keypairs: tuple[tuple[Keypair, ...], ...]
    cipher: PkeBackend
    group: SchnorrGroup | None = None
    prime_keys: dict[int, PrimeClientKeys] = field(default_factory=dict)

    def public_keys(self, client: int) -> list[bytes]:
        g = self.assignment.group_of(client)
        return [kp.public for kp in self.keypairs[g]]


def setup_round(
    params: ProtocolParams,
    clients: Sequence[int],
    rng: random.Random,
    cipher: PkeBackend,
) -> RoundSetup:
    """委員会を選び、メンバーの鍵と（OPA′ なら）クライアントの鍵を用意する"""
    params.require_valid()
    assignment = sample_committee(params.big_n, params.m, params.groups, params.beacon)
    keypairs = tuple(
        tuple(cipher.keygen(rng) for _ in range(params.m)) for _ in range(params.groups)
    )
    group = schnorr_group(params.field_modulus, params.group_bits) if params.active else None
    prime_keys = {}
    if params.mode is Mode.PRIME_LWR:
        dp = params.dprf_params()
        prime_keys = {i: prime_setup(dp, params.vec_len, rng) for i in clients}
    logger.info(
        "setup: mode=%s security=%s m=%d groups=%d clients=%d",
        params.mode, params.security, params.m, params.groups, len(clients),
    )
    return RoundSetup(assignment=assignment, keypairs=keypairs, cipher=cipher, group=group, prime_keys=prime_keys)


def encrypt_input(
    client: int,
    x: Sequence[int],
    params: ProtocolParams,
    iteration: IterationId,
    setup: RoundSetup,
    rng: random.Random,
    corrupt_share_for: int | None = None,
    enforce_budget: bool = True,
) -> ClientMessage:
    """モードに応じてクライアントのメッセージを作る

    enforce_budget=False（入力の範囲検査を省く）は OPA′ でのみ使える。
    """
    public_keys = setup.public_keys(client)
    if params.mode is Mode.PRIME_LWR:
        return prime_client_encrypt(
            client, x, params, iteration, setup.prime_keys[client], public_keys, rng, setup.cipher,
            enforce_budget=enforce_budget,
        )
    if not enforce_budget:
        raise ParameterError("the input budget can only be bypassed in prime_lwr mode")
    return client_encrypt(
        client, x, params, iteration, public_keys, rng, setup.cipher,
        group=setup.group, corrupt_share_for=corrupt_share_for,
    )


def combine_for_group(
    g: int,
    member: int,
    online: Sequence[int],
    messages: Mapping[int, ClientMessage],
    params: ProtocolParams,
    iteration: IterationId,
    setup: RoundSetup,
) -> CommitteeMessage:
    """グループ g のメンバー j の結合処理（C は既にグループの分に絞ってある）"""
    commitments = None
    if params.active:
        commitments = {i: messages[i].commitments_for(member) for i in online}
    return committee_combine(
        member,
        {i: messages[i].aux_ciphertexts[member - 1] for i in online},
        online,
        iteration,
        params,
        setup.keypairs[g][member - 1],
        setup.cipher,
        commitments=commitments,
        group=setup.group,
        group_index=g,
    )


def run_round(
    inputs: Mapping[int, Sequence[int]],
    params: ProtocolParams,
    iteration: IterationId,
    setup: RoundSetup,
    rng: random.Random,
    dropped_clients: Collection[int] = (),
    dropped_members: Collection[int] = (),
    enforce_budget: bool = True,
) -> IterationResult:
    """1反復をネットワークなしで実行する

    Args:
        inputs: クライアント i → 入力ベクトル
        params: 公開パラメータ
        iteration: 反復の識別子
        setup: setup_round の結果
        rng: 乱数源
        dropped_clients: 送信前に脱落するクライアント
        dropped_members: 返信前に脱落するメンバー番号（全グループ共通）
        enforce_budget: False なら OPA′ の入力の範囲検査を省く

    Returns:
        IterationResult
    """
    expected = sorted(inputs)
    messages = {
        i: encrypt_input(i, inputs[i], params, iteration, setup, rng, enforce_budget=enforce_budget)
        for i in expected
        if i not in dropped_clients
    }
    members = range(1, params.m + 1)
    online, abort = server_intersect(messages, {i: members for i in messages}, params, expected)
    if abort is not None:
        return IterationResult(label=iteration.label, abort=abort, online=online)
    if params.active:
        abort = verify_client_proofs(messages, online, params, setup.group)
        if abort is not None:
            return IterationResult(label=iteration.label, abort=abort, online=online)

    replies: dict[int, list[CommitteeMessage]] = {}
    for g in range(setup.assignment.group_count):
        clients = setup.assignment.clients_of(g, online)
        if not clients:
            continue
        replies[g] = [
            combine_for_group(g, j, clients, messages, params, iteration, setup)
            for j in members
            if j not in dropped_members
        ]
    return server_aggregate(replies, online, messages, params, iteration, setup.assignment, setup.group)


def opa_prime_round(
    inputs: Mapping[int, Sequence[int]],
    params: ProtocolParams,
    iteration: IterationId,
    setup: RoundSetup,
    rng: random.Random,
    dropped_clients: Collection[int] = (),
    dropped_members: Collection[int] = (),
    enforce_budget: bool = True,
) -> IterationResult:
    """DPRF でマスクする OPA′ の1反復"""
    if params.mode is not Mode.PRIME_LWR or not setup.prime_keys:
        raise ParameterError("opa_prime_round needs prime_lwr parameters and DPRF keys")
    return run_round(inputs, params, iteration, setup, rng, dropped_clients, dropped_members, enforce_budget)
