"""サーバーのロール

集合の共通部分でオンライン集合 C を決め、委員会の返信から Σsd を復元して
マスクを外す。プロトコルが定義する失敗は Abort の値で返す。
"""

import logging
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction

from src.protocol.client import iteration_matrix
from src.protocol.committee import CommitteeAssignment
from src.protocol.messages import (
    Abort,
    AbortReason,
    ClientMessage,
    CommitteeMessage,
    IterationId,
    IterationResult,
    view_digest,
)
from src.protocol.opa_prime import prime_unmask
from src.protocol.params import Mode, ProtocolParams
from src.sharing.field import reconstruct_field, reconstruct_packed_vector
from src.sharing.shares import Share, ShareBundle
from src.shprg.codec import decode_vector
from src.shprg.matrix import second_mask
from src.shprg.prg import PrgSeed, expand_lwe, expand_lwr
from src.verify.group import GroupBackend
from src.verify.proof import aggregate_commitment_check, verify_sharing
from src.verify.scrape import packed_points

logger = logging.getLogger(__name__)


def max_dropouts(params: ProtocolParams, expected: int) -> int:
    """許容する脱落数 ⌊δ·n⌋（δ は10進表記のまま有理数として扱う）"""
    return int(Fraction(str(params.dropout)) * expected)


def server_intersect(
    masked: Iterable[int],
    aux_received: Mapping[int, Iterable[int]],
    params: ProtocolParams,
    expected: Sequence[int],
) -> tuple[tuple[int, ...], Abort | None]:
    """メッセージ 1a と m 個の 1b が全て届いたクライアントを C とする

    Args:
        masked: 1a（マスク済み入力）が届いたクライアント
        aux_received: クライアント i → 1b が届いたメンバー番号
        params: 公開パラメータ
        expected: この反復の入力クライアント

    Returns:
        (C, 中断理由)。|C| < (1−δ)n なら TOO_MANY_DROPOUTS
    """
    members = set(range(1, params.m + 1))
    online = tuple(
        sorted(i for i in set(masked) if members <= set(aux_received.get(i, ())))
    )
    dropped = len(expected) - len(online)
    if dropped > max_dropouts(params, len(expected)):
        logger.info("%d of %d clients dropped, aborting", dropped, len(expected))
        return online, Abort(AbortReason.TOO_MANY_DROPOUTS, f"|C|={len(online)} of {len(expected)}")
    return online, None


def verify_client_proofs(
    messages: Mapping[int, ClientMessage],
    online: Sequence[int],
    params: ProtocolParams,
    group: GroupBackend,
) -> Abort | None:
    """C 内の全クライアントのチャンクごとの証明を検証する"""
    sp = params.share_params()
    points = packed_points(sp)
    for client in online:
        proofs = messages[client].proofs
        if len(proofs) != params.chunks:
            return Abort(AbortReason.MALICIOUS_CLIENT, f"client {client} sent {len(proofs)} proofs")
        for c, proof in enumerate(proofs):
            if not verify_sharing(proof, sp, group, points):
                logger.info("proof %d of client %d rejected", c, client)
                return Abort(AbortReason.MALICIOUS_CLIENT, f"client {client} chunk {c}: invalid proof")
    return None


def unique_set_guard(
    replies: Sequence[CommitteeMessage],
    r: int,
) -> tuple[list[CommitteeMessage], Abort | None]:
    """r 人以上が同じ C を報告している場合だけその返信を採用する

    r > (m+t)/2 のもとで、異なる2つの C がともに r 人の支持を得ることはない。
    """
    if not replies:
        return [], Abort(AbortReason.EQUIVOCATION, "no committee replies")
    counts = Counter(reply.view for reply in replies)
    view, support = counts.most_common(1)[0]
    if support < r:
        return [], Abort(AbortReason.EQUIVOCATION, f"largest consistent view has {support} < r={r} members")
    return [reply for reply in replies if reply.view == view], None


def _reconstruct_digs(
    replies: Sequence[CommitteeMessage],
    clients: Sequence[int],
    params: ProtocolParams,
) -> dict[int, int] | Abort:
    dsp = params.digest_share_params()
    by_client: dict[int, list[Share]] = {i: [] for i in clients}
    for reply in replies:
        for client, value in reply.dig_shares:
            if client in by_client:
                by_client[client].append(Share(reply.member, value))
    digs = {}
    for client, shares in by_client.items():
        if len(shares) < params.r:
            return Abort(AbortReason.TOO_FEW_COMMITTEE, f"{len(shares)} digest shares for client {client}")
        digs[client] = reconstruct_field(shares, dsp)
    return digs


def _check_commitments(
    total: Sequence[int],
    clients: Sequence[int],
    messages: Mapping[int, ClientMessage],
    params: ProtocolParams,
    group: GroupBackend,
) -> Abort | None:
    rho = params.rho
    for c in range(params.chunks):
        for k in range(rho):
            coord = c * rho + k
            value = total[coord] if coord < len(total) else 0
            commitments = [messages[i].proofs[c].commitments[k] for i in clients]
            if not aggregate_commitment_check(commitments, value, group):
                return Abort(AbortReason.MALICIOUS_CLIENT, f"aggregate commitment mismatch at chunk {c} slot {k}")
    return None


def server_aggregate(
    replies_by_group: Mapping[int, Sequence[CommitteeMessage]],
    online: Sequence[int],
    messages: Mapping[int, ClientMessage],
    params: ProtocolParams,
    iteration: IterationId,
    assignment: CommitteeAssignment,
    group: GroupBackend | None = None,
) -> IterationResult:
    """委員会の返信からシードの和を復元し、集約値を復号する

    Args:
        replies_by_group: 委員会グループ → 届いた返信
        online: オンライン集合 C
        messages: クライアント i → ClientMessage
        params: 公開パラメータ
        iteration: 反復の識別子
        assignment: 委員会の割り当て
        group: 能動的安全性モードのコミットメントの群

    Returns:
        IterationResult: 成功時は C 上の入力の和
    """
    online = tuple(sorted(online))

    def abort(reason: AbortReason, detail: str) -> IterationResult:
        logger.info("iteration %d aborted: %s (%s)", iteration.label, reason, detail)
        return IterationResult(label=iteration.label, abort=Abort(reason, detail), online=online)

    out_mod = params.ct_modulus
    ct_sum = [sum(col) % out_mod for col in zip(*(messages[i].ct for i in online))]
    if not ct_sum:
        ct_sum = [0] * params.vec_len

    q = params.field_modulus
    sp = params.share_params() if params.mode is not Mode.PRIME_LWR else None
    seed_total = [0] * params.seed_dim
    prime_replies: list[CommitteeMessage] = []

    for g in range(assignment.group_count):
        clients = assignment.clients_of(g, online)
        if not clients:
            continue
        replies = [r for r in replies_by_group.get(g, ()) if r.label == iteration.label]
        complaints = [r for r in replies if r.complaint is not None]
        if complaints:
            return abort(AbortReason.COMMITTEE_COMPLAINT, complaints[0].complaint.detail)
        if params.active:
            replies, guard = unique_set_guard(replies, params.r)
            if guard is not None:
                return abort(guard.reason, guard.detail)
            if replies[0].view != view_digest(clients):
                return abort(AbortReason.EQUIVOCATION, f"committee {g} agreed on a different online set")
        if len(replies) < params.r:
            return abort(AbortReason.TOO_FEW_COMMITTEE, f"group {g}: {len(replies)} replies < r={params.r}")

        if params.mode is Mode.PRIME_LWR:
            prime_replies = list(replies)
            continue

        bundles = [ShareBundle(reply.member, reply.aux) for reply in replies]
        total = reconstruct_packed_vector(bundles, sp, params.seed_dim)
        if params.active:
            failed = _check_commitments(total, clients, messages, params, group)
            if failed is not None:
                return abort(failed.reason, failed.detail)
            digs = _reconstruct_digs(replies, clients, params)
            if isinstance(digs, Abort):
                return abort(digs.reason, digs.detail)
            for dig in digs.values():
                mask = second_mask(dig, params.vec_len, out_mod, q)
                ct_sum = [(a - b) % out_mod for a, b in zip(ct_sum, mask)]
        seed_total = [(a + b) % q for a, b in zip(seed_total, total)]

    if params.mode is Mode.PRIME_LWR:
        aggregate = prime_unmask(prime_replies, ct_sum, params) if online else [0] * params.vec_len
        return IterationResult(label=iteration.label, aggregate=tuple(aggregate), online=online)

    prg = params.prg_params()
    A = iteration_matrix(params, iteration)
    seed = PrgSeed(s=tuple(seed_total))
    if params.mode is Mode.LWE:
        aux = expand_lwe(prg, A, seed)
    else:
        aux = expand_lwr(prg, A, seed)
    unmasked = [(a - b) % out_mod for a, b in zip(ct_sum, aux)]
    aggregate = decode_vector(unmasked, params.encode_params()) if online else [0] * params.vec_len
    return IterationResult(label=iteration.label, aggregate=tuple(aggregate), online=online)
