"""1反復のノード関数

LangGraphの各ノードでロールの処理を実行する。各関数は IterationState を受け取り、
更新するフィールドのdictを返す。

ロール間の通信は全て EngineContext.network（離散イベントシミュレータ）を経由し、
各ロールの計算時間は壁時計で測ってノードのローカル時刻を進める。
"""

import logging
import random
import time
from dataclasses import dataclass, field
from typing import Any

from src.engine.state import IterationState
from src.protocol.member import committee_combine
from src.protocol.messages import CommitteeMessage, IterationResult
from src.protocol.params import ProtocolParams
from src.protocol.rounds import RoundSetup, encrypt_input
from src.protocol.server import server_aggregate, server_intersect, verify_client_proofs
from src.sim.adversary import Adversary
from src.sim.events import SERVER, NetworkSimulator, client_node, member_node

logger = logging.getLogger(__name__)


@dataclass
class EngineContext:
    """ノードに注入する実行時の依存

    Attributes:
        params: 公開パラメータ
        setup: 委員会の割り当てと鍵
        network: この反復のネットワーク（反復ごとに差し替える）
        rng: 乱数源
        adversary: 故障注入
        dropped_clients: この反復で送信前に脱落するクライアント
        dropped_members: この反復で脱落する (グループ, メンバー番号)
    """

    params: ProtocolParams
    setup: RoundSetup
    network: NetworkSimulator
    rng: random.Random
    adversary: Adversary = field(default_factory=Adversary)
    dropped_clients: frozenset[int] = frozenset()
    dropped_members: frozenset[tuple[int, int]] = frozenset()


def _elapsed_us(start: float) -> float:
    return (time.perf_counter() - start) * 1e6


def create_nodes(ctx: EngineContext):
    """全ノード関数を作成して辞書で返す

    Returns:
        dict: {"ノード名": ノード関数} の辞書
    """
    params = ctx.params
    setup = ctx.setup

    # --- ノード1: クライアントの暗号化と送信 ---
    def encrypt_inputs(state: IterationState) -> dict[str, Any]:
        iteration = state["iteration"]
        clients = sorted(state["inputs"])
        timings = []
        for i in clients:
            if i in ctx.dropped_clients:
                continue
            start = time.perf_counter()
            message = encrypt_input(
                i,
                state["inputs"][i],
                params,
                iteration,
                setup,
                ctx.rng,
                corrupt_share_for=ctx.adversary.corrupt_share(i, clients),
            )
            elapsed = _elapsed_us(start)
            node = client_node(i)
            ctx.network.advance(node, elapsed)
            ctx.network.send(node, SERVER, "client", message.wire_size(params.ct_modulus, setup.group), message)
            timings.append(("client", elapsed))
        messages = {event.payload.client: event.payload for event in ctx.network.deliver()}
        return {
            "messages": messages,
            "timings": timings,
            "events": [f"encrypt: {len(messages)} of {len(clients)} clients sent"],
        }

    # --- ノード2: オンライン集合の決定 ---
    def intersect(state: IterationState) -> dict[str, Any]:
        messages = state["messages"]
        start = time.perf_counter()
        members = range(1, params.m + 1)
        online, abort = server_intersect(messages, {i: members for i in messages}, params, sorted(state["inputs"]))
        elapsed = _elapsed_us(start)
        ctx.network.advance(SERVER, elapsed)
        return {
            "online": online,
            "abort": abort,
            "timings": [("server", elapsed)],
            "events": [f"intersect: |C|={len(online)}"],
        }

    # --- ノード3: 証明の検証（能動的安全性モードのみ） ---
    def verify_proofs(state: IterationState) -> dict[str, Any]:
        if not params.active:
            return {"events": ["verify: skipped"]}
        start = time.perf_counter()
        abort = verify_client_proofs(state["messages"], state["online"], params, setup.group)
        elapsed = _elapsed_us(start)
        ctx.network.advance(SERVER, elapsed)
        return {
            "abort": abort,
            "timings": [("server", elapsed)],
            "events": [f"verify: {'rejected' if abort else 'accepted'}"],
        }

    # --- ノード4: 委員会への転送と結合 ---
    def combine(state: IterationState) -> dict[str, Any]:
        iteration = state["iteration"]
        messages = state["messages"]
        assignment = setup.assignment
        for g, j in ctx.dropped_members:
            ctx.network.offline.add(member_node(g, j))

        for g in range(assignment.group_count):
            clients = assignment.clients_of(g, state["online"])
            if not clients:
                continue
            for j in range(1, params.m + 1):
                view = ctx.adversary.member_view(g, j, clients, params.m)
                forwarded = {i: messages[i].aux_ciphertexts[j - 1] for i in view}
                forwarded = ctx.adversary.forwarded(g, j, forwarded)
                commitments = None
                size = 4 * len(view) + sum(len(c) for c in forwarded.values())
                if params.active:
                    commitments = {i: messages[i].commitments_for(j) for i in view}
                    size += sum(len(c) for c in commitments.values()) * setup.group.width
                ctx.network.send(SERVER, member_node(g, j), "forward", size, (g, j, view, forwarded, commitments))

        timings = []
        inbox = sorted(ctx.network.deliver(), key=lambda event: event.dst)
        for event in inbox:
            g, j, view, forwarded, commitments = event.payload
            start = time.perf_counter()
            reply = committee_combine(
                j,
                forwarded,
                view,
                iteration,
                params,
                setup.keypairs[g][j - 1],
                setup.cipher,
                commitments=commitments,
                group=setup.group,
                group_index=g,
            )
            elapsed = _elapsed_us(start)
            ctx.network.advance(event.dst, elapsed)
            ctx.network.send(event.dst, SERVER, "reply", reply.wire_size(params.field_modulus), reply)
            timings.append(("member", elapsed))

        replies: dict[int, list[CommitteeMessage]] = {}
        for event in ctx.network.deliver():
            replies.setdefault(event.payload.group, []).append(event.payload)
        for group_replies in replies.values():
            group_replies.sort(key=lambda reply: reply.member)
        return {
            "replies": replies,
            "timings": timings,
            "events": [f"combine: {sum(len(r) for r in replies.values())} replies"],
        }

    # --- ノード5: 集約と復号 ---
    def aggregate(state: IterationState) -> dict[str, Any]:
        start = time.perf_counter()
        result = server_aggregate(
            state["replies"],
            state["online"],
            state["messages"],
            params,
            state["iteration"],
            setup.assignment,
            setup.group,
        )
        elapsed = _elapsed_us(start)
        ctx.network.advance(SERVER, elapsed)
        outcome = "ok" if result.ok else result.abort.reason
        return {
            "result": result,
            "abort": result.abort,
            "timings": [("server", elapsed)],
            "events": [f"aggregate: {outcome}"],
        }

    # --- ノード6: 後処理 ---
    def finish(state: IterationState) -> dict[str, Any]:
        result = state.get("result")
        if result is None:
            result = IterationResult(
                label=state["iteration"].label,
                abort=state["abort"],
                online=state["online"],
            )
        ctx.adversary.observe(state["messages"])
        if result.abort is not None:
            logger.warning("iteration %d aborted: %s", result.label, result.abort.reason)
        return {"result": result}

    return {
        "encrypt_inputs": encrypt_inputs,
        "intersect": intersect,
        "verify_proofs": verify_proofs,
        "combine": combine,
        "aggregate": aggregate,
        "finish": finish,
    }
