"""複数反復のセッション実行

ScenarioConfig（JSON で保存できる pydantic モデル）から委員会と鍵を用意し、
反復ごとに入力と脱落を乱数で決めてエンジンのグラフを実行する。
集約値は平文の和（オラクル）と比較して MetricsRecord に記録する。
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel, Field, field_validator

from src.engine.graph import create_iteration_graph
from src.engine.nodes import EngineContext
from src.engine.state import initial_state
from src.errors import ParameterError
from src.protocol.fedopt import PostAggregationHook, Quantizer, dequantize
from src.protocol.messages import IterationId, IterationResult
from src.protocol.opa_prime import prime_codec
from src.protocol.params import Mode, ProtocolParams
from src.protocol.pke import make_cipher
from src.protocol.rounds import setup_round
from src.sim.adversary import ADVERSARIES, make_adversary
from src.sim.events import NetworkSimulator, TranscriptEntry
from src.sim.latency import LatencyModel
from src.sim.metrics import MetricsFormat, MetricsRecord, emit_metrics

logger = logging.getLogger(__name__)


class ScenarioConfig(BaseModel):
    """セッションの設定

    Attributes:
        params: 公開パラメータ
        iterations: 反復回数
        client_dropout: 各反復で送信前に脱落させるクライアントの割合
        member_dropout: 各反復で脱落させる委員会メンバーの人数（グループごと）
        adversary: 故障注入の名前
        latency: 遅延モデル
        seed: 全ての乱数の元
        input_bits: 入力を [0, 2^input_bits) から取る（予算を超える分は切り詰める）
        null_cipher: 補助情報の暗号化を恒等変換にする
        output: 計測値の出力先
        metrics_format: 出力形式
    """

    params: ProtocolParams = Field(default_factory=ProtocolParams)
    iterations: int = Field(default=1, ge=1)
    client_dropout: float = Field(default=0.0, ge=0.0, lt=1.0)
    member_dropout: int = Field(default=0, ge=0)
    adversary: str = "honest"
    latency: LatencyModel = Field(default_factory=LatencyModel)
    seed: int = 0
    input_bits: int = Field(default=16, ge=1)
    null_cipher: bool = False
    output: str | None = None
    metrics_format: MetricsFormat = MetricsFormat.JSON

    @field_validator("adversary")
    @classmethod
    def _known_adversary(cls, value: str) -> str:
        if value not in ADVERSARIES:
            raise ValueError(f"unknown adversary {value!r}; choose from {sorted(ADVERSARIES)}")
        return value

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

    def checked(self) -> "ScenarioConfig":
        """実行前の検査。不正なら ParameterError"""
        self.params.require_valid()
        if ADVERSARIES[self.adversary].needs_active and not self.params.active:
            raise ParameterError(f"adversary {self.adversary} needs active_abort security")
        if self.member_dropout > self.params.m:
            raise ParameterError("member_dropout exceeds the committee size")
        return self

    def input_limit(self) -> int:
        """1クライアント・1座標あたりの入力の上限"""
        if self.params.mode is Mode.PRIME_LWR:
            budget = prime_codec(self.params.dprf_params(), self.params.n).max_aggregate // self.params.n
        else:
            budget = self.params.encode_params().max_summand()
        return min((1 << self.input_bits) - 1, budget)


@dataclass
class SessionResult:
    records: list[MetricsRecord] = field(default_factory=list)
    results: list[IterationResult] = field(default_factory=list)
    transcript: list[TranscriptEntry] = field(default_factory=list)

    @property
    def all_aborted(self) -> bool:
        return bool(self.results) and all(not r.ok for r in self.results)


def _mean_ms(timings: list[tuple[str, float]], role: str) -> float:
    values = [us for name, us in timings if name == role]
    return sum(values) / len(values) / 1000 if values else 0.0


def run_session(
    cfg: ScenarioConfig,
    hook: PostAggregationHook | None = None,
    quantizer: Quantizer | None = None,
) -> SessionResult:
    """セッションを実行する

    Args:
        cfg: セッションの設定
        hook: 成功した反復ごとに平均更新を受け取るフック
        quantizer: 入力が量子化された更新である場合の逆変換

    Returns:
        SessionResult: 反復ごとの計測値、結果、送受信の記録
    """
    cfg.checked()
    params = cfg.params
    rng = random.Random(cfg.seed)
    clients = list(range(params.n))
    setup = setup_round(params, clients, rng, make_cipher(cfg.null_cipher))
    adversary = make_adversary(cfg.adversary)
    limit = cfg.input_limit()
    drop_count = int(Fraction(str(cfg.client_dropout)) * params.n)

    ctx = EngineContext(
        params=params,
        setup=setup,
        network=NetworkSimulator(cfg.latency, random.Random(cfg.seed), 0),
        rng=rng,
        adversary=adversary,
    )
    graph = create_iteration_graph(ctx)
    session = SessionResult()

    for label in range(cfg.iterations):
        iteration = IterationId(label)
        inputs = {i: [rng.randint(0, limit) for _ in range(params.vec_len)] for i in clients}
        ctx.dropped_clients = frozenset(rng.sample(clients, drop_count))
        ctx.dropped_members = frozenset(
            (g, j)
            for g in range(params.groups)
            for j in rng.sample(range(1, params.m + 1), cfg.member_dropout)
        )
        ctx.network = NetworkSimulator(cfg.latency, random.Random(rng.getrandbits(64)), label)
        adversary.begin(label)

        state = graph.invoke(initial_state(iteration, inputs))
        result: IterationResult = state["result"]
        network = ctx.network

        exact = None
        if result.ok:
            oracle = tuple(sum(inputs[i][z] for i in result.online) for z in range(params.vec_len))
            exact = result.aggregate == oracle
            if not exact:
                logger.warning("iteration %d produced a wrong aggregate", label)
        record = MetricsRecord(
            iteration=label,
            outcome="ok" if result.ok else str(result.abort.reason),
            online=len(result.online),
            client_compute_ms=_mean_ms(state["timings"], "client"),
            member_compute_ms=_mean_ms(state["timings"], "member"),
            server_compute_ms=sum(us for name, us in state["timings"] if name == "server") / 1000,
            completion_us=network.now,
            bytes_sent=network.bytes_sent,
            bytes_received=network.bytes_received,
            bytes_dropped=network.bytes_dropped,
            exact=exact,
            injected=adversary.injected,
        )
        result.metrics = record.model_dump(include={"client_compute_ms", "member_compute_ms", "server_compute_ms", "completion_us"})
        session.records.append(record)
        session.results.append(result)
        session.transcript.extend(network.transcript)
        logger.info(
            "iteration %d: %s |C|=%d server=%.2fms completion=%.0fus",
            label, record.outcome, record.online, record.server_compute_ms, record.completion_us,
        )

        if hook is not None and result.ok and result.online:
            count = len(result.online)
            if quantizer is not None:
                update = dequantize(result.aggregate, count, quantizer)
            else:
                update = [s / count for s in result.aggregate]
            hook(label, update, count)

    if cfg.output:
        emit_metrics(session.records, cfg.output, cfg.metrics_format, cfg.model_dump(mode="json"))
    return session


def single_send_violations(transcript: list[TranscriptEntry]) -> list[tuple[int, str, int]]:
    """反復ごとにクライアントと委員会メンバーが2通以上送っていれば (反復, ノード, 通数) を返す"""
    counts: dict[tuple[int, str], int] = {}
    for entry in transcript:
        if entry.src.startswith(("client:", "member:")):
            counts[(entry.label, entry.src)] = counts.get((entry.label, entry.src), 0) + 1
    return [(label, node, n) for (label, node), n in sorted(counts.items()) if n != 1]
