"""シミュレータ（遅延モデル・ネットワーク・セッション・計測値・CLI）のテスト"""

import random
from pathlib import Path

import pytest
from pydantic import ValidationError

from src.errors import ParameterError
from src.protocol.fedopt import AverageUpdateRecorder
from src.protocol.messages import AbortReason
from src.protocol.params import ProtocolParams, Security
from src.sim.cli import EXIT_ALL_ABORTED, EXIT_OK, EXIT_PARAMETER, main
from src.sim.events import SERVER, NetworkSimulator, TranscriptEntry, client_node, member_node
from src.sim.latency import LatencyModel
from src.sim.metrics import MetricsFormat, MetricsRecord, emit_metrics, load_metrics
from src.sim.session import ScenarioConfig, run_session, single_send_violations

SMALL = {"n": 4, "vec_len": 3, "seed_dim": 8, "m": 5, "r": 4, "t": 2, "rho": 2}
SMALL_FLAGS = [
    "--clients", "4",
    "--committee", "5",
    "--recon", "4",
    "--corrupt-thresh", "2",
    "--pack", "2",
    "--vec-len", "3",
    "--seed-dim", "8",
    "--iters", "2",
    "--null-cipher",
]
SCENARIOS = Path(__file__).resolve().parent.parent / "data" / "scenarios"


def _config(**kwargs) -> ScenarioConfig:
    params = ProtocolParams(**{**SMALL, **kwargs.pop("params", {})})
    values = {"params": params, "iterations": 2, "seed": 3, "null_cipher": True}
    values.update(kwargs)
    return ScenarioConfig(**values)


class TestLatencyModel:
    """遅延モデル"""

    def test_range_validation(self):
        """最小値が最大値を超えると ValidationError になること"""
        with pytest.raises(ValidationError):
            LatencyModel(base_min_us=200.0, base_max_us=100.0)

    def test_link_base_deterministic(self):
        """リンクの基本遅延が範囲内で決定的であること"""
        model = LatencyModel(rng_seed=7)
        base = model.link_base("client:0", SERVER)
        assert 21.0 <= base <= 100.0
        assert base == LatencyModel(rng_seed=7).link_base("client:0", SERVER)

    def test_zero_model(self):
        """zero() の遅延が常に 0 であること"""
        assert LatencyModel.zero().delay("a", "b", random.Random(0)) == 0.0

    def test_jitter_bounds(self):
        """ジッタが基本遅延の ±jitter_fraction に収まること"""
        model = LatencyModel(jitter_fraction=0.2)
        base = model.link_base("a", "b")
        rng = random.Random(1)
        for _ in range(100):
            assert 0.8 * base <= model.delay("a", "b", rng) <= 1.2 * base


class TestNetworkSimulator:
    """離散イベントのネットワーク"""

    def test_delivery_in_arrival_order(self):
        """遅く送ったメッセージは後に届き、受信者の時刻が進むこと"""
        net = NetworkSimulator(LatencyModel(base_min_us=10.0, base_max_us=10.0, jitter_fraction=0.0), random.Random(0))
        net.advance(client_node(1), 50.0)
        net.send(client_node(1), SERVER, "client", 100)
        net.send(client_node(0), SERVER, "client", 80)
        events = net.deliver()
        assert [e.src for e in events] == [client_node(0), client_node(1)]
        assert net.ready(SERVER) == 60.0
        assert net.now == 60.0

    def test_offline_node_drops(self):
        """オフラインのノード宛ては配送されずバイト数が計上されること"""
        net = NetworkSimulator(LatencyModel.zero(), random.Random(0), label=4)
        net.offline.add(member_node(0, 2))
        net.send(SERVER, member_node(0, 1), "forward", 30)
        net.send(SERVER, member_node(0, 2), "forward", 20)
        assert net.in_flight() == 30
        assert net.balanced()
        assert len(net.deliver()) == 1
        assert (net.bytes_sent, net.bytes_received, net.bytes_dropped) == (50, 30, 20)
        assert net.outbound_counts()[SERVER] == 2
        assert [entry.delivered for entry in net.transcript] == [True, False]
        assert all(entry.label == 4 for entry in net.transcript)


class TestMetrics:
    """計測値の出力"""

    def _records(self) -> list[MetricsRecord]:
        return [
            MetricsRecord(iteration=0, outcome="ok", online=4, bytes_sent=10, bytes_received=10, exact=True),
            MetricsRecord(iteration=1, outcome="equivocation", online=4, injected=True),
        ]

    @pytest.mark.parametrize("fmt,suffix", [(MetricsFormat.JSON, ".json"), (MetricsFormat.CSV, ".csv")])
    def test_emit_and_load(self, tmp_path, fmt, suffix):
        """書き出した計測値と設定が読み戻せること"""
        path = emit_metrics(self._records(), tmp_path / "out" / f"metrics{suffix}", fmt, {"seed": 3})
        records, config = load_metrics(path)
        assert records == self._records()
        assert config == {"seed": 3}

    def test_unknown_schema(self, tmp_path):
        """スキーマのバージョンが違えば ValueError になること"""
        path = tmp_path / "bad.json"
        path.write_text('{"schema_version": 99, "records": []}', encoding="utf-8")
        with pytest.raises(ValueError):
            load_metrics(path)

    def test_bytes_balanced(self):
        """送信バイト数が受信と損失の和に等しいか判定できること"""
        assert self._records()[0].bytes_balanced
        assert not MetricsRecord(iteration=0, outcome="ok", online=1, bytes_sent=5).bytes_balanced


class TestScenarioConfig:
    """セッションの設定"""

    def test_load_scenario_file(self):
        """同梱のシナリオJSONが読み込めること"""
        cfg = ScenarioConfig.load(SCENARIOS / "lwr_small.json")
        assert cfg.params.n == 20
        assert cfg.iterations == 3
        assert cfg.null_cipher

    def test_unknown_adversary(self):
        """未知の故障注入名は ValidationError になること"""
        with pytest.raises(ValidationError):
            _config(adversary="sleepy-server")

    def test_adversary_needs_active_security(self):
        """能動的な攻撃は active_abort でなければ ParameterError になること"""
        with pytest.raises(ParameterError):
            run_session(_config(adversary="replaying-server"))

    def test_member_dropout_exceeds_committee(self):
        """委員会サイズを超えるメンバー脱落は ParameterError になること"""
        with pytest.raises(ParameterError):
            run_session(_config(member_dropout=6))


class TestRunSession:
    """セッションの実行"""

    def test_exact_aggregates(self):
        """全ての反復で平文の和と一致し、各ロールが1通だけ送ること"""
        session = run_session(_config())
        assert [r.outcome for r in session.records] == ["ok", "ok"]
        assert all(r.exact for r in session.records)
        assert all(r.bytes_balanced for r in session.records)
        assert single_send_violations(session.transcript) == []

    def test_deterministic(self):
        """同じシードなら集約値と送受信の記録が一致すること"""
        first, second = run_session(_config()), run_session(_config())
        assert [r.aggregate for r in first.results] == [r.aggregate for r in second.results]

        def shape(transcript):
            return [(e.label, e.src, e.dst, e.kind, e.size, e.delivered) for e in transcript]

        assert shape(first.transcript) == shape(second.transcript)

    def test_client_dropout(self):
        """予算内のクライアント脱落では残った n-1 人の和が得られること"""
        session = run_session(_config(client_dropout=0.25, params={"dropout": 0.25}))
        assert all(r.online == 3 for r in session.records)
        assert all(r.exact for r in session.records)

    def test_member_dropout_aborts(self):
        """返信が r 人に届かなければ全反復が中断すること"""
        session = run_session(_config(member_dropout=2))
        assert session.all_aborted
        assert session.records[0].outcome == str(AbortReason.TOO_FEW_COMMITTEE)

    @pytest.mark.parametrize("adversary", ["equivocating-server", "inconsistent-share-client", "replaying-server"])
    def test_attacks_abort(self, adversary):
        """故障を注入した反復は誤った和を出さずに中断すること"""
        cfg = _config(adversary=adversary, params={"security": Security.ACTIVE_ABORT})
        session = run_session(cfg)
        injected = [r for r in session.records if r.injected]
        assert injected
        assert all(r.outcome != "ok" for r in injected)
        assert not any(r.exact is False for r in session.records)

    def test_hook_receives_average(self):
        """成功した反復ごとにフックが平均更新を受け取ること"""
        recorder = AverageUpdateRecorder()
        session = run_session(_config(), hook=recorder)
        assert len(recorder.history) == 2
        label, update, count = recorder.history[0]
        assert label == 0
        assert count == 4
        assert update == [s / 4 for s in session.results[0].aggregate]

    def test_output_written(self, tmp_path):
        """output を指定すると計測値が書き出されること"""
        out = tmp_path / "metrics.csv"
        run_session(_config(output=str(out), metrics_format=MetricsFormat.CSV))
        records, config = load_metrics(out)
        assert len(records) == 2
        assert config["params"]["m"] == 5


class TestSingleSend:
    def test_violation_detected(self):
        """同じ反復で2通送ったクライアントが検出されること"""
        transcript = [
            TranscriptEntry(0, client_node(0), SERVER, "client", 1, 0.0, True),
            TranscriptEntry(0, client_node(0), SERVER, "client", 1, 0.0, True),
            TranscriptEntry(1, client_node(0), SERVER, "client", 1, 0.0, True),
            TranscriptEntry(0, SERVER, member_node(0, 1), "forward", 1, 0.0, True),
        ]
        assert single_send_violations(transcript) == [(0, client_node(0), 2)]


class TestCli:
    """コマンドラインの終了コード"""

    def test_verify_defaults(self):
        """既定のパラメータの検査は 0 で終わること"""
        assert main(["verify-params"]) == EXIT_OK

    def test_verify_failure(self):
        """r = m/2 の検査は 2 で終わること"""
        assert main(["verify-params", "--recon", "25"]) == EXIT_PARAMETER

    def test_run_writes_metrics(self, tmp_path):
        """小さなセッションが完走して計測値を書き出すこと"""
        out = tmp_path / "run.json"
        assert main(["run", *SMALL_FLAGS, "--out", str(out)]) == EXIT_OK
        records, _ = load_metrics(out)
        assert [r.outcome for r in records] == ["ok", "ok"]

    def test_run_all_aborted(self):
        """全反復が中断したら 3 で終わること"""
        assert main(["run", *SMALL_FLAGS, "--member-dropout", "2"]) == EXIT_ALL_ABORTED

    def test_bench_attack(self):
        """攻撃の bench は中断のみで誤った和が無ければ 0 で終わること"""
        argv = ["bench", *SMALL_FLAGS, "--adversary", "inconsistent-share-client", "--runs", "2"]
        assert main(argv) == EXIT_OK

    def test_bench_from_config(self):
        """シナリオJSONとフラグの上書きを組み合わせられること"""
        argv = ["bench", "--config", str(SCENARIOS / "active_equivocation.json"), "--iters", "1", "--runs", "1"]
        assert main(argv) == EXIT_OK
