"""受け入れ検査スクリプト

正しさ・脱落耐性・攻撃時の中断・委員会の裾確率などの検査をまとめて実行し、
結果を表で表示する。既定は数分で終わる縮小版で、--full で本来の規模
（λ=2048, m=50, 各50セッション）に切り替える。
サーバーの計算時間の計測値は metrics_dir の server_scaling.json にも書き出す。

使用方法:
    python -m scripts.run_acceptance
    python -m scripts.run_acceptance --full --out data/metrics/acceptance.json

終了コード: 全項目が通れば 0、1つでも失敗すれば 1
"""

import argparse
import json
import random
import sys
import time
from collections.abc import Callable
from dataclasses import asdict, dataclass
from pathlib import Path

# プロジェクトルートをsys.pathに追加
# スクリプトを直接実行する場合、srcパッケージが見つからないことがあるため
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
from rich.console import Console
from rich.table import Table

from src.config.settings import get_settings
from src.dkhprf.dprf import DprfParams, centered, combine, combine_gap_bound, eval_prf, gen_key, p_eval, share_key
from src.protocol.committee import hypergeom_tail_bound
from src.protocol.messages import IterationId
from src.protocol.opa_prime import prime_codec
from src.protocol.params import Mode, ProtocolParams, Security
from src.protocol.pke import NullCipher
from src.protocol.rounds import combine_for_group, encrypt_input, run_round, setup_round
from src.protocol.server import server_aggregate
from src.ringmath.modulus import Modulus
from src.sharing.field import share_field
from src.sharing.shares import ShareParams
from src.shprg.matrix import PrgParams, derive_matrix
from src.shprg.prg import PrgSeed, add_seeds, expand_lwr, sample_seed
from src.sim.latency import LatencyModel
from src.sim.metrics import MetricsRecord, emit_metrics
from src.sim.report import report_ok, verify_params
from src.sim.session import ScenarioConfig, run_session, single_send_violations
from src.verify.scrape import scrape_check, scrape_weights


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass(frozen=True)
class Scale:
    sessions: int
    seed_dim: int
    grid: tuple[tuple[int, int], ...]
    scaling_n: int
    attack_runs: int
    dprf_trials: int
    scrape_trials: int


# (n, L)。(1000, 1000) は純 Python の展開が 50 セッションで1時間を超えるので除く
FULL_GRID = tuple((n, vec_len) for n in (10, 100, 1000) for vec_len in (1, 100, 1000) if n * vec_len < 10**6)

QUICK = Scale(
    sessions=3,
    seed_dim=64,
    grid=((10, 1), (10, 100), (100, 1)),
    scaling_n=100,
    attack_runs=5,
    dprf_trials=2000,
    scrape_trials=20000,
)
FULL = Scale(
    sessions=50,
    seed_dim=2048,
    grid=FULL_GRID,
    scaling_n=500,
    attack_runs=100,
    dprf_trials=10000,
    scrape_trials=100000,
)

SMALL_COMMITTEE = {"m": 5, "r": 4, "t": 2, "rho": 2}


def _sessions(cfg: ScenarioConfig, count: int) -> tuple[int, int, int, int]:
    """(正確, 誤り, 中断, 単一送信違反) の数"""
    exact = wrong = aborted = violations = 0
    for k in range(count):
        session = run_session(cfg.model_copy(update={"seed": cfg.seed + k}))
        violations += len(single_send_violations(session.transcript))
        for record in session.records:
            if record.exact:
                exact += 1
            elif record.exact is False:
                wrong += 1
            else:
                aborted += 1
    return exact, wrong, aborted, violations


def check_lwr_exact(scale: Scale) -> CheckResult:
    exact = wrong = aborted = violations = 0
    for n, vec_len in scale.grid:
        params = ProtocolParams(n=n, vec_len=vec_len, seed_dim=scale.seed_dim)
        cfg = ScenarioConfig(params=params, null_cipher=True, latency=LatencyModel.zero())
        e, w, a, v = _sessions(cfg, scale.sessions)
        exact, wrong, aborted, violations = exact + e, wrong + w, aborted + a, violations + v
    return CheckResult(
        "lwr_exact",
        wrong == 0 and aborted == 0 and violations == 0,
        f"exact={exact} wrong={wrong} aborted={aborted} single-send violations={violations} "
        f"grid={len(scale.grid)} points",
    )


def check_dropouts(scale: Scale) -> CheckResult:
    params = ProtocolParams(n=100, vec_len=8, seed_dim=scale.seed_dim, dropout=0.1)
    cfg = ScenarioConfig(
        params=params,
        client_dropout=0.1,
        member_dropout=params.m - params.r,
        null_cipher=True,
        latency=LatencyModel.zero(),
    )
    exact, wrong, aborted, violations = _sessions(cfg, scale.sessions)
    return CheckResult(
        "dropouts",
        wrong == 0 and aborted == 0,
        f"exact={exact} wrong={wrong} aborted={aborted} (client 10%, members {params.m - params.r})",
    )


def _direct_rounds(params: ProtocolParams, setup_params: ProtocolParams, inputs, runs: int, **kwargs) -> int:
    """ネットワークなしで runs 回実行し、平文の和と一致しなかった回数を返す"""
    wrong = 0
    expected = tuple(sum(col) for col in zip(*inputs.values()))
    for k in range(runs):
        rng = random.Random(k)
        setup = setup_round(setup_params, sorted(inputs), rng, NullCipher())
        result = run_round(inputs, params, IterationId(k), setup, rng, **kwargs)
        wrong += result.aggregate != expected
    return wrong


def check_lwe(scale: Scale) -> CheckResult:
    params = ProtocolParams(mode=Mode.LWE, n=100, vec_len=100, seed_dim=scale.seed_dim)
    cfg = ScenarioConfig(params=params, null_cipher=True, latency=LatencyModel.zero())
    exact, wrong, aborted, _ = _sessions(cfg, scale.sessions)

    # Δ = ⌊q/p⌋ = 127 に対して n(2η+1) が大きすぎる設定では復号がずれる
    small = ProtocolParams(mode=Mode.LWE, n=10, vec_len=4, seed_dim=16, **SMALL_COMMITTEE)
    noisy = small.model_copy(update={"rounding_modulus": 2**120, "lwe_eta": 64})
    rng = random.Random(9)
    inputs = {i: [rng.randrange(1 << 16) for _ in range(4)] for i in range(10)}
    runs = min(scale.sessions, 5)
    noisy_wrong = _direct_rounds(noisy, small, inputs, runs)
    return CheckResult(
        "lwe_exact",
        wrong == 0 and aborted == 0 and noisy_wrong == runs,
        f"exact={exact} wrong={wrong} aborted={aborted}; oversized error wrong={noisy_wrong}/{runs}",
    )


def check_almost_homomorphism(scale: Scale) -> CheckResult:
    """q=2^10, p=2^4, λ=2 で k ≤ 8 個のシードの和の誤差が {0..k−1} に収まるか"""
    prg = PrgParams(lambda_=2, big_l=8, q=Modulus(1 << 10), p=Modulus(1 << 4), matrix_seed=bytes(32))
    A = derive_matrix(prg)
    rng = random.Random(4)
    p = prg.p.value
    violations = 0
    for _ in range(scale.dprf_trials):
        k = rng.randint(2, 8)
        seeds = [sample_seed(prg, rng) for _ in range(k)]
        parts = [expand_lwr(prg, A, sd) for sd in seeds]
        joint = expand_lwr(prg, A, add_seeds(prg, *seeds))
        for z, value in enumerate(joint):
            err = (value - sum(part[z] for part in parts)) % p
            if err > k - 1:
                violations += 1
    pairs, pair_violations = _pairwise_sweep(q=64, p=8)
    return CheckResult(
        "almost_homomorphism",
        violations == 0 and pair_violations == 0,
        f"random k-sums violations={violations}; exhaustive pairs (q=64, p=8, λ=2) "
        f"violations={pair_violations}/{pairs}",
    )


def _pairwise_sweep(q: int, p: int, big_l: int = 4) -> tuple[int, int]:
    """λ=2 の全てのシードの組 (s1, s2) で Expand(s1+s2) − Expand(s1) − Expand(s2) mod p ∈ {0, 1} を数える"""
    prg = PrgParams(lambda_=2, big_l=big_l, q=Modulus(q), p=Modulus(p), matrix_seed=bytes(32))
    A = derive_matrix(prg)
    table = np.array(
        [expand_lwr(prg, A, PrgSeed(s=(a, b))) for a in range(q) for b in range(q)],
        dtype=np.int64,
    )
    s0, s1 = np.divmod(np.arange(q * q), q)
    violations = 0
    for index in range(q * q):
        a, b = divmod(index, q)
        gap = (table[((a + s0) % q) * q + (b + s1) % q] - table[index] - table) % p
        violations += int((~np.isin(gap, (0, 1))).any(axis=1).sum())
    return q**4, violations


def _dprf_mismatches(dp: DprfParams, trials: int, rng: random.Random) -> tuple[int, int]:
    """(一致しなかった回数, 差の最大値)"""
    mismatches = worst = 0
    for trial in range(trials):
        key = gen_key(dp, rng)
        shares = share_key(key, dp, rng)
        x = trial.to_bytes(8, "little")
        chosen = sorted(rng.sample(range(1, dp.m + 1), dp.r))
        combined = combine([(j, p_eval(shares[j - 1], x, dp)) for j in chosen], dp)
        gap = abs(centered(combined - eval_prf(key, x, dp), dp.v))
        mismatches += gap != 0
        worst = max(worst, gap)
    return mismatches, worst


def check_dprf(scale: Scale) -> CheckResult:
    rng = random.Random(5)
    desk = DprfParams(rho_dim=4, q=2**127 - 1, p=1 << 20, u=1 << 13, v=1 << 9, m=3, r=2)
    _, worst = _dprf_mismatches(desk, 200, rng)
    bound = combine_gap_bound(desk)
    shrunk = DprfParams(rho_dim=4, q=2**127 - 1, p=1 << 20, u=1 << 19, v=1 << 18, m=3, r=2, enforce_bounds=False)
    bad, _ = _dprf_mismatches(shrunk, scale.dprf_trials, rng)
    return CheckResult(
        "dprf",
        worst <= bound and bad > 0,
        f"desk gap <= {worst} (bound {bound}); constraint-violating counterexamples={bad}",
    )


def check_prime(scale: Scale) -> CheckResult:
    params = ProtocolParams(
        mode=Mode.PRIME_LWR, n=3, vec_len=4, m=3, r=2, t=0, rho=1, rounding_modulus=1 << 20, seed_dim=1
    )
    cfg = ScenarioConfig(params=params, null_cipher=True, latency=LatencyModel.zero())
    exact, wrong, aborted, _ = _sessions(cfg, scale.sessions)

    # 範囲検査を省いて1クライアントの予算の2倍を送ると和が v を法として折り返す
    per_client = prime_codec(params.dprf_params(), params.n).max_aggregate // params.n
    inputs = {i: [2 * per_client] * params.vec_len for i in range(params.n)}
    runs = min(scale.sessions, 5)
    over_wrong = _direct_rounds(params, params, inputs, runs, enforce_budget=False)
    return CheckResult(
        "opa_prime",
        wrong == 0 and aborted == 0 and over_wrong == runs,
        f"exact={exact} wrong={wrong} aborted={aborted}; 2x input budget wrong={over_wrong}/{runs}",
    )


def check_scrape(scale: Scale) -> CheckResult:
    sp = ShareParams(m=6, r=3, t=2, field=Modulus(10007, is_prime=True))
    rng = random.Random(7)
    completeness = 0
    honest = min(1000, scale.scrape_trials)
    for k in range(honest):
        secret = rng.randrange(10007)
        values = [secret] + [s.value for s in share_field(secret, sp, rng)]
        completeness += scrape_check(values, scrape_weights(sp, k.to_bytes(8, "little")))
    accepted = 0
    for k in range(scale.scrape_trials):
        values = [rng.randrange(10007) for _ in range(sp.m + 1)]
        accepted += scrape_check(values, scrape_weights(sp, k.to_bytes(8, "little")))
    rate = accepted / scale.scrape_trials
    return CheckResult(
        "scrape",
        completeness == honest and rate <= 10 / 10007,
        f"completeness={completeness}/{honest}, false accept rate={rate:.2e}",
    )


def check_attacks(scale: Scale) -> CheckResult:
    params = ProtocolParams(security=Security.ACTIVE_ABORT, n=6, vec_len=2, seed_dim=4, **SMALL_COMMITTEE)
    details = []
    passed = True
    for name in ("equivocating-server", "inconsistent-share-client", "replaying-server"):
        cfg = ScenarioConfig(params=params, iterations=2, adversary=name, latency=LatencyModel.zero())
        injected = aborted = wrong = 0
        for k in range(scale.attack_runs):
            session = run_session(cfg.model_copy(update={"seed": k}))
            for record in session.records:
                if record.injected:
                    injected += 1
                    aborted += record.outcome != "ok"
                wrong += record.exact is False
        passed &= injected > 0 and aborted == injected and wrong == 0
        details.append(f"{name}: {aborted}/{injected} aborted, wrong={wrong}")
    return CheckResult("malicious_abort", passed, "; ".join(details))


def check_committee_tail(scale: Scale) -> CheckResult:
    bound = hypergeom_tail_bound(50, 1 / 3 - 0.02)
    return CheckResult("committee_tail", 2e-5 <= bound <= 5.5e-5, f"e^(-2d^2m) at m=50 = {bound:.3e}")


def check_defaults(scale: Scale) -> CheckResult:
    checks = verify_params(ProtocolParams.from_settings(get_settings()))
    failed = [c.name for c in checks if not c.passed]
    return CheckResult("default_params", report_ok(checks), f"failed={failed or 'none'}")


def _server_timing(n: int, seed_dim: int, repeats: int = 3) -> tuple[float, bool]:
    """n クライアント・L=1 の server_aggregate の最短時間（秒）と成否"""
    params = ProtocolParams(n=n, vec_len=1, seed_dim=seed_dim)
    rng = random.Random(n)
    clients = list(range(n))
    setup = setup_round(params, clients, rng, NullCipher())
    iteration = IterationId(0)
    messages = {i: encrypt_input(i, [rng.randrange(1 << 16)], params, iteration, setup, rng) for i in clients}
    replies = {0: [combine_for_group(0, j, clients, messages, params, iteration, setup) for j in range(1, params.m + 1)]}
    best = float("inf")
    ok = True
    for _ in range(repeats):
        start = time.perf_counter()
        result = server_aggregate(replies, tuple(clients), messages, params, iteration, setup.assignment)
        best = min(best, time.perf_counter() - start)
        ok &= result.ok
    return best, ok


def check_server_scaling(scale: Scale) -> CheckResult:
    """n を2倍にしてもサーバーの計算時間が4倍未満に収まるか。n=2·scaling_n の時間は報告のみ"""
    sizes = (scale.scaling_n, 2 * scale.scaling_n)
    records = []
    timings = []
    for k, n in enumerate(sizes):
        seconds, ok = _server_timing(n, scale.seed_dim)
        timings.append(seconds)
        records.append(
            MetricsRecord(iteration=k, outcome="ok" if ok else "abort", online=n, server_compute_ms=seconds * 1000)
        )
    ratio = timings[1] / timings[0] if timings[0] > 0 else 0.0
    out = emit_metrics(
        records,
        Path(get_settings().metrics_dir) / "server_scaling.json",
        config={"check": "server_scaling", "seed_dim": scale.seed_dim, "vec_len": 1, "sizes": list(sizes)},
    )
    all_ok = all(r.outcome == "ok" for r in records)
    return CheckResult(
        "server_scaling",
        all_ok and ratio < 4,
        f"server n={sizes[0]}: {timings[0] * 1000:.1f}ms, n={sizes[1]}: {timings[1] * 1000:.1f}ms, "
        f"ratio={ratio:.2f} (< 4); written to {out}",
    )


CHECKS: list[Callable[[Scale], CheckResult]] = [
    check_defaults,
    check_committee_tail,
    check_almost_homomorphism,
    check_dprf,
    check_scrape,
    check_lwr_exact,
    check_dropouts,
    check_lwe,
    check_prime,
    check_attacks,
    check_server_scaling,
]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="受け入れ検査")
    parser.add_argument("--full", action="store_true", help="本来の規模で実行する")
    parser.add_argument("--out", help="結果のJSONの出力先")
    args = parser.parse_args(argv)

    settings = get_settings()
    settings.configure_logging()
    console = Console()
    scale = FULL if args.full else QUICK

    console.print(f"=== 受け入れ検査（{'full' if args.full else 'quick'}） ===")
    results = []
    for check in CHECKS:
        start = time.perf_counter()
        result = check(scale)
        result.seconds = time.perf_counter() - start
        results.append(result)
        mark = "[green]pass[/green]" if result.passed else "[red]FAIL[/red]"
        console.print(f"  {result.name}: {mark} ({result.seconds:.1f}s)")

    table = Table(title="Acceptance", show_header=True, header_style="bold cyan")
    table.add_column("Check")
    table.add_column("Result", justify="center")
    table.add_column("Seconds", justify="right")
    table.add_column("Detail")
    for r in results:
        table.add_row(r.name, "[green]pass[/green]" if r.passed else "[red]FAIL[/red]", f"{r.seconds:.1f}", r.detail)
    console.print(table)

    out = Path(args.out) if args.out else Path(settings.metrics_dir) / "acceptance.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(
        json.dumps([asdict(r) for r in results], ensure_ascii=False, indent=2),
        encoding="utf-8",
    )
    console.print(f"[dim]results written to {out}[/dim]")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
