"""コマンドラインインターフェース

    python -m src.sim.cli run --clients 100 --vec-len 16 --iters 3
    python -m src.sim.cli verify-params --committee 50 --recon 34 --pack 16
    python -m src.sim.cli bench --adversary equivocating-server --runs 20

終了コード: 0 成功、1 誤った集約値を検出（bench）、2 パラメータ検査の失敗、3 全反復が中断
"""

import argparse
import logging
import sys
from collections.abc import Sequence

from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from src.config.settings import get_settings
from src.errors import ParameterError
from src.protocol.params import Mode, ProtocolParams, Security
from src.sim.adversary import ADVERSARIES
from src.sim.latency import LatencyModel
from src.sim.metrics import MetricsFormat
from src.sim.report import metrics_table, print_rules, report_ok, verify_params
from src.sim.session import ScenarioConfig, run_session, single_send_violations

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_WRONG_AGGREGATE = 1
EXIT_PARAMETER = 2
EXIT_ALL_ABORTED = 3


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="シナリオJSONのパス（他のフラグで上書き）")
    parser.add_argument("--mode", choices=[m.value for m in Mode])
    parser.add_argument("--security", choices=[s.value for s in Security])
    parser.add_argument("--clients", type=int, help="クライアント数 n")
    parser.add_argument("--universe", type=int, help="全体のクライアント数 N")
    parser.add_argument("--committee", type=int, help="委員会サイズ m")
    parser.add_argument("--groups", type=int, help="委員会グループ数 M")
    parser.add_argument("--recon", type=int, help="再構成閾値 r")
    parser.add_argument("--corrupt-thresh", type=int, help="汚染閾値 t")
    parser.add_argument("--pack", type=int, help="パッキング係数 rho")
    parser.add_argument("--vec-len", type=int, help="入力ベクトル長 L")
    parser.add_argument("--seed-dim", type=int, help="シード次元 lambda")
    parser.add_argument("--dropout", type=float, help="クライアントの脱落率（予算と注入の両方）")
    parser.add_argument("--committee-dropout", type=float, help="委員会の脱落率の予算 delta_C")
    parser.add_argument("--member-dropout", type=int, help="各反復で脱落させるメンバー数")
    parser.add_argument("--hash-twist", action="store_true", default=None, help="モデルのハッシュで A を調整する")


def _add_run(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--iters", type=int, help="反復回数")
    parser.add_argument("--seed", type=int, help="乱数シード")
    parser.add_argument("--input-bits", type=int, help="入力のビット数")
    parser.add_argument("--latency-min-us", type=float)
    parser.add_argument("--latency-max-us", type=float)
    parser.add_argument("--jitter", type=float)
    parser.add_argument("--out", help="計測値の出力先")
    parser.add_argument("--format", choices=[f.value for f in MetricsFormat])
    parser.add_argument("--null-cipher", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="opa-sim", description="One-shot private aggregation simulator")
    parser.add_argument("--log-level", help="ログレベル（既定は Settings.log_level）")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="セッションを実行して計測値を出力する")
    _add_common(run)
    _add_run(run)

    verify = sub.add_parser("verify-params", help="パラメータの条件を検査する")
    _add_common(verify)

    bench = sub.add_parser("bench", help="シード違いのセッションを繰り返す（故障注入を含む）")
    _add_common(bench)
    _add_run(bench)
    bench.add_argument("--adversary", choices=sorted(ADVERSARIES), default="honest")
    bench.add_argument("--runs", type=int, default=10, help="セッション数")
    return parser


_PARAM_FLAGS = {
    "mode": "mode",
    "security": "security",
    "clients": "n",
    "universe": "universe",
    "committee": "m",
    "groups": "groups",
    "recon": "r",
    "corrupt_thresh": "t",
    "pack": "rho",
    "vec_len": "vec_len",
    "seed_dim": "seed_dim",
    "dropout": "dropout",
    "committee_dropout": "committee_dropout",
    "hash_twist": "hash_twist",
}


def build_scenario(args: argparse.Namespace) -> ScenarioConfig:
    """フラグと（あれば）シナリオJSONから ScenarioConfig を作る"""
    settings = get_settings()
    overrides = {
        field: getattr(args, flag)
        for flag, field in _PARAM_FLAGS.items()
        if getattr(args, flag, None) is not None
    }
    if args.config:
        base = ScenarioConfig.load(args.config)
        params = base.params.model_copy(update=overrides)
        params = ProtocolParams.model_validate(params.model_dump())
    else:
        base = ScenarioConfig(
            latency=LatencyModel.from_settings(settings),
            null_cipher=settings.null_cipher,
        )
        params = ProtocolParams.from_settings(settings, **overrides)

    update = {"params": params}
    if getattr(args, "dropout", None) is not None:
        update["client_dropout"] = args.dropout
    for flag, field in [
        ("member_dropout", "member_dropout"),
        ("iters", "iterations"),
        ("seed", "seed"),
        ("input_bits", "input_bits"),
        ("out", "output"),
        ("format", "metrics_format"),
        ("null_cipher", "null_cipher"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            update[field] = value
    latency = base.latency.model_dump()
    for flag, field in [
        ("latency_min_us", "base_min_us"),
        ("latency_max_us", "base_max_us"),
        ("jitter", "jitter_fraction"),
    ]:
        value = getattr(args, flag, None)
        if value is not None:
            latency[field] = value
    update["latency"] = LatencyModel.model_validate(latency)
    return ScenarioConfig.model_validate({**base.model_dump(), **update})


def cmd_verify(args: argparse.Namespace, console: Console) -> int:
    cfg = build_scenario(args)
    checks = verify_params(cfg.params)
    print_rules(checks, console)
    return EXIT_OK if report_ok(checks) else EXIT_PARAMETER


def cmd_run(args: argparse.Namespace, console: Console) -> int:
    cfg = build_scenario(args)
    session = run_session(cfg)
    console.print(metrics_table(session.records))
    if cfg.output:
        console.print(f"[dim]metrics written to {cfg.output}[/dim]")
    return EXIT_ALL_ABORTED if session.all_aborted else EXIT_OK


def cmd_bench(args: argparse.Namespace, console: Console) -> int:
    cfg = build_scenario(args)
    if args.adversary != "honest":
        cfg = cfg.model_copy(
            update={
                "adversary": args.adversary,
                "params": cfg.params.model_copy(update={"security": Security.ACTIVE_ABORT}),
            }
        )
    table = Table(title=f"bench: {cfg.adversary}", show_header=True, header_style="bold cyan")
    for name in ("Run", "Iterations", "Exact", "Aborted", "Injected", "Wrong", "Single-send"):
        table.add_column(name, justify="right")

    wrong_total = 0
    aborted_total = 0
    iterations_total = 0
    for k in range(args.runs):
        session = run_session(cfg.model_copy(update={"seed": cfg.seed + k, "output": None}))
        exact = sum(1 for r in session.records if r.exact)
        wrong = sum(1 for r in session.records if r.exact is False)
        aborted = sum(1 for r in session.records if r.outcome != "ok")
        injected = sum(1 for r in session.records if r.injected)
        violations = single_send_violations(session.transcript)
        wrong_total += wrong
        aborted_total += aborted
        iterations_total += len(session.records)
        table.add_row(
            str(k),
            str(len(session.records)),
            str(exact),
            str(aborted),
            str(injected),
            f"[red]{wrong}[/red]" if wrong else "0",
            "ok" if not violations else f"[red]{len(violations)}[/red]",
        )
    console.print(table)
    if wrong_total:
        return EXIT_WRONG_AGGREGATE
    if iterations_total and aborted_total == iterations_total and cfg.adversary == "honest":
        return EXIT_ALL_ABORTED
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    if args.log_level:
        settings = settings.model_copy(update={"log_level": args.log_level})
    settings.configure_logging()
    console = Console()
    commands = {"run": cmd_run, "verify-params": cmd_verify, "bench": cmd_bench}
    try:
        return commands[args.command](args, console)
    except (ParameterError, ValidationError) as exc:
        logger.warning("parameter validation failed: %s", exc)
        console.print(f"[red]parameter error:[/red] {exc}")
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
