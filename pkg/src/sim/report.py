"""パラメータ検査とセッション結果の表示"""

from collections.abc import Sequence

from rich.console import Console
from rich.table import Table

from src.protocol.params import ProtocolParams, RuleCheck
from src.sim.metrics import MetricsRecord


def verify_params(params: ProtocolParams) -> list[RuleCheck]:
    """全ての条件を評価する（失敗も例外にせずリストに含める）"""
    return params.rules()


def report_ok(checks: Sequence[RuleCheck]) -> bool:
    return all(c.passed or c.severity == "warning" for c in checks)


def rules_table(checks: Sequence[RuleCheck], title: str = "Parameter rules") -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("Rule")
    table.add_column("Result", justify="center")
    table.add_column("Detail")
    for check in checks:
        if check.passed:
            mark = "[green]pass[/green]"
        elif check.severity == "warning":
            mark = "[yellow]warn[/yellow]"
        else:
            mark = "[red]FAIL[/red]"
        table.add_row(check.name, mark, check.detail)
    return table


def metrics_table(records: Sequence[MetricsRecord], title: str = "Iterations") -> Table:
    table = Table(title=title, show_header=True, header_style="bold cyan")
    for name, justify in [
        ("Iter", "right"),
        ("Outcome", "left"),
        ("|C|", "right"),
        ("Client ms", "right"),
        ("Member ms", "right"),
        ("Server ms", "right"),
        ("Done (us)", "right"),
        ("Bytes", "right"),
        ("Exact", "center"),
    ]:
        table.add_column(name, justify=justify)
    for r in records:
        color = "green" if r.outcome == "ok" else "yellow"
        exact = "-" if r.exact is None else ("[green]yes[/green]" if r.exact else "[red]NO[/red]")
        table.add_row(
            str(r.iteration),
            f"[{color}]{r.outcome}[/{color}]",
            str(r.online),
            f"{r.client_compute_ms:.2f}",
            f"{r.member_compute_ms:.2f}",
            f"{r.server_compute_ms:.2f}",
            f"{r.completion_us:.0f}",
            str(r.bytes_sent),
            exact,
        )
    return table


def print_rules(checks: Sequence[RuleCheck], console: Console | None = None) -> None:
    (console or Console()).print(rules_table(checks))
