"""Output formatting and reporting."""

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Optional

from rich.console import Console
from rich.table import Table

from . import utils
from .harness import CampaignReport

console = Console()

VERDICT_STYLE = {
    "inseparable": ("red", "✖"),
    "boundary": ("yellow", "⚠"),
    "separable": ("green", "✓"),
}


@dataclass
class AnalysisReport:
    """Everything the analyze command learns about one state."""

    label: Optional[str]
    concurrence: float
    eof: float
    etas: list[float]
    det_pt: float
    signature: list[int]
    negativity: float
    verdict: str
    agreement: bool
    concurrence_ferrari: Optional[float] = None
    branch_note: Optional[str] = None
    ferrari_degraded: Optional[bool] = None
    D: Optional[float] = None
    canonical: Optional[dict[str, float]] = None
    residuals: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, Optional[float]] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "AnalysisReport":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in known})


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.12g}"


def emit_analysis(summary: AnalysisReport, fmt: str) -> None:
    """
    Output an analysis report.

    Args:
        summary: Analysis results
        fmt: Output format ("json" or "console")
    """
    if fmt == "json":
        print(utils.to_json(summary.as_dict()))
        return

    title = f"State Analysis: {summary.label}" if summary.label else "State Analysis"
    console.print(f"\n[bold cyan]{title}[/bold cyan]\n")

    table = Table(show_header=False, box=None)
    table.add_column("Metric", style="cyan")
    table.add_column("Value")

    color, icon = VERDICT_STYLE.get(summary.verdict, ("white", "•"))
    table.add_row("Verdict", f"[{color}]{icon}[/{color}] {summary.verdict}")
    agree = "[green]yes[/green]" if summary.agreement else "[yellow]no[/yellow]"
    table.add_row("Criteria agree", agree)
    table.add_row("Concurrence", _fmt(summary.concurrence))
    if summary.concurrence_ferrari is not None:
        note = summary.branch_note + (", degraded" if summary.ferrari_degraded else "")
        table.add_row(
            "Concurrence (closed form)", f"{_fmt(summary.concurrence_ferrari)} [dim]({note})[/dim]"
        )
    table.add_row("EoF", _fmt(summary.eof))
    table.add_row("det(rho^PT)", _fmt(summary.det_pt))
    table.add_row("D", _fmt(summary.D))
    table.add_row("PT eigenvalues", ", ".join(_fmt(e) for e in summary.etas))
    table.add_row("PT signature", "(%d, %d, %d)" % tuple(summary.signature))
    table.add_row("Negativity", _fmt(summary.negativity))
    for name, value in summary.residuals.items():
        table.add_row(f"[dim]{name}[/dim]", f"[dim]{value:.3e}[/dim]")
    console.print(table)
    console.print()


def emit_campaign(report: CampaignReport) -> None:
    """Rich table of per-check counts and the worst residual of each check."""
    cfg = report.config
    console.print(
        f"\n[bold cyan]Campaign[/bold cyan] [dim]{cfg['ensemble']}, "
        f"{cfg['trials']} draws, seed {cfg['seed']}[/dim]\n"
    )
    table = Table()
    table.add_column("Check", style="cyan")
    table.add_column("Pass", justify="right", style="green")
    table.add_column("Fail", justify="right", style="red")
    table.add_column("Boundary", justify="right", style="yellow")
    table.add_column("Worst residual", justify="right")
    table.add_column("Draw", justify="right", style="dim")
    table.add_column("Notes", style="dim")
    for name, tally in report.checks.items():
        worst = tally.worst[0] if tally.worst else None
        table.add_row(
            name,
            str(tally.passed),
            str(tally.failed),
            str(tally.boundary),
            "-" if worst is None or worst.residual is None else f"{worst.residual:.3e}",
            "-" if worst is None else str(worst.index),
            ", ".join(f"{k}={v}" for k, v in sorted(tally.notes.items())),
        )
    console.print(table)

    for alarm in report.alarms:
        console.print(f"[red]✖ {alarm}[/red]")
    if report.failed:
        console.print("\n[red]✖ Campaign failed[/red]")
    else:
        console.print("\n[green]✓ All checks passed[/green]")
    console.print(f"[dim]{report.wall_time:.2f}s[/dim]\n")


def _section(title: str, rows: list[tuple[str, str]]) -> None:
    console.print(f"\n[bold cyan]{title}[/bold cyan]\n")
    table = Table(show_header=False, box=None)
    table.add_column("Field", style="cyan")
    table.add_column("Value", style="yellow")
    for name, value in rows:
        table.add_row(name, value)
    console.print(table)
    console.print()


def emit_canonical(doc: dict[str, Any], fmt: str) -> None:
    """Output the canonicalize result: parameters, local unitaries, residual and D."""
    if fmt == "json":
        print(utils.to_json(doc))
        return
    title = f"Canonical form: {doc['label']}" if doc.get("label") else "Canonical form"
    _section(title, [(k, _fmt(v)) for k, v in doc["params"].items()])
    _section(
        "Local unitary",
        [
            ("ua", str(doc["ua"])),
            ("ub", str(doc["ub"])),
            ("residual", f"{doc['residual']:.3e}"),
            ("D", _fmt(doc["D"])),
        ],
    )


def emit_fixture_written(name: str, path: str) -> None:
    console.print(f"[green]✓[/green] Fixture [cyan]{name}[/cyan] written to {path}")
