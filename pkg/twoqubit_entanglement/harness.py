"""Randomized verification campaigns."""

import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from . import criteria, entanglement, matcore, quartic, states, utils
from .checks import BOUNDARY_CHECKS, CHECKS, CheckResult, DrawContext, validate_checks
from .config import CampaignConfig, Tolerances
from .errors import BoundaryExcess, EntanglementError
from .sampling import draw_for

logger = logging.getLogger(__name__)

WORST_KEEP = 5
CSV_FIELDS = ["index", "concurrence", "det_pt", "D", "eta1", "eta2", "eta3", "eta4", "verdict"]


@dataclass
class WorstCase:
    residual: Optional[float]
    seed: int
    index: int
    status: str
    message: str = ""


@dataclass
class CheckTally:
    """Per-check counts over a campaign; passed + failed + boundary == trials."""

    check: str
    passed: int = 0
    failed: int = 0
    boundary: int = 0
    worst: list[WorstCase] = field(default_factory=list)
    notes: dict[str, int] = field(default_factory=dict)

    def add(self, result: CheckResult, seed: int, index: int) -> None:
        if result.status == "pass":
            self.passed += 1
        elif result.status == "boundary":
            self.boundary += 1
        else:
            self.failed += 1
        notes = result.meta.get("note") or []
        for note in [notes] if isinstance(notes, str) else notes:
            self.notes[note] = self.notes.get(note, 0) + 1
        self.worst.append(WorstCase(result.residual, seed, index, result.status, result.message))
        self.worst.sort(key=_worst_key)
        del self.worst[WORST_KEEP:]


def _worst_key(case: WorstCase) -> tuple[int, float, int]:
    # failures first, then the largest residuals; None means "no residual available"
    failed = 0 if case.status == "fail" else 1
    residual = float("inf") if case.residual is None else case.residual
    return failed, -residual, case.index


@dataclass
class CampaignReport:
    config: dict[str, Any]
    checks: dict[str, CheckTally]
    alarms: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def failed(self) -> bool:
        return bool(self.alarms) or any(t.failed for t in self.checks.values())

    def body(self) -> dict[str, Any]:
        """Everything but the wall time; identical for identical configs."""
        return {
            "config": self.config,
            "checks": {name: asdict(tally) for name, tally in self.checks.items()},
            "alarms": list(self.alarms),
            "failed": self.failed,
        }

    def as_dict(self) -> dict[str, Any]:
        return {**self.body(), "wall_time": self.wall_time}


@dataclass
class DrawOutcome:
    index: int
    results: list[CheckResult]
    row: Optional[dict[str, Any]] = None


def _run_check(name: str, ctx: DrawContext) -> CheckResult:
    try:
        return CHECKS[name](ctx)
    except EntanglementError as e:
        return CheckResult(name, "fail", e.residual, f"{type(e).__name__}: {e}")


def csv_row(ctx: DrawContext) -> dict[str, Any]:
    """Per-draw scalars for the flat CSV output."""
    row: dict[str, Any] = {"index": ctx.index}
    try:
        spec = ctx.pt
        row.update({f"eta{k + 1}": eta for k, eta in enumerate(spec.etas)})
        row["det_pt"] = spec.det_pt
        row["concurrence"] = ctx.oracle.concurrence
        row["verdict"] = ctx.verdict().status
        row["D"] = entanglement.d_criterion(ctx.canonical)
    except EntanglementError as e:
        logger.debug("Draw %d: CSV row incomplete (%s)", ctx.index, e)
    return row


def evaluate_draw(cfg: CampaignConfig, index: int, with_row: bool = False) -> DrawOutcome:
    """Run every configured check on the index-th draw."""
    draw = draw_for(cfg.seed, index, cfg.ensemble, cfg.max_rejections)
    ctx = DrawContext(draw, cfg.tolerances, cfg.seed, index)
    results = [_run_check(name, ctx) for name in cfg.checks]
    return DrawOutcome(index, results, csv_row(ctx) if with_row else None)


def _evaluate_task(args: tuple[CampaignConfig, int, bool]) -> DrawOutcome:
    return evaluate_draw(*args)


def run_campaign(cfg: CampaignConfig, csv_path: Optional[str] = None) -> CampaignReport:
    """
    Run cfg.trials draws through the configured checks.

    Args:
        cfg: Campaign configuration
        csv_path: Optional path for a flat CSV of per-draw scalars

    Returns:
        CampaignReport; report.failed is True if any check failed or an alarm fired

    Raises:
        UnknownCheck, IncompatibleCheck: Before any draw
        RejectionExhausted: If a sampler gives up
    """
    validate_checks(cfg.checks, cfg.ensemble)
    logger.info(
        "Campaign: %d draws of %s, seed %d, checks %s",
        cfg.trials,
        cfg.ensemble,
        cfg.seed,
        ", ".join(cfg.checks),
    )
    start = time.perf_counter()
    with_row = csv_path is not None
    tasks = [(cfg, index, with_row) for index in range(cfg.trials)]

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map() yields in submission order, so the merge below is index-ordered
            outcomes = list(pool.map(_evaluate_task, tasks, chunksize=max(1, cfg.trials // (4 * cfg.workers))))
    else:
        outcomes = [_evaluate_task(task) for task in tasks]

    tallies = {name: CheckTally(name) for name in cfg.checks}
    rows = []
    for outcome in outcomes:
        for result in outcome.results:
            tallies[result.check].add(result, cfg.seed, outcome.index)
        if outcome.row is not None:
            rows.append(outcome.row)

    report = CampaignReport(config=cfg.echo(), checks=tallies)
    for name in BOUNDARY_CHECKS:
        tally = tallies.get(name)
        if tally is None:
            continue
        fraction = tally.boundary / cfg.trials
        if fraction > cfg.boundary_limit:
            alarm = BoundaryExcess(
                f"{name}: {tally.boundary} of {cfg.trials} draws in the boundary band",
                residual=fraction,
                limit=cfg.boundary_limit,
            )
            logger.warning("%s", alarm)
            report.alarms.append(f"BoundaryExcess: {alarm}")

    if csv_path is not None:
        write_csv(csv_path, rows)
    report.wall_time = time.perf_counter() - start
    for name, tally in tallies.items():
        logger.info("%s: %d pass, %d fail, %d boundary", name, tally.passed, tally.failed, tally.boundary)
    return report


def write_csv(path: str, rows: list[dict[str, Any]]) -> None:
    with utils.open_for_writing(path, newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS, restval="")
        writer.writeheader()
        writer.writerows(rows)


def trace_state(rho: states.DensityMatrix, tol: Optional[Tolerances] = None) -> dict[str, Any]:
    """
    Every intermediate of the pipeline for one state.

    Stages that fail record their error under "errors" instead of aborting
    the trace.
    """
    tol = tol or Tolerances()
    trace: dict[str, Any] = {"matrix": utils.matrix_rows(rho.mat), "errors": {}}

    try:
        oracle = entanglement.concurrence_oracle(rho, tol.imag_tol, tol.clamp_floor)
        trace["lambdas_oracle"] = list(oracle.lambdas)
        trace["concurrence"] = oracle.concurrence
        trace["eof"] = entanglement.eof(oracle.concurrence).eof
    except EntanglementError as e:
        trace["errors"]["oracle"] = str(e)

    spec = criteria.pt_spectrum(rho, tol.signature_eps)
    trace["etas"] = list(spec.etas)
    trace["det_pt"] = spec.det_pt
    trace["signature"] = list(spec.signature)
    trace["negativity"] = spec.negativity

    try:
        params, unitary = states.canonicalize(rho, tol.canon_tol)
        trace["canonical"] = params.as_dict()
        trace["local_unitary"] = {"ua": unitary.ua, "ub": unitary.ub}
        trace["canonical_residual"] = states.canonicalization_residual(rho, params, unitary)
        trace["det_rho"] = states.det_canonical(params)
        trace["D"] = entanglement.d_criterion(params)

        coeffs = quartic.coeffs_from_canonical(params)
        trace["f"] = [coeffs.f1, coeffs.f2, coeffs.f3, coeffs.f4]
        d = quartic.depressed_from_canonical(params)
        trace["delta"] = d.delta
        trace["abc"] = [d.a, d.b, d.c]
        f = quartic.ferrari_solve(d, tol.ferrari_tol)
        trace["ferrari"] = {"P": f.P, "Q": f.Q, "R": f.R, "S": f.S, "T": f.T, "branch": f.branch}
        trace["x"] = list(f.x)
        trace["lambdas_ferrari"] = list(f.lambdas(d.delta))
        ferrari = entanglement.concurrence_ferrari(params, tol.ferrari_tol, tol.clamp_floor)
        trace["concurrence_ferrari"] = ferrari.concurrence
        trace["branch_note"] = ferrari.branch_note
        trace["ferrari_degraded"] = ferrari.degraded
    except EntanglementError as e:
        trace["errors"]["canonical"] = str(e)

    try:
        trace["verdict"] = criteria.verdict(rho, tol.eps_sep, tol.eps_c).status
    except EntanglementError as e:
        trace["errors"]["verdict"] = str(e)
    trace["det_rho_cofactor"] = matcore.det4(rho.mat).real
    return trace


def reproduce(
    seed: int,
    index: int,
    check: str,
    ensemble: str = "ginibre-rank-4",
    tol: Optional[Tolerances] = None,
    max_rejections: int = 10000,
) -> dict[str, Any]:
    """
    Regenerate one campaign draw and trace it.

    Raises:
        UnknownCheck: If check is not registered
    """
    tol = tol or Tolerances()
    validate_checks([check], ensemble)
    draw = draw_for(seed, index, ensemble, max_rejections)
    ctx = DrawContext(draw, tol, seed, index)
    result = _run_check(check, ctx)
    trace = trace_state(draw.rho, tol)
    trace.update(
        {
            "seed": seed,
            "index": index,
            "ensemble": ensemble,
            "check": asdict(result),
        }
    )
    if draw.pure is not None:
        trace["pure_params"] = asdict(draw.pure)
    if draw.combo is not None:
        trace["convex"] = {"p": draw.combo.p, "X": draw.combo.x_term, "Y": draw.combo.y_term}
    return trace
