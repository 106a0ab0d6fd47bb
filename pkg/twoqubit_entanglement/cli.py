"""CLI for tq-entangle."""

import logging
import sys
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler

try:
    from typer._click.exceptions import UsageError
except ImportError:  # typer releases that depend on click directly
    from click.exceptions import UsageError

from . import config, criteria, entanglement, harness, states, utils
from .checks import CHECK_NAMES
from .errors import (
    EXIT_PIPELINE,
    EXIT_USAGE,
    ConfigError,
    EntanglementError,
    PipelineError,
    exit_code_for,
)
from .report import (
    AnalysisReport,
    emit_analysis,
    emit_campaign,
    emit_canonical,
    emit_fixture_written,
)

app = typer.Typer(help="Two-qubit entanglement: concurrence, PT determinant criterion, verification campaigns")

err_console = Console(stderr=True)
logger = logging.getLogger(__name__)

_state = {"debug": False}

FORMATS = ("console", "json")


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging"),
    debug: bool = typer.Option(False, help="Re-raise errors with a traceback"),
):
    """Two-qubit entanglement toolkit."""
    _state["debug"] = debug
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


def _fail(e: Exception) -> typer.Exit:
    err_console.print(f"[red]Error: {e}[/red]")
    if _state["debug"]:
        raise e
    return typer.Exit(exit_code_for(e))


def run_analyze(path: str, tol: config.Tolerances) -> AnalysisReport:
    """
    Full pipeline on one density-matrix document.

    Args:
        path: Density-matrix document
        tol: Effective tolerances

    Returns:
        AnalysisReport; closed-form fields stay None if canonicalization fails
    """
    rho, label = states.read_density_matrix(path)
    oracle = entanglement.concurrence_oracle(rho, tol.imag_tol, tol.clamp_floor)
    spec = criteria.pt_spectrum(rho, tol.signature_eps)
    verdict = criteria.verdict(rho, tol.eps_sep, tol.eps_c, concurrence=oracle.concurrence)

    summary = AnalysisReport(
        label=label,
        concurrence=oracle.concurrence,
        eof=entanglement.eof(oracle.concurrence).eof,
        etas=list(spec.etas),
        det_pt=spec.det_pt,
        signature=list(spec.signature),
        negativity=spec.negativity,
        verdict=verdict.status,
        agreement=verdict.agreement,
        tolerances=tol.as_dict(),
    )

    try:
        params, unitary = states.canonicalize(rho, tol.canon_tol)
        ferrari = entanglement.concurrence_ferrari(params, tol.ferrari_tol, tol.clamp_floor)
    except PipelineError as e:
        logger.warning("Closed-form path skipped: %s", e)
        return summary

    summary.concurrence_ferrari = ferrari.concurrence
    summary.branch_note = ferrari.branch_note
    summary.ferrari_degraded = ferrari.degraded
    if ferrari.degraded:
        logger.warning("rho * rho_tilde is near-singular; closed-form roots near zero were deflated")
    summary.D = entanglement.d_criterion(params)
    summary.canonical = params.as_dict()
    summary.residuals = {
        "canonicalization": states.canonicalization_residual(rho, params, unitary),
        "concurrence_paths": abs(ferrari.concurrence - oracle.concurrence),
        "det_pt_plus_D": abs(spec.det_pt + summary.D),
    }
    return summary


@app.command("analyze")
def analyze_cmd(
    input_path: str = typer.Option(..., "--input", "-i", help="Density-matrix document (JSON)"),
    fmt: str = typer.Option("console", "--format", help="Output format (console|json)"),
    eps_sep: Optional[float] = typer.Option(None, help="det(rho^PT) threshold [1e-10]"),
    eps_c: Optional[float] = typer.Option(None, help="Concurrence threshold [1e-8]"),
    ferrari_tol: Optional[float] = typer.Option(None, help="Imaginary-part gate of the quartic solver"),
    canon_tol: Optional[float] = typer.Option(None, help="Canonicalization residual gate [1e-9]"),
):
    """Analyze one two-qubit state."""
    try:
        if fmt not in FORMATS:
            raise ConfigError(f"Unknown format '{fmt}' (expected console or json)")
        tol = config.load_tolerances(
            eps_sep=eps_sep, eps_c=eps_c, ferrari_tol=ferrari_tol, canon_tol=canon_tol
        )
        emit_analysis(run_analyze(input_path, tol), fmt)
    except EntanglementError as e:
        raise _fail(e)


def _scan_flag_errors(
    ensemble: Optional[str],
    checks: Optional[str],
    trials: Optional[int],
    workers: Optional[int],
    fmt: str = "console",
) -> list[str]:
    errors = []
    if fmt not in FORMATS:
        errors.append(f"--format: unknown format '{fmt}' (expected console or json)")
    if ensemble is not None and ensemble not in config.ENSEMBLES:
        errors.append(f"--ensemble: unknown ensemble '{ensemble}'")
    if checks is not None:
        unknown = [c for c in utils.split_list(checks) if c not in CHECK_NAMES]
        if unknown:
            errors.append(f"--checks: unknown check(s) {', '.join(unknown)}")
    if trials is not None and trials < 1:
        errors.append("--trials: must be >= 1")
    if workers is not None and workers < 1:
        errors.append("--workers: must be >= 1")
    return errors


@app.command("scan")
def scan_cmd(
    ensemble: Optional[str] = typer.Option(None, help="ginibre-rank-1..4, haar-pure, canonical-uniform, convex-combo, x-state"),
    trials: Optional[int] = typer.Option(None, help="Number of draws"),
    seed: Optional[int] = typer.Option(None, help="Master seed"),
    checks: Optional[str] = typer.Option(None, help="Comma list of checks"),
    eps_sep: Optional[float] = typer.Option(None, help="det(rho^PT) threshold [1e-10]"),
    eps_c: Optional[float] = typer.Option(None, help="Concurrence threshold [1e-8]"),
    ferrari_tol: Optional[float] = typer.Option(None, help="Imaginary-part gate of the quartic solver"),
    output: Optional[str] = typer.Option(None, help="Write the JSON report here"),
    csv_path: Optional[str] = typer.Option(None, "--csv", help="Write per-draw scalars as CSV"),
    workers: Optional[int] = typer.Option(None, help="Worker processes"),
    config_file: Optional[str] = typer.Option(None, "--config", help="YAML campaign config"),
    fmt: str = typer.Option("console", "--format", help="Output format (console|json)"),
):
    """Run a randomized verification campaign."""
    try:
        errors = _scan_flag_errors(ensemble, checks, trials, workers, fmt)
        if errors:
            raise ConfigError("Invalid flags:\n  " + "\n  ".join(errors))
        cfg = config.load_campaign(
            config_file,
            ensemble=ensemble,
            trials=trials,
            seed=seed,
            checks=checks,
            workers=workers,
            tolerances={"eps_sep": eps_sep, "eps_c": eps_c, "ferrari_tol": ferrari_tol},
        )
        report = harness.run_campaign(cfg, csv_path=csv_path)
    except EntanglementError as e:
        raise _fail(e)

    if output:
        utils.write_json(output, report.as_dict())
    if fmt == "json":
        print(utils.to_json(report.as_dict()))
    else:
        emit_campaign(report)
    if report.failed:
        raise typer.Exit(EXIT_PIPELINE)


@app.command("canonicalize")
def canonicalize_cmd(
    input_path: str = typer.Option(..., "--input", "-i", help="Density-matrix document (JSON)"),
    canon_tol: Optional[float] = typer.Option(None, help="Residual gate [1e-9]"),
    fmt: str = typer.Option("console", "--format", help="Output format (console|json)"),
):
    """Bring a state to canonical form with local unitaries."""
    try:
        if fmt not in FORMATS:
            raise ConfigError(f"Unknown format '{fmt}' (expected console or json)")
        tol = config.load_tolerances(canon_tol=canon_tol)
        rho, label = states.read_density_matrix(input_path)
        params, unitary = states.canonicalize(rho, tol.canon_tol)
        residual = states.canonicalization_residual(rho, params, unitary)
    except EntanglementError as e:
        raise _fail(e)

    doc = {
        "label": label,
        "params": params.as_dict(),
        "ua": utils.matrix_rows(unitary.ua),
        "ub": utils.matrix_rows(unitary.ub),
        "residual": residual,
        "D": entanglement.d_criterion(params),
    }
    emit_canonical(doc, fmt)


@app.command("reproduce")
def reproduce_cmd(
    seed: int = typer.Option(..., help="Master seed of the campaign"),
    index: int = typer.Option(..., help="Draw index"),
    check: str = typer.Option(..., help="Check name"),
    ensemble: str = typer.Option("ginibre-rank-4", help="Ensemble of the campaign"),
    output: Optional[str] = typer.Option(None, help="Write the trace here"),
):
    """Re-derive one campaign draw and print every intermediate."""
    try:
        trace = harness.reproduce(seed, index, check, ensemble)
    except EntanglementError as e:
        raise _fail(e)
    if output:
        utils.write_json(output, trace)
    else:
        print(utils.to_json(trace))


@app.command("fixture")
def fixture_cmd(
    name: str = typer.Argument(..., help="bell, maximally-mixed, product or werner"),
    p: Optional[float] = typer.Option(None, help="Werner mixing weight"),
    label: Optional[str] = typer.Option(None, help="Label stored in the document"),
    output: Optional[str] = typer.Option(None, help="Output file path"),
):
    """Write a named fixture as a density-matrix document."""
    try:
        rho = states.fixture(name, p)
    except EntanglementError as e:
        raise _fail(e)
    doc = states.density_document(rho, label or name)
    if output:
        utils.write_json(output, doc)
        emit_fixture_written(name, output)
    else:
        print(utils.to_json(doc))


def main():
    """Main entry point; usage errors exit with 64."""
    try:
        rv = app(standalone_mode=False)
    except UsageError as e:
        e.show()
        sys.exit(EXIT_USAGE)
    except typer.Abort:
        sys.exit(1)
    sys.exit(rv or 0)


if __name__ == "__main__":
    main()
