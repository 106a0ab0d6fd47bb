"""Verification checks run per draw by the campaign harness."""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Literal, Optional

import numpy as np

from . import criteria, entanglement, matcore, quartic, states
from .config import Tolerances
from .errors import (
    ComplexResidual,
    CriteriaDisagreement,
    DegeneratePivot,
    IncompatibleCheck,
    UnknownCheck,
)
from .sampling import Draw, random_local_unitary

logger = logging.getLogger(__name__)

Status = Literal["pass", "fail", "boundary"]

PURE_ENSEMBLES = ("haar-pure", "ginibre-rank-1")
DET_FLOOR = 1e-3  # absolute floor for relative determinant comparisons
VIETA_RTOL = 1e-8


@dataclass
class CheckResult:
    """Outcome of one check on one draw."""

    check: str
    status: Status
    residual: Optional[float] = None
    message: str = ""
    meta: dict[str, Any] = field(default_factory=dict)


class DrawContext:
    """One draw plus lazily computed quantities shared between checks."""

    def __init__(self, draw: Draw, tol: Tolerances, seed: int, index: int):
        self.draw = draw
        self.tol = tol
        self.seed = seed
        self.index = index

    @property
    def rho(self) -> states.DensityMatrix:
        return self.draw.rho

    def rng(self, check: str) -> np.random.Generator:
        """Generator for a check's own randomness, independent of check order."""
        return np.random.default_rng([self.seed, self.index, 1 + CHECK_NAMES.index(check)])

    @cached_property
    def canonical(self) -> states.CanonicalParams:
        if self.draw.canonical is not None:
            return self.draw.canonical
        params, _ = states.canonicalize(self.rho, self.tol.canon_tol)
        return params

    @cached_property
    def oracle(self) -> entanglement.ConcurrenceResult:
        return entanglement.concurrence_oracle(self.rho, self.tol.imag_tol, self.tol.clamp_floor)

    @cached_property
    def pt(self) -> criteria.PTSpectrum:
        return criteria.pt_spectrum(self.rho, self.tol.signature_eps)

    def verdict(self) -> criteria.Verdict:
        return criteria.verdict(
            self.rho, self.tol.eps_sep, self.tol.eps_c, concurrence=self.oracle.concurrence
        )


def _rel(a: float, b: float, floor: float = DET_FLOOR) -> float:
    return abs(a - b) / max(abs(b), floor)


def _gate(check: str, residual: float, limit: float, **meta: Any) -> CheckResult:
    if residual <= limit:
        return CheckResult(check, "pass", residual, meta=meta)
    return CheckResult(check, "fail", residual, f"residual {residual:.3e} > {limit:.1e}", meta)


def check_equivalence(ctx: DrawContext) -> CheckResult:
    """Sign of det(rho^PT) against C > eps_c."""
    try:
        v = ctx.verdict()
    except CriteriaDisagreement as e:
        return CheckResult("equivalence", "fail", None, str(e))
    meta = {"det_pt": v.det_pt, "concurrence": v.concurrence, "verdict": v.status}
    if v.status == criteria.BOUNDARY:
        return CheckResult("equivalence", "boundary", abs(v.det_pt), meta=meta)
    if not v.agreement:
        return CheckResult("equivalence", "fail", abs(v.det_pt), "criteria disagree", meta)
    return CheckResult("equivalence", "pass", 0.0, meta=meta)


def check_signature(ctx: DrawContext) -> CheckResult:
    """At most one negative PT eigenvalue; inseparable states have signature (3, 0, 1)."""
    eps = ctx.tol.signature_eps
    spec = ctx.pt
    n_pos, n_zero, n_neg = spec.signature
    meta = {"signature": list(spec.signature), "det_pt": spec.det_pt}
    if n_neg >= 2:
        return CheckResult("signature", "fail", -spec.etas[-2], "two negative PT eigenvalues", meta)
    if spec.det_pt < -eps:
        smallest = min(abs(e) for e in spec.etas)
        meta["note"] = "inseparable"
        if spec.signature != (3, 0, 1) or smallest <= eps:
            return CheckResult(
                "signature", "fail", smallest, f"inseparable state has signature {spec.signature}", meta
            )
    return CheckResult("signature", "pass", 0.0, meta=meta)


def check_eq24_det(ctx: DrawContext) -> CheckResult:
    """Closed-form determinant of the canonical matrix against cofactor expansion."""
    p = ctx.canonical
    det = matcore.det4(states.canonical_matrix(p)).real
    closed = states.det_canonical(p)
    return _gate("eq24-det", _rel(closed, det), ctx.tol.det_rtol, det=det)


def check_eq41_identity(ctx: DrawContext) -> CheckResult:
    """Quartic-side expression at x = -delta/4 against det(rho)^2, with det(rho) >= 0."""
    p = ctx.canonical
    lhs, rhs = quartic.det_identity_check(p)
    det = matcore.det4(states.canonical_matrix(p)).real
    if det < -1e-12:
        return CheckResult("eq41-identity", "fail", -det, "det(rho) is negative")
    return _gate("eq41-identity", abs(lhs - rhs) / (1.0 + rhs), ctx.tol.identity_rtol, lhs=lhs, rhs=rhs)


def check_eq45_dpt(ctx: DrawContext) -> CheckResult:
    """det(rho^PT) of the canonical matrix against -D."""
    p = ctx.canonical
    det_pt = matcore.det4(criteria.partial_transpose_b(states.canonical_matrix(p))).real
    d = entanglement.d_criterion(p)
    return _gate("eq45-dpt", _rel(det_pt, -d), ctx.tol.det_rtol, det_pt=det_pt, D=d)


def check_eq6_eq7_pure(ctx: DrawContext) -> CheckResult:
    """Pure-state concurrence four ways, and the marginal spectrum."""
    draw = ctx.draw
    c_closed = states.pure_concurrence(draw.pure)
    c_overlap = entanglement.pure_overlap_concurrence(draw.ket)
    c_oracle = ctx.oracle.concurrence
    marginal = np.sort(np.linalg.eigvalsh(states.reduced_a(draw.ket)))[::-1]
    expected = np.array(states.marginal_eigenvalues(c_closed))
    residual = max(
        abs(c_closed - c_oracle),
        abs(c_closed - c_overlap),
        float(np.max(np.abs(marginal - expected))),
    )
    return _gate("eq6-eq7-pure", residual, ctx.tol.identity_rtol, concurrence=c_closed)


def check_eq8_pure_pt(ctx: DrawContext) -> CheckResult:
    """Closed-form PT eigenvalues of a pure state against the PT spectrum."""
    c = states.pure_concurrence(ctx.draw.pure)
    expected = np.sort(criteria.pure_pt_eigen(c))[::-1]
    residual = float(np.max(np.abs(expected - np.array(ctx.pt.etas))))
    return _gate("eq8-pure-pt", residual, ctx.tol.identity_rtol, concurrence=c)


def check_eq50_53_convex(ctx: DrawContext) -> CheckResult:
    """rho * rho_tilde spectrum {X +- sqrt(Y)/2, 0, 0} and det(rho^PT) = -Y/16."""
    combo = ctx.draw.combo
    x, y = combo.x_term, combo.y_term
    if x < 0.0 or y < 0.0:
        return CheckResult("eq50-53-convex", "fail", min(x, y), "X or Y negative")
    expected = np.array(sorted([x + math.sqrt(y) / 2.0, x - math.sqrt(y) / 2.0, 0.0, 0.0], reverse=True))
    spectrum_gap = float(np.max(np.abs(expected - np.array(ctx.oracle.lambdas))))
    det_gap = abs(ctx.pt.det_pt + y / 16.0)
    if spectrum_gap > ctx.tol.identity_rtol:
        return CheckResult("eq50-53-convex", "fail", spectrum_gap, "spectrum mismatch")
    return _gate("eq50-53-convex", det_gap, ctx.tol.det_rtol, X=x, Y=y)


def check_weyl(ctx: DrawContext) -> CheckResult:
    """
    Weyl inequalities for a pair of Hermitian matrices.

    Convex-combination draws use the partial transposes of their entangled and
    separable parts, so the lower bound with i = j = 3 bounds the third PT
    eigenvalue of the mixture; other draws pair rho^PT with a random Hermitian.
    """
    combo = ctx.draw.combo
    if combo is not None:
        sep = np.zeros((4, 4), dtype=complex)
        sep[0, 0] = combo.p
        ent = (1.0 - combo.p) * states.projector(states.ket_from_params(combo.psi))
        x = criteria.partial_transpose_b(ent)
        y = criteria.partial_transpose_b(sep)
    else:
        x = criteria.partial_transpose_b(ctx.rho)
        y = matcore.random_hermitian(ctx.rng("weyl"))
    violations = matcore.weyl_violations(x, y)
    if violations:
        kind, i, j, excess = max(violations, key=lambda v: v[3])
        return CheckResult("weyl", "fail", excess, f"{kind} bound violated at (i={i}, j={j})")
    return CheckResult("weyl", "pass", 0.0)


def check_vieta(ctx: DrawContext) -> CheckResult:
    """Vieta relations, root reconstruction, root ordering and f1 <= 0."""
    p = ctx.canonical
    coeffs = quartic.coeffs_from_canonical(p)
    if coeffs.f1 > 0.0:
        return CheckResult("vieta", "fail", coeffs.f1, "f1 is positive")
    d = quartic.depressed_from_canonical(p)
    f = quartic.ferrari_solve(d, ctx.tol.ferrari_tol)
    x1, x2, x3, x4 = f.x
    if x2 < x1 or x4 < x3:
        return CheckResult("vieta", "fail", None, "root pairs out of order")
    vieta = max(quartic.vieta_check(d, f)) / (1.0 + abs(d.a) + abs(d.b) + abs(d.c))
    recon = max(abs(quartic.evaluate(coeffs, lam)) for lam in f.lambdas(d.delta)) / coeffs.scale
    return _gate("vieta", max(vieta, recon), VIETA_RTOL, branch=f.branch)


def check_ferrari_vs_oracle(ctx: DrawContext) -> CheckResult:
    """
    Closed-form roots and concurrence against the brute-force spectrum.

    The default solve is compared first; the two rotated resolvent branches
    are then pinned and compared as well, skipping a branch whose pivot
    vanishes. Notes collect which root was maximal on each branch.
    """
    p = ctx.canonical
    oracle = entanglement.concurrence_oracle(
        states.canonical_state(p), ctx.tol.imag_tol, ctx.tol.clamp_floor
    )
    results = [entanglement.concurrence_ferrari(p, ctx.tol.ferrari_tol, ctx.tol.clamp_floor)]
    for k in (1, 2):
        try:
            results.append(
                entanglement.concurrence_ferrari(
                    p, ctx.tol.ferrari_tol, ctx.tol.clamp_floor, resolvent_branch=k
                )
            )
        except (DegeneratePivot, ComplexResidual) as e:
            logger.debug("Draw %d: resolvent branch %d skipped (%s)", ctx.index, k, e)

    notes = [r.branch_note for r in results]
    degraded = results[0].degraded
    if degraded:
        notes.append("degraded")
    meta = {"note": notes, "concurrence": oracle.concurrence}
    c_limit = max(ctx.tol.eps_c, math.sqrt(ctx.tol.root_atol)) if degraded else ctx.tol.eps_c
    worst = 0.0
    for r in results:
        root_gap = float(np.max(np.abs(np.array(r.lambdas) - np.array(oracle.lambdas))))
        if root_gap > ctx.tol.root_atol:
            return CheckResult(
                "ferrari-vs-oracle", "fail", root_gap, f"root mismatch on {r.branch}", meta
            )
        worst = max(worst, abs(r.concurrence - oracle.concurrence))
    return _gate("ferrari-vs-oracle", worst, c_limit, **meta)


def check_lu_invariance(ctx: DrawContext) -> CheckResult:
    """C and det(rho^PT) under a random local unitary and through canonicalization."""
    unitary = random_local_unitary(ctx.rng("lu-invariance"))
    rotated = unitary.apply_state(ctx.rho)
    params, _ = states.canonicalize(rotated, ctx.tol.canon_tol)
    canonical = states.canonical_state(params)

    c0 = ctx.oracle.concurrence
    d0 = ctx.pt.det_pt
    gaps = []
    for rho in (rotated, canonical):
        c = entanglement.concurrence_oracle(rho, ctx.tol.imag_tol, ctx.tol.clamp_floor).concurrence
        det_pt = matcore.det4(criteria.partial_transpose_b(rho)).real
        gaps.extend([abs(c - c0), abs(det_pt - d0)])
    return _gate("lu-invariance", max(gaps), ctx.tol.canon_tol)


def check_xstate_verdict(ctx: DrawContext) -> CheckResult:
    """Negativity > 0 exactly when C > 0, away from the boundary band."""
    try:
        v = ctx.verdict()
    except CriteriaDisagreement as e:
        return CheckResult("xstate-verdict", "fail", None, str(e))
    if v.status == criteria.BOUNDARY:
        return CheckResult("xstate-verdict", "boundary", abs(v.det_pt))
    negative = ctx.pt.negativity > ctx.tol.eps_sep
    entangled = v.concurrence > ctx.tol.eps_c
    meta = {"negativity": ctx.pt.negativity, "concurrence": v.concurrence}
    if negative != entangled:
        return CheckResult("xstate-verdict", "fail", ctx.pt.negativity, "negativity and C disagree", meta)
    return CheckResult("xstate-verdict", "pass", 0.0, meta=meta)


def check_eof_monotone(ctx: DrawContext) -> CheckResult:
    """E(C) in [0, 1], zero only at C = 0, and increasing past C."""
    c = ctx.oracle.concurrence
    e = entanglement.eof(c).eof
    if not 0.0 <= e <= 1.0:
        return CheckResult("eof-monotone", "fail", e, "EoF outside [0, 1]")
    if (e == 0.0) != (c <= 1e-12):
        return CheckResult("eof-monotone", "fail", e, f"EoF {e:.3e} inconsistent with C {c:.3e}")
    if c < 1.0:
        higher = entanglement.eof(c + 0.5 * (1.0 - c)).eof
        if not higher > e:
            return CheckResult("eof-monotone", "fail", e - higher, "EoF not increasing")
    return CheckResult("eof-monotone", "pass", 0.0, meta={"eof": e})


CheckFn = Callable[[DrawContext], CheckResult]

CHECKS: dict[str, CheckFn] = {
    "equivalence": check_equivalence,
    "signature": check_signature,
    "eq24-det": check_eq24_det,
    "eq41-identity": check_eq41_identity,
    "eq45-dpt": check_eq45_dpt,
    "eq6-eq7-pure": check_eq6_eq7_pure,
    "eq8-pure-pt": check_eq8_pure_pt,
    "eq50-53-convex": check_eq50_53_convex,
    "weyl": check_weyl,
    "vieta": check_vieta,
    "ferrari-vs-oracle": check_ferrari_vs_oracle,
    "lu-invariance": check_lu_invariance,
    "xstate-verdict": check_xstate_verdict,
    "eof-monotone": check_eof_monotone,
}
CHECK_NAMES = list(CHECKS)

# checks that only make sense on some ensembles
REQUIRED_ENSEMBLES: dict[str, tuple[str, ...]] = {
    "eq6-eq7-pure": PURE_ENSEMBLES,
    "eq8-pure-pt": PURE_ENSEMBLES,
    "eq50-53-convex": ("convex-combo",),
}

# checks whose boundary outcomes count toward the boundary limit
BOUNDARY_CHECKS = ("equivalence", "xstate-verdict")


def validate_checks(names: list[str], ensemble: str) -> None:
    """
    Reject unknown checks and checks that cannot run on the ensemble.

    Raises:
        UnknownCheck: Listing every unknown name
        IncompatibleCheck: If a check needs a different ensemble
    """
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise UnknownCheck(
            f"Unknown check(s): {', '.join(unknown)} (expected any of {', '.join(CHECK_NAMES)})"
        )
    for name in names:
        allowed = REQUIRED_ENSEMBLES.get(name)
        if allowed and ensemble not in allowed:
            raise IncompatibleCheck(
                f"Check '{name}' needs ensemble {' or '.join(allowed)}, got '{ensemble}'"
            )
