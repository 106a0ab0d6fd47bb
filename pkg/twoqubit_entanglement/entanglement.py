"""Concurrence and entanglement of formation."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matcore, quartic
from .errors import IntermediateSign, NegativeEigenvalue, OutOfRange
from .states import CanonicalParams, DensityMatrix

logger = logging.getLogger(__name__)

CLAMP_FLOOR = 1e-10
ROUNDOFF_ZERO = 1e-14  # |lambda| at or below this is a numerical zero
RANGE_SLACK = 1e-12
SINGULAR_FLOOR = 1e-8
CLUSTER_RTOL = 1e-5  # eigenvalues below this fraction of delta form the zero cluster


@dataclass(frozen=True)
class ConcurrenceResult:
    lambdas: tuple[float, float, float, float]  # eigenvalues of rho * rho_tilde, descending
    concurrence: float
    path: str  # "oracle" or "ferrari"
    branch_note: Optional[str] = None  # "x2" or "x4": which root was maximal (ferrari path)
    degraded: bool = False  # ferrari path: a zero cluster was recomputed by deflation
    branch: Optional[str] = None  # ferrari path: resolvent branch that produced the roots


@dataclass(frozen=True)
class EntanglementOfFormation:
    concurrence: float
    eof: float


def spin_flip(rho: DensityMatrix) -> np.ndarray:
    """rho_tilde = (sigma_y x sigma_y) rho* (sigma_y x sigma_y)."""
    return matcore.SIGMA_YY @ np.conj(rho.mat) @ matcore.SIGMA_YY


def _clamp(values, floor: float) -> list[float]:
    out = []
    for lam in values:
        if lam < -floor:
            raise NegativeEigenvalue(
                "Eigenvalue of rho * rho_tilde is negative", residual=float(lam), limit=-floor
            )
        out.append(0.0 if lam <= ROUNDOFF_ZERO else float(lam))
    return out


def _concurrence_from(lams: list[float]) -> float:
    roots = sorted((math.sqrt(lam) for lam in lams), reverse=True)
    return max(0.0, roots[0] - roots[1] - roots[2] - roots[3])


def _similar_hermitian_spectrum(rho: DensityMatrix, spec: matcore.HermitianSpectrum) -> np.ndarray:
    """Eigenvalues of sqrt(rho) rho_tilde sqrt(rho), which equal those of rho * rho_tilde."""
    w = spec.eigenvalues
    sqrt_w = np.sqrt(np.where(w > ROUNDOFF_ZERO, w, 0.0))
    root = (spec.eigenvectors * sqrt_w) @ matcore.dagger(spec.eigenvectors)
    # for product states the product is pure roundoff; impose Hermiticity
    return matcore.hermitian_eig(matcore.symmetrize(root @ spin_flip(rho) @ root)).eigenvalues


def concurrence_oracle(
    rho: DensityMatrix, tol: float = 1e-10, clamp_floor: float = CLAMP_FLOOR
) -> ConcurrenceResult:
    """
    Concurrence from the brute-force spectrum of rho * rho_tilde.

    C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)) over descending l_i.

    Full-rank states use the general eigensolver on rho * rho_tilde. For a
    singular rho the product can be defective (product pure states are
    nilpotent), and its repeated zero eigenvalues come back as noise of order
    sqrt(machine epsilon); those states use the similar Hermitian matrix
    sqrt(rho) rho_tilde sqrt(rho) instead.

    Args:
        rho: Valid density matrix
        tol: Largest admissible imaginary part of the spectrum
        clamp_floor: Eigenvalues in [-clamp_floor, 0) are treated as 0

    Raises:
        SpectrumNotReal: If the spectrum of a full-rank state is not real within tol
        NegativeEigenvalue: If an eigenvalue lies below -clamp_floor
    """
    spec = matcore.hermitian_eig(rho.mat)
    if spec.eigenvalues[-1] <= SINGULAR_FLOOR:
        logger.debug("Singular rho; using the Hermitian similarity transform")
        raw = _similar_hermitian_spectrum(rho, spec)
    else:
        raw = matcore.general_eig4_real(rho.mat @ spin_flip(rho), tol=tol)
    lams = sorted(_clamp(raw, clamp_floor), reverse=True)
    return ConcurrenceResult(
        lambdas=tuple(lams),  # type: ignore[arg-type]
        concurrence=_concurrence_from(lams),
        path="oracle",
    )


def _deflate_cluster(coeffs: quartic.QuarticSpec, big: list[float], size: int) -> list[float]:
    """Roots left after dividing the quartic by the factors of the well-separated roots."""
    if size == 2:
        s_big, p_big = big[0] + big[1], big[0] * big[1]
        gamma = coeffs.f4 / p_big
        beta = (coeffs.f3 + s_big * gamma) / p_big
        poly = [1.0, beta, gamma]
    else:
        lam = big[0]
        h0 = -coeffs.f4 / lam
        h1 = (h0 - coeffs.f3) / lam
        h2 = (h1 - coeffs.f2) / lam
        poly = [1.0, h2, h1, h0]
    return sorted(float(z.real) for z in np.roots(poly))


def _refine_cluster(
    coeffs: quartic.QuarticSpec, lams: tuple[float, ...]
) -> tuple[list[float], bool]:
    """
    Recompute a cluster of two or three eigenvalues near zero by deflation.

    Ferrari's radicals resolve a k-fold root only to about eps^(1/k) of the
    scale. Returns the eigenvalues in their original labeling and whether a
    cluster was refined.
    """
    out = list(lams)
    delta = -coeffs.f1
    if delta <= 0.0:
        return out, False
    near = sorted(
        (i for i in range(4) if abs(out[i]) <= CLUSTER_RTOL * delta), key=lambda i: out[i]
    )
    if len(near) not in (2, 3):
        return out, False
    big = [out[i] for i in range(4) if i not in near]
    # the spectrum is nonnegative, so the cluster lies in [0, delta - sum(big)]
    room = max(0.0, delta - sum(big))
    for i, lam in zip(near, _deflate_cluster(coeffs, big, len(near))):
        out[i] = min(max(lam, 0.0), room)
    logger.debug("Refined %d eigenvalues near zero by deflation", len(near))
    return out, True


def concurrence_ferrari(
    p: CanonicalParams,
    tol: Optional[float] = None,
    clamp_floor: float = CLAMP_FLOOR,
    resolvent_branch: Optional[int] = None,
) -> ConcurrenceResult:
    """
    Concurrence of a canonical state from the closed-form quartic roots.

    The largest eigenvalue is x2 + delta/4 or x4 + delta/4 (x2 >= x1 and
    x4 >= x3 by construction); which one is decided by comparison and
    recorded in branch_note. The concurrence is then

        C = max(0, (sqrt(l_top) - sqrt(l_partner)) - (sqrt(l_a) + sqrt(l_b)))

    with l_partner the other root of the top quadratic factor. Two or three
    eigenvalues clustered at zero are recomputed by deflation and the result
    is flagged degraded.

    Args:
        p: Canonical parameters
        tol: Imaginary-part gate passed to ferrari_solve
        clamp_floor: Eigenvalues in [-floor, 0) are treated as 0, floor being
            the larger of clamp_floor and the solver's own tolerance
        resolvent_branch: Pin the cube-root branch (see ferrari_solve)

    Raises:
        IntermediateSign: If either bracket of the formula comes out negative
    """
    d = quartic.depressed_from_canonical(p)
    f = quartic.ferrari_solve(d, tol, resolvent_branch)
    floor = max(clamp_floor, quartic.default_tol(d))
    raw, degraded = _refine_cluster(quartic.coeffs_from_canonical(p), f.lambdas(d.delta))
    lams = _clamp(raw, floor)
    lam1, lam2, lam3, lam4 = lams
    if lam2 >= lam4:
        note = "x2"
        top, partner, others = lam2, lam1, (lam3, lam4)
    else:
        note = "x4"
        top, partner, others = lam4, lam3, (lam1, lam2)
    inner = math.sqrt(top) - math.sqrt(partner)
    outer = sum(math.sqrt(lam) for lam in others)
    if inner < -math.sqrt(floor):
        raise IntermediateSign(
            f"sqrt(l_top) - sqrt(l_partner) is negative ({note})", residual=inner, limit=0.0
        )
    if outer < 0.0:
        raise IntermediateSign("Sum of the other square roots is negative", residual=outer, limit=0.0)
    return ConcurrenceResult(
        lambdas=tuple(sorted(lams, reverse=True)),  # type: ignore[arg-type]
        concurrence=max(0.0, inner - outer),
        path="ferrari",
        branch_note=note,
        degraded=degraded,
        branch=f.branch,
    )


def d_criterion(p: CanonicalParams) -> float:
    """
    Sign criterion for a canonical state; D > 0 means inseparable.

    D = rsq^2 + rtw^2 + (st - u^2)[v^2 - r(1-r-s-t)] - 2ruwq cos(tau1 - tau2 - tau3)
    """
    r, s, t, u, v, w, q = p.r, p.s, p.t, p.u, p.v, p.w, p.q
    return (
        r * s * q * q
        + r * t * w * w
        + (s * t - u * u) * (v * v - r * p.eta)
        - 2.0 * r * u * w * q * math.cos(p.tau1 - p.tau2 - p.tau3)
    )


def _check_unit_interval(c: float, what: str) -> float:
    if not -RANGE_SLACK <= c <= 1.0 + RANGE_SLACK:
        raise OutOfRange(f"{what} must lie in [0, 1], got {c!r}")
    return min(1.0, max(0.0, c))


def _xlog2x(x: float) -> float:
    return 0.0 if x <= 0.0 else x * math.log(x) / math.log(2.0)


def eof(c: float) -> EntanglementOfFormation:
    """
    Entanglement of formation as the binary entropy of (1 + sqrt(1 - C^2)) / 2.

    Raises:
        OutOfRange: If c lies outside [-1e-12, 1 + 1e-12]
    """
    c = _check_unit_interval(c, "Concurrence")
    x = 0.5 * (1.0 + math.sqrt((1.0 - c) * (1.0 + c)))
    value = -_xlog2x(x) - _xlog2x(1.0 - x)
    return EntanglementOfFormation(concurrence=c, eof=min(1.0, max(0.0, value)))


def pure_overlap_concurrence(psi: np.ndarray) -> float:
    """|<psi|psi_tilde>| with psi_tilde = (sigma_y x sigma_y) psi*."""
    psi = np.asarray(psi, dtype=complex).reshape(4)
    flipped = matcore.SIGMA_YY @ np.conj(psi)
    return float(abs(np.vdot(psi, flipped)))
