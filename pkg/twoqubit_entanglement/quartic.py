"""Characteristic quartic of rho * rho_tilde and its closed-form (Ferrari) solution.

For a canonical state the eigenvalues of rho * rho_tilde solve

    lambda^4 + f1 lambda^3 + f2 lambda^2 + f3 lambda + f4 = 0

with f1..f4 polynomial in the ten canonical parameters. Substituting
lambda = x + delta/4 (delta = -f1) removes the cubic term, leaving
x^4 + a x^2 + b x + c = 0, which Ferrari's resolvent solves in radicals.
Every intermediate is returned so identities can be tested.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matcore
from .errors import ComplexResidual, DegeneratePivot
from .states import CanonicalParams, canonical_matrix

logger = logging.getLogger(__name__)

SNAP_RTOL = 1e-13
PIVOT_RTOL = 1e-9
BIQUADRATIC_RTOL = 1e-12
POLISH_SLOPE_RTOL = 1e-6
ROOT_RTOL = 1e-6

CBRT2 = 2.0 ** (1.0 / 3.0)
CBRT4 = 4.0 ** (1.0 / 3.0)
OMEGA = cmath.exp(2j * math.pi / 3.0)
BRANCHES = ("principal", "rotated-1", "rotated-2")


@dataclass(frozen=True)
class QuarticSpec:
    """lambda^4 + f1 lambda^3 + f2 lambda^2 + f3 lambda + f4 = 0."""

    f1: float
    f2: float
    f3: float
    f4: float

    @property
    def scale(self) -> float:
        return 1.0 + abs(self.f1) + abs(self.f2) + abs(self.f3) + abs(self.f4)


@dataclass(frozen=True)
class DepressedQuartic:
    """x^4 + a x^2 + b x + c = 0, with lambda = x + delta/4."""

    delta: float
    a: float
    b: float
    c: float

    @property
    def shift(self) -> float:
        return self.delta / 4.0

    def value(self, x: complex) -> complex:
        return ((x * x + self.a) * x + self.b) * x + self.c

    def slope(self, x: complex) -> complex:
        return (4.0 * x * x + 2.0 * self.a) * x + self.b


@dataclass(frozen=True)
class FerrariIntermediates:
    """Resolvent quantities and the four real roots x1..x4."""

    P: float
    Q: float
    R: float
    T: float
    S: complex
    x: tuple[float, float, float, float]
    branch: str = "principal"
    imag_residual: float = 0.0
    root_residual: float = 0.0

    def lambdas(self, delta: float) -> tuple[float, float, float, float]:
        """Roots of the undepressed quartic, lambda_i = x_i + delta/4, in x-labeling."""
        shift = delta / 4.0
        x1, x2, x3, x4 = self.x
        return (x1 + shift, x2 + shift, x3 + shift, x4 + shift)


def coeffs_from_canonical(p: CanonicalParams) -> QuarticSpec:
    """
    Coefficients f1..f4 of the characteristic quartic of rho * rho_tilde.

    Args:
        p: Canonical parameters

    Returns:
        QuarticSpec; f1 <= 0 for any valid p
    """
    r, s, t, u, v, w, q = p.r, p.s, p.t, p.u, p.v, p.w, p.q
    eta = p.eta
    u2, v2, w2, q2 = u * u, v * v, w * w, q * q
    c_123 = math.cos(p.tau1 - p.tau2 - p.tau3)
    c_23 = math.cos(p.tau2 - p.tau3)
    c_12 = math.cos(p.tau1 - 2.0 * p.tau2)
    c_13 = math.cos(p.tau1 - 2.0 * p.tau3)

    f1 = -2.0 * (r * eta + s * t + u2 + v2)

    f2 = (
        -(r**4)
        - 2.0 * r**3 * eta
        + s * s * t * t
        + 2.0 * u2 * v2
        + 2.0 * s * t * (2.0 * u2 - v2)
        + (u2 + v2) ** 2
        + r * r * (1.0 + (s - t) ** 2 - 2.0 * (s + t) + 2.0 * (u2 - 2.0 * v2))
        - 2.0
        * r
        * (q2 * s - s * (u2 - 2.0 * v2) + (1.0 - t) * (u2 - 2.0 * v2 - 2.0 * s * t) + t * (2.0 * s * s + w2))
        + 4.0 * q * r * w * (2.0 * u * c_123 - v * c_23)
    )

    f3 = 2.0 * (
        -s * t * u2 * u2
        - v2 * v2 * (u2 + r * eta)
        + r * s * (s * t + r * eta) * (q2 - t * eta)
        - s * u2 * (r * q2 + t * (s * t - 2.0 * r * eta))
        - r * w2 * (2.0 * r * q2 + t * (u2 + v2 - s * t - r * eta))
        - v2 * (r * s * q2 + (u2 - r * eta) ** 2 - 2.0 * s * t * (u2 + r * eta))
        + 4.0 * r * u * (t * v * w2 * c_12 + q * (s * v * q * c_13 - (s * t + v2) * w * c_123))
        - 2.0 * r * v * w * q * (s * t + u2 - v2 - r * eta) * c_23
    )

    f4 = (r * s * q2 + (u2 - r * eta) * (s * t - v2) + r * t * w2 - 2.0 * r * v * w * q * c_23) ** 2

    return QuarticSpec(f1=f1, f2=f2, f3=f3, f4=f4)


def depress(q: QuarticSpec) -> DepressedQuartic:
    """Generic Tschirnhaus shift lambda = x - f1/4."""
    A, B, C, D = q.f1, q.f2, q.f3, q.f4
    return DepressedQuartic(
        delta=-A,
        a=B - 3.0 * A * A / 8.0,
        b=C - A * B / 2.0 + A**3 / 8.0,
        c=D - A * C / 4.0 + A * A * B / 16.0 - 3.0 * A**4 / 256.0,
    )


def depressed_from_canonical(p: CanonicalParams) -> DepressedQuartic:
    """
    a, b, c written in terms of delta = -f1 and f2, f3, f4 of a canonical state.

    Kept as a separate evaluation path from depress() so the two cross-check.
    """
    q = coeffs_from_canonical(p)
    delta = -q.f1
    return DepressedQuartic(
        delta=delta,
        a=q.f2 - 0.375 * delta * delta,
        b=q.f3 - 0.125 * delta * (delta * delta - 4.0 * q.f2),
        c=q.f4 - delta * (3.0 * delta**3 - 16.0 * delta * q.f2 - 64.0 * q.f3) / 256.0,
    )


def evaluate(q: QuarticSpec, lam: float) -> float:
    """Horner evaluation of the undepressed quartic."""
    return (((lam + q.f1) * lam + q.f2) * lam + q.f3) * lam + q.f4


def natural_scale(d: DepressedQuartic) -> float:
    """Common magnitude of the roots: max(delta, |a|^1/2, |b|^1/3, |c|^1/4)."""
    return max(abs(d.delta), abs(d.a) ** 0.5, abs(d.b) ** (1.0 / 3.0), abs(d.c) ** 0.25)


def default_tol(d: DepressedQuartic) -> float:
    """Scale-aware imaginary-part gate."""
    return 1e-8 * (1.0 + abs(d.delta) + abs(d.a) + abs(d.b) ** (1.0 / 3.0) + abs(d.c) ** 0.25)


def _snap(value: float, magnitude: float) -> float:
    return 0.0 if abs(value) <= SNAP_RTOL * magnitude else value


def _snap_complex(value: complex, magnitude: float) -> complex:
    return 0j if abs(value) <= SNAP_RTOL * magnitude else value


def _resolvent(a: float, r_val: float, y: complex) -> tuple[complex, complex]:
    """P^2 and Q for one cube-root value y of S."""
    r_over_y = 0j if y == 0 else r_val / y
    p_sq = (-4.0 * a + 2.0 * CBRT2 * r_over_y + CBRT4 * y) / 24.0
    q_val = (-4.0 * a - CBRT2 * r_over_y - y / CBRT2) / 3.0
    return p_sq, q_val


def _biquadratic_roots(a: float, c: float) -> list[complex]:
    root = cmath.sqrt(a * a - 4.0 * c)
    z_hi = (-a + root) / 2.0
    z_lo = (-a - root) / 2.0
    if z_hi.real < z_lo.real:
        z_hi, z_lo = z_lo, z_hi
    s_hi = cmath.sqrt(z_hi)
    s_lo = cmath.sqrt(z_lo)
    return [-s_hi, s_hi, -s_lo, s_lo]


def _polish(d: DepressedQuartic, x: float, scale: float) -> float:
    """One Newton step on the quartic, kept only if it lowers |g(x)|."""
    g = d.value(x).real
    slope = d.slope(x).real
    if g == 0.0 or abs(slope) <= POLISH_SLOPE_RTOL * max(scale, 1e-300) ** 3:
        return x
    candidate = x - g / slope
    return candidate if abs(d.value(candidate).real) < abs(g) else x


def ferrari_solve(
    d: DepressedQuartic, tol: Optional[float] = None, resolvent_branch: Optional[int] = None
) -> FerrariIntermediates:
    """
    Solve x^4 + a x^2 + b x + c = 0 in radicals.

    R = a^2 + 12c, T = 2a^3 + 27b^2 - 72ac, S = T + sqrt(T^2 - 4R^3) and
    y = S^(1/3), all in complex arithmetic with principal branches;

        P = sqrt(-4a + 2 cbrt(2) R/y + cbrt(4) y) / (2 sqrt(6))
        Q = (-4a - cbrt(2) R/y - y/cbrt(2)) / 3
        x1,2 = P -+ sqrt(-b/P + Q)/2,   x3,4 = -P -+ sqrt(b/P + Q)/2

    Coefficients and resolvent values below 1e-13 of their natural scale are
    treated as exact zeros, so multiple roots come out exact. A branch is
    accepted only when its roots are real within tol and |g(x_i)| stays below
    ROOT_RTOL * scale^4.

    Args:
        d: Depressed quartic with a real spectrum
        tol: Largest admissible imaginary part; None selects default_tol(d)
        resolvent_branch: Use only y = S^(1/3) * omega^k for this k (0, 1 or 2),
            without falling back to other branches or the biquadratic form

    Returns:
        FerrariIntermediates with x2 >= x1 and x4 >= x3

    Raises:
        ComplexResidual: If no branch yields four real roots of the quartic
        DegeneratePivot: If P vanishes while b does not
    """
    if tol is None:
        tol = default_tol(d)
    if resolvent_branch is not None and resolvent_branch not in (0, 1, 2):
        raise ValueError(f"resolvent_branch must be 0, 1 or 2, got {resolvent_branch!r}")
    scale = natural_scale(d)
    root_limit = ROOT_RTOL * scale**4
    a = _snap(d.a, scale**2)
    b = _snap(d.b, scale**3)
    c = _snap(d.c, scale**4)
    r_val = _snap(a * a + 12.0 * c, scale**4)
    t_val = _snap(2.0 * a**3 + 27.0 * b * b - 72.0 * a * c, scale**6)

    if r_val == 0.0 and t_val == 0.0:
        s_val = 0j
    else:
        root = cmath.sqrt(t_val * t_val - 4.0 * r_val**3)
        s_val = t_val + root
        if abs(s_val) <= SNAP_RTOL * scale**6:
            # conjugate branch gives the same resolvent
            s_val = t_val - root
    y0 = s_val ** (1.0 / 3.0) if s_val != 0 else 0j

    pivot = PIVOT_RTOL * (1.0 + abs(a) + abs(d.delta))
    branches = list(enumerate(BRANCHES))
    if resolvent_branch is not None:
        branches = [branches[resolvent_branch]]
    best: Optional[FerrariIntermediates] = None
    for k, name in branches:
        y = y0 * OMEGA**k
        p_sq, q_val = _resolvent(a, r_val, y)
        p_val = cmath.sqrt(p_sq)
        if abs(p_val) < pivot:
            if resolvent_branch is not None:
                raise DegeneratePivot(
                    f"Resolvent branch {name} gives a vanishing P", residual=abs(p_val), limit=pivot
                )
            if y0 == 0:
                break
            logger.debug("Resolvent branch %s gives degenerate P=%r", name, p_val)
            continue
        # a vanishing radicand is a double root inside one quadratic factor
        half_1 = 0.5 * cmath.sqrt(_snap_complex(-b / p_val + q_val, scale**2))
        half_2 = 0.5 * cmath.sqrt(_snap_complex(b / p_val + q_val, scale**2))
        roots = [p_val - half_1, p_val + half_1, -p_val - half_2, -p_val + half_2]
        imag = max(abs(z.imag) for z in roots + [p_sq])
        candidate = _finish(d, roots, scale, p_val.real, q_val.real, r_val, t_val, s_val, name, imag)
        if imag <= tol and candidate.root_residual <= root_limit:
            return candidate
        logger.debug(
            "Resolvent branch %s rejected: imaginary residual %.3e, root residual %.3e",
            name,
            imag,
            candidate.root_residual,
        )
        if best is None or _badness(best, tol, root_limit) > _badness(candidate, tol, root_limit):
            best = candidate

    if best is not None:
        _reject(best, tol, root_limit)

    if abs(b) > BIQUADRATIC_RTOL * (1.0 + abs(a)) ** 1.5:
        raise DegeneratePivot(
            "Resolvent pivot P vanishes while b does not", residual=abs(b), limit=pivot
        )
    logger.debug("Falling back to the biquadratic solution (b=%r)", b)
    roots = _biquadratic_roots(a, c)
    imag = max(abs(z.imag) for z in roots)
    q_val = _resolvent(a, r_val, y0)[1].real
    candidate = _finish(d, roots, scale, 0.0, q_val, r_val, t_val, s_val, "biquadratic", imag)
    if imag > tol or candidate.root_residual > root_limit:
        _reject(candidate, tol, root_limit)
    return candidate


def _badness(f: FerrariIntermediates, tol: float, root_limit: float) -> float:
    return max(f.imag_residual / max(tol, 1e-300), f.root_residual / max(root_limit, 1e-300))


def _reject(f: FerrariIntermediates, tol: float, root_limit: float) -> None:
    if f.imag_residual > tol:
        raise ComplexResidual(
            f"Quartic roots are not real ({f.branch})", residual=f.imag_residual, limit=tol
        )
    raise ComplexResidual(
        f"Real parts are not roots of the quartic ({f.branch})",
        residual=f.root_residual,
        limit=root_limit,
    )


def _finish(
    d: DepressedQuartic,
    roots: list[complex],
    scale: float,
    p_val: float,
    q_val: float,
    r_val: float,
    t_val: float,
    s_val: complex,
    branch: str,
    imag: float,
) -> FerrariIntermediates:
    xs = [_polish(d, z.real, scale) for z in roots]
    x1, x2 = sorted(xs[:2])
    x3, x4 = sorted(xs[2:])
    return FerrariIntermediates(
        P=p_val,
        Q=q_val,
        R=r_val,
        T=t_val,
        S=complex(s_val),
        x=(x1, x2, x3, x4),
        branch=branch,
        imag_residual=imag,
        root_residual=max(abs(d.value(x)) for x in xs),
    )


def vieta_check(
    d: DepressedQuartic, f: FerrariIntermediates, tol: Optional[float] = None
) -> tuple[float, float, float, float]:
    """
    Residuals of the four Vieta relations for the depressed quartic.

    Returns:
        (|e1|, |e2 - a|, |e3 + b|, |e4 - c|) over the roots x1..x4
    """
    x = np.array(f.x)
    e1 = float(np.sum(x))
    e2 = sum(x[i] * x[j] for i in range(4) for j in range(i + 1, 4))
    e3 = sum(x[i] * x[j] * x[k] for i in range(4) for j in range(i + 1, 4) for k in range(j + 1, 4))
    e4 = float(np.prod(x))
    residuals = (abs(e1), abs(e2 - d.a), abs(e3 + d.b), abs(e4 - d.c))
    if tol is not None and max(residuals) > tol * (1.0 + abs(d.a) + abs(d.b) + abs(d.c)):
        logger.warning("Vieta residuals %s exceed %.1e", residuals, tol)
    return tuple(float(v) for v in residuals)  # type: ignore[return-value]


def det_identity_check(p: CanonicalParams) -> tuple[float, float]:
    """
    Both sides of (delta/4)^4 + a (delta/4)^2 - b (delta/4) + c = det(rho)^2.

    Returns:
        (lhs from the depressed quartic, rhs from the cofactor determinant)
    """
    d = depressed_from_canonical(p)
    h = d.shift
    lhs = h**4 + d.a * h * h - d.b * h + d.c
    rhs = matcore.det4(canonical_matrix(p)).real ** 2
    return lhs, rhs
