"""Two-qubit states: validation, parameterizations, canonical form and fixtures.

Basis order is fixed as |00>, |01>, |10>, |11> with qubit A the left factor.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import matcore, utils
from .errors import (
    CanonicalizationResidual,
    InputError,
    InvalidParameters,
    MatrixFormatError,
    NegativeRadicand,
    NotPSD,
    TraceNotOne,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
TRACE_TOL = 1e-12
PSD_FLOOR = 1e-10
UNITARY_TOL = 1e-12
RADICAND_FLOOR = 1e-14
PARAM_SLACK = 1e-12
CANONICAL_MAX_SWEEPS = 64
CANONICAL_TARGET = 1e-14
CANONICAL_NEWTON_STEPS = 32


def _wrap_phase(theta: float) -> float:
    wrapped = math.fmod(float(theta), TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a value just below 2*pi can round up to exactly 2*pi
    return 0.0 if wrapped >= TWO_PI else wrapped


def _check_finite(name: str, value: float) -> None:
    if not utils.is_finite_number(value):
        raise InvalidParameters(f"Parameter '{name}' must be a finite number, got {value!r}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated two-qubit state: Hermitian, unit trace, positive semidefinite."""

    mat: np.ndarray

    def __post_init__(self):
        self.mat.setflags(write=False)


@dataclass(frozen=True)
class PureParams:
    """Parameters (a, b, c, theta1, theta2, theta3) of a normalized ket."""

    a: float
    b: float
    c: float
    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "theta1", "theta2", "theta3"):
            _check_finite(name, getattr(self, name))
        if min(self.a, self.b, self.c) < 0.0:
            raise InvalidParameters("Amplitudes a, b, c must be >= 0")
        if self.a**2 + self.b**2 + self.c**2 > 1.0 + PARAM_SLACK:
            raise InvalidParameters("a^2 + b^2 + c^2 must not exceed 1")
        for name in ("theta1", "theta2", "theta3"):
            object.__setattr__(self, name, _wrap_phase(getattr(self, name)))

    @property
    def d(self) -> float:
        """Modulus of the |11> amplitude, sqrt(1 - a^2 - b^2 - c^2)."""
        return math.sqrt(max(0.0, 1.0 - self.a**2 - self.b**2 - self.c**2))


@dataclass(frozen=True)
class CanonicalParams:
    """The ten real parameters of the canonical two-qubit density matrix."""

    r: float
    s: float
    t: float
    u: float = 0.0
    v: float = 0.0
    w: float = 0.0
    q: float = 0.0
    tau1: float = 0.0
    tau2: float = 0.0
    tau3: float = 0.0

    def __post_init__(self):
        for name in ("r", "s", "t", "u", "v", "w", "q", "tau1", "tau2", "tau3"):
            _check_finite(name, getattr(self, name))
        if min(self.r, self.s, self.t) < 0.0:
            raise InvalidParameters("Populations r, s, t must be >= 0")
        if self.r + self.s + self.t > 1.0 + PARAM_SLACK:
            raise InvalidParameters("r + s + t must not exceed 1")
        if min(self.u, self.v, self.w, self.q) < 0.0:
            raise InvalidParameters("Moduli u, v, w, q must be >= 0")
        for name in ("tau1", "tau2", "tau3"):
            object.__setattr__(self, name, _wrap_phase(getattr(self, name)))

    @property
    def eta(self) -> float:
        """The |11> population 1 - r - s - t."""
        return 1.0 - self.r - self.s - self.t

    def as_dict(self) -> dict[str, float]:
        return {
            "r": self.r,
            "s": self.s,
            "t": self.t,
            "u": self.u,
            "v": self.v,
            "w": self.w,
            "q": self.q,
            "tau1": self.tau1,
            "tau2": self.tau2,
            "tau3": self.tau3,
        }


@dataclass(frozen=True, eq=False)
class LocalUnitary:
    """A product unitary ua (on qubit A) tensor ub (on qubit B)."""

    ua: np.ndarray
    ub: np.ndarray

    def __post_init__(self):
        for name in ("ua", "ub"):
            m = matcore.as_matrix(getattr(self, name), 2)
            residual = float(np.linalg.norm(matcore.dagger(m) @ m - matcore.I2))
            if residual > UNITARY_TOL * 10:
                raise InvalidParameters(f"{name} is not unitary (residual {residual:.3e})")
            object.__setattr__(self, name, m)

    @classmethod
    def identity(cls) -> "LocalUnitary":
        return cls(matcore.I2.copy(), matcore.I2.copy())

    @property
    def matrix(self) -> np.ndarray:
        return matcore.kron(self.ua, self.ub)

    def apply(self, m: np.ndarray) -> np.ndarray:
        """Return (ua x ub) m (ua x ub)^dagger."""
        u = self.matrix
        return u @ m @ matcore.dagger(u)

    def apply_state(self, rho: DensityMatrix) -> DensityMatrix:
        return validate(self.apply(rho.mat))


@dataclass(frozen=True)
class ConvexComboParams:
    """Mixture p |00><00| + (1 - p) |psi><psi| of a product and an entangled pure state."""

    p: float
    psi: PureParams

    def __post_init__(self):
        _check_finite("p", self.p)
        if not 0.0 <= self.p <= 1.0:
            raise InvalidParameters(f"Mixing weight p must lie in [0, 1], got {self.p}")
        if pure_concurrence(self.psi) <= 0.0:
            raise InvalidParameters("The pure component must be entangled (concurrence > 0)")

    @property
    def x_term(self) -> float:
        """X = (1/2)(1-p)[(1-p)C^2 + 2p d^2]."""
        c2 = pure_concurrence(self.psi) ** 2
        d2 = self.psi.d**2
        return 0.5 * (1.0 - self.p) * ((1.0 - self.p) * c2 + 2.0 * self.p * d2)

    @property
    def y_term(self) -> float:
        """Y = (1-p)^3 C^2 [(1-p)C^2 + 4p d^2]."""
        c2 = pure_concurrence(self.psi) ** 2
        d2 = self.psi.d**2
        return (1.0 - self.p) ** 3 * c2 * ((1.0 - self.p) * c2 + 4.0 * self.p * d2)


def validate(m: Any) -> DensityMatrix:
    """
    Validate a 4x4 matrix as a two-qubit density matrix.

    Args:
        m: Array-like 4x4 complex matrix

    Returns:
        DensityMatrix holding the symmetrized matrix

    Raises:
        NotHermitian, TraceNotOne, NotPSD: naming the measured residual
    """
    mat = matcore.check_hermitian(matcore.as_matrix(m, 4))
    trace = float(np.trace(mat).real)
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceNotOne("Trace is not 1", residual=abs(trace - 1.0), limit=TRACE_TOL)
    lowest = float(matcore.hermitian_eig(mat).eigenvalues[-1])
    if lowest < -PSD_FLOOR:
        raise NotPSD("Matrix has a negative eigenvalue", residual=lowest, limit=-PSD_FLOOR)
    return DensityMatrix(mat)


def projector(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| for a 4-vector."""
    psi = np.asarray(psi, dtype=complex).reshape(4)
    return np.outer(psi, np.conj(psi))


def ket_from_params(p: PureParams) -> np.ndarray:
    """(a, b e^{i theta1}, c e^{i theta2}, d e^{i theta3}) with d = sqrt(1 - a^2 - b^2 - c^2)."""
    return np.array(
        [
            p.a,
            p.b * np.exp(1j * p.theta1),
            p.c * np.exp(1j * p.theta2),
            p.d * np.exp(1j * p.theta3),
        ],
        dtype=complex,
    )


def params_from_ket(psi: np.ndarray, tol: float = 1e-12) -> PureParams:
    """
    Read PureParams off an arbitrary normalized ket.

    A global phase makes the first nonzero amplitude real positive first.

    Args:
        psi: Unit-norm 4-vector
        tol: Threshold below which an amplitude counts as zero

    Returns:
        PureParams reproducing psi up to global phase
    """
    psi = np.asarray(psi, dtype=complex).reshape(4)
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-10:
        raise InvalidParameters(f"Ket is not normalized (norm {norm:.12f})")
    psi = psi / norm
    lead = next((z for z in psi if abs(z) > tol), psi[0])
    if abs(lead) > 0:
        psi = psi * (abs(lead) / lead)
    amps = np.abs(psi)
    phases = [float(np.angle(z)) if abs(z) > tol else 0.0 for z in psi]
    a, b, c = float(amps[0]), float(amps[1]), float(amps[2])
    excess = a * a + b * b + c * c - 1.0
    if excess > 0.0:
        # rounding only; keep the parameters inside the unit ball
        scale = 1.0 / math.sqrt(1.0 + excess)
        a, b, c = a * scale, b * scale, c * scale
    return PureParams(a=a, b=b, c=c, theta1=phases[1], theta2=phases[2], theta3=phases[3])


def pure_concurrence(p: PureParams) -> float:
    """
    Concurrence of the ket described by p in closed form.

    C = 2 [a^2 d^2 + b^2 c^2 - 2abc d cos(theta1 + theta2 - theta3)]^{1/2}

    Raises:
        NegativeRadicand: If the bracket is below -1e-14
    """
    d = p.d
    bracket = (
        p.a**2 * d**2
        + p.b**2 * p.c**2
        - 2.0 * p.a * p.b * p.c * d * math.cos(p.theta1 + p.theta2 - p.theta3)
    )
    if bracket < -RADICAND_FLOOR:
        raise NegativeRadicand(
            "Pure-state concurrence radicand is negative", residual=bracket, limit=-RADICAND_FLOOR
        )
    return min(1.0, 2.0 * math.sqrt(max(0.0, bracket)))


def reduced_a(psi: np.ndarray) -> np.ndarray:
    """Reduced density matrix of qubit A, tracing out qubit B."""
    m = np.asarray(psi, dtype=complex).reshape(2, 2)
    return m @ matcore.dagger(m)


def marginal_eigenvalues(c: float) -> tuple[float, float]:
    """Eigenvalues (1 +- sqrt(1 - C^2)) / 2 of a pure state's marginal."""
    root = math.sqrt(max(0.0, (1.0 - c) * (1.0 + c)))
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


# Canonical form
def canonical_matrix(p: CanonicalParams) -> np.ndarray:
    """The canonical matrix for p, without validation."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = p.r
    m[1, 1] = p.s
    m[2, 2] = p.t
    m[3, 3] = p.eta
    m[0, 3] = p.u * np.exp(1j * p.tau1)
    m[1, 2] = p.v
    m[1, 3] = p.w * np.exp(1j * p.tau2)
    m[2, 3] = p.q * np.exp(1j * p.tau3)
    for i, j in ((0, 3), (1, 2), (1, 3), (2, 3)):
        m[j, i] = np.conj(m[i, j])
    return m


def assemble_canonical(p: CanonicalParams) -> DensityMatrix:
    """
    Build and validate the canonical density matrix.

    Raises:
        NotPSD: If the sign constraints hold but the matrix is not positive semidefinite
    """
    return validate(canonical_matrix(p))


def canonical_state(p: CanonicalParams) -> DensityMatrix:
    """
    Wrap the canonical matrix of parameters recovered from a valid state.

    Canonicalization of a rank-deficient state can leave the smallest
    eigenvalue a few ulps below zero, so positivity is not re-checked.
    """
    return DensityMatrix(canonical_matrix(p))


def det_canonical(p: CanonicalParams) -> float:
    """
    Closed-form determinant of the canonical matrix.

    -rsq^2 - rtw^2 + [r(1-r-s-t) - u^2](st - v^2) + 2rvwq cos(tau2 - tau3)
    """
    r, s, t, u, v, w, q = p.r, p.s, p.t, p.u, p.v, p.w, p.q
    return (
        -r * s * q**2
        - r * t * w**2
        + (r * p.eta - u**2) * (s * t - v**2)
        + 2.0 * r * v * w * q * math.cos(p.tau2 - p.tau3)
    )


def _top_rotation(block: np.ndarray) -> np.ndarray:
    """
    2x2 unitary W with W block W^dagger diagonal, larger eigenvalue first.

    Columns of W^dagger are the eigenvectors; each column's first nonzero
    entry is made real positive.
    """
    alpha = float(block[0, 0].real)
    beta = float(block[1, 1].real)
    off = block[0, 1]
    g = abs(off)
    phase = off / g if g > 0 else 1.0
    theta = 0.5 * math.atan2(2.0 * g, alpha - beta)
    c, s = math.cos(theta), math.sin(theta)
    top = np.array([c, s * np.conj(phase)], dtype=complex)
    bottom = np.array([-s * phase, c], dtype=complex)
    vecs = np.column_stack([_fix_phase(top), _fix_phase(bottom)])
    return matcore.dagger(vecs)


def _fix_phase(vec: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    lead = next((z for z in vec if abs(z) > tol), None)
    if lead is None:
        return vec
    return vec * (abs(lead) / lead)


_ROT_REAL = np.array([[0.0, -1.0], [1.0, 0.0]], dtype=complex)
_ROT_IMAG = np.array([[0.0, 1j], [1j, 0.0]], dtype=complex)
_GENERATORS = (
    ("a", _ROT_REAL),
    ("a", _ROT_IMAG),
    ("b", _ROT_REAL),
    ("b", _ROT_IMAG),
)


def _off_entries(m: np.ndarray) -> np.ndarray:
    return np.array([m[0, 1].real, m[0, 1].imag, m[0, 2].real, m[0, 2].imag])


def _givens(z: complex) -> np.ndarray:
    """exp of [[0, -conj(z)], [z, 0]]."""
    size = abs(z)
    if size == 0.0:
        return matcore.I2.copy()
    c, s = math.cos(size), math.sin(size) / size
    return np.array([[c, -s * z.conjugate()], [s * z, c]], dtype=complex)


def _newton_polish(
    m: np.ndarray, ua: np.ndarray, ub: np.ndarray, target: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """
    Drive the (0,1) and (0,2) entries to zero by Newton steps on the local angles.

    The alternating sweeps slow down when the top eigenvalues of the blocks
    nearly coincide; the Newton iteration converges quadratically from there.
    Steps that do not reduce the residual are halved.
    """
    steps = 0
    f = _off_entries(m)
    norm = float(np.linalg.norm(f))
    while norm > target and steps < CANONICAL_NEWTON_STEPS:
        jac = np.empty((4, 4))
        for k, (side, g) in enumerate(_GENERATORS):
            g4 = matcore.kron(g, matcore.I2) if side == "a" else matcore.kron(matcore.I2, g)
            jac[:, k] = _off_entries(g4 @ m - m @ g4)
        delta = np.linalg.lstsq(jac, -f, rcond=None)[0]

        scale = 1.0
        while scale > 1e-4:
            va = _givens(complex(delta[0], delta[1]) * scale)
            vb = _givens(complex(delta[2], delta[3]) * scale)
            u = matcore.kron(va, vb)
            trial = u @ m @ matcore.dagger(u)
            trial_f = _off_entries(trial)
            trial_norm = float(np.linalg.norm(trial_f))
            if trial_norm < norm:
                break
            scale /= 2.0
        else:
            break
        m, f, norm = trial, trial_f, trial_norm
        ua, ub = va @ ua, vb @ ub
        steps += 1
    return m, ua, ub, steps


def canonicalize(rho: DensityMatrix, tol: float = 1e-9) -> tuple[CanonicalParams, LocalUnitary]:
    """
    Bring rho to canonical form with local unitaries.

    Alternately diagonalizes the A=|0> block by a rotation on B and the
    B=|0> block by a rotation on A, putting the larger eigenvalue on |0> each
    time, then finishes with Newton steps on the local angles until the
    (0,1) and (0,2) entries vanish; then a phase on |1>_A
    makes the |01><10| entry real and nonnegative.

    Args:
        rho: Valid density matrix
        tol: Entrywise residual allowed between the rotated input and the canonical matrix

    Returns:
        (CanonicalParams, LocalUnitary) with U rho U^dagger == canonical_matrix(params)

    Raises:
        CanonicalizationResidual: If the sweeps do not converge or the reassembly deviates
    """
    m = rho.mat.copy()
    ua = matcore.I2.copy()
    ub = matcore.I2.copy()
    target = min(0.1 * tol, CANONICAL_TARGET)

    sweeps = 0
    while abs(m[0, 1]) > target or abs(m[0, 2]) > target:
        if sweeps >= CANONICAL_MAX_SWEEPS:
            break
        if abs(m[0, 1]) > target:
            rot = _top_rotation(m[0:2, 0:2])
            u = matcore.kron(matcore.I2, rot)
            m = u @ m @ matcore.dagger(u)
            ub = rot @ ub
        if abs(m[0, 2]) > target:
            rot = _top_rotation(m[np.ix_([0, 2], [0, 2])])
            u = matcore.kron(rot, matcore.I2)
            m = u @ m @ matcore.dagger(u)
            ua = rot @ ua
        sweeps += 1
    m, ua, ub, steps = _newton_polish(m, ua, ub, target)
    logger.debug("Canonicalization used %d sweeps and %d Newton steps", sweeps, steps)

    if abs(m[1, 2]) > 0.0:
        phase = m[1, 2] / abs(m[1, 2])
        rot = np.diag([1.0, phase]).astype(complex)
        u = matcore.kron(rot, matcore.I2)
        m = u @ m @ matcore.dagger(u)
        ua = rot @ ua

    diag = [float(m[k, k].real) for k in range(4)]
    r, s, t = (max(0.0, x) if x > -tol else x for x in diag[:3])
    total = r + s + t
    if total > 1.0:
        # rounding only; the trace is 1 within 1e-12
        r, s, t = r / total, s / total, t / total

    params = CanonicalParams(
        r=r,
        s=s,
        t=t,
        u=float(abs(m[0, 3])),
        v=float(abs(m[1, 2])),
        w=float(abs(m[1, 3])),
        q=float(abs(m[2, 3])),
        tau1=float(np.angle(m[0, 3])),
        tau2=float(np.angle(m[1, 3])),
        tau3=float(np.angle(m[2, 3])),
    )
    unitary = LocalUnitary(ua, ub)
    residual = canonicalization_residual(rho, params, unitary)
    if residual > tol:
        raise CanonicalizationResidual(
            f"Canonical form not reached after {sweeps} sweeps and {steps} Newton steps",
            residual=residual,
            limit=tol,
        )
    return params, unitary


def canonicalization_residual(
    rho: DensityMatrix, params: CanonicalParams, unitary: LocalUnitary
) -> float:
    """Largest entrywise deviation between U rho U^dagger and the canonical matrix."""
    return float(np.max(np.abs(unitary.apply(rho.mat) - canonical_matrix(params))))


# Convex combination of |00> and an entangled pure state
def convex_combo(p: ConvexComboParams) -> DensityMatrix:
    """p |00><00| + (1 - p) |psi_e><psi_e|."""
    sep = np.zeros((4, 4), dtype=complex)
    sep[0, 0] = 1.0
    ent = projector(ket_from_params(p.psi))
    return validate(p.p * sep + (1.0 - p.p) * ent)


# Named fixtures
def bell_state() -> DensityMatrix:
    """|Phi+> = (|00> + |11>) / sqrt(2)."""
    return validate(projector(np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2.0)))


def maximally_mixed() -> DensityMatrix:
    return validate(np.eye(4, dtype=complex) / 4.0)


def werner_state(p: float) -> DensityMatrix:
    """p |Phi+><Phi+| + (1 - p) I/4."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameters(f"Werner weight must lie in [0, 1], got {p}")
    return validate(p * bell_state().mat + (1.0 - p) * np.eye(4, dtype=complex) / 4.0)


def product_state(ket_a: np.ndarray, ket_b: np.ndarray) -> DensityMatrix:
    """|a>|b> for two normalized qubit kets."""
    a = np.asarray(ket_a, dtype=complex).reshape(2)
    b = np.asarray(ket_b, dtype=complex).reshape(2)
    psi = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
    return validate(projector(psi))


FIXTURES = {
    "bell": bell_state,
    "maximally-mixed": maximally_mixed,
    "product": lambda: product_state([1, 0], [1, 0]),
}


def fixture(name: str, p: Optional[float] = None) -> DensityMatrix:
    """
    Look up a named fixture state.

    Args:
        name: One of "bell", "maximally-mixed", "product", "werner"
        p: Mixing weight, required for "werner"
    """
    if name == "werner":
        if p is None:
            raise InvalidParameters("The werner fixture needs a mixing weight p")
        return werner_state(p)
    if name not in FIXTURES:
        known = ", ".join(sorted([*FIXTURES, "werner"]))
        raise InvalidParameters(f"Unknown fixture '{name}' (expected one of {known})")
    return FIXTURES[name]()


# Density-matrix documents
def parse_density_document(data: Any) -> tuple[DensityMatrix, Optional[str]]:
    """
    Parse ``{"matrix": [[[re, im] x4] x4], "label": ...}`` strictly.

    Raises:
        MatrixFormatError: Naming the offending row/column
        NotHermitian, TraceNotOne, NotPSD: If the matrix is not a state
    """
    if not isinstance(data, dict):
        raise MatrixFormatError("Document must be an object with a 'matrix' field")
    if "matrix" not in data:
        raise MatrixFormatError("Document has no 'matrix' field")
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise MatrixFormatError("'label' must be a string")

    rows = data["matrix"]
    if not isinstance(rows, list) or len(rows) != 4:
        raise MatrixFormatError("'matrix' must have exactly 4 rows")
    mat = np.zeros((4, 4), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != 4:
            raise MatrixFormatError("Row must have exactly 4 entries", row=i)
        for j, entry in enumerate(row):
            if not isinstance(entry, list) or len(entry) != 2:
                raise MatrixFormatError("Entry must be a [re, im] pair", row=i, col=j)
            re, im = entry
            if not (utils.is_finite_number(re) and utils.is_finite_number(im)):
                raise MatrixFormatError("Entry must hold two finite numbers", row=i, col=j)
            mat[i, j] = complex(re, im)
    return validate(mat), label


def read_density_matrix(path: str) -> tuple[DensityMatrix, Optional[str]]:
    """Read and validate a density-matrix document from disk."""
    try:
        data = utils.read_json(path)
    except OSError as e:
        raise InputError(f"Cannot read {path}: {e.strerror or e}")
    except ValueError as e:
        raise MatrixFormatError(f"{path} is not a valid document: {e}")
    return parse_density_document(data)


def density_document(rho: DensityMatrix, label: Optional[str] = None) -> dict[str, Any]:
    """Encode a state in the density-matrix document format."""
    doc: dict[str, Any] = {"matrix": utils.matrix_rows(rho.mat)}
    if label is not None:
        doc["label"] = label
    return doc
