"""Dense 2x2 / 4x4 complex matrix kernels.

The Hermitian eigensolver here is a cyclic Jacobi iteration. It serves as the
brute-force oracle for every closed form elsewhere in the package, so it must
not share code with them.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParameters, NoConvergence, NotHermitian, SpectrumNotReal

logger = logging.getLogger(__name__)

HERMITIAN_RTOL = 1e-12
MAX_SWEEPS = 64

# Pauli matrices in the computational basis
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)

_JACOBI_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True, eq=False)
class HermitianSpectrum:
    """Eigen-decomposition of a Hermitian 4x4 matrix."""

    eigenvalues: np.ndarray  # shape (4,), descending
    eigenvectors: np.ndarray  # shape (4, 4), column k pairs with eigenvalues[k]


def as_matrix(m, n: int) -> np.ndarray:
    """
    Coerce input to an n x n complex128 array with finite entries.

    Args:
        m: Array-like input
        n: Required dimension (2 or 4)

    Returns:
        Fresh complex array
    """
    arr = np.array(m, dtype=complex)
    if arr.shape != (n, n):
        raise InvalidParameters(f"Expected a {n}x{n} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameters("Matrix contains NaN or infinite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(m).T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two 2x2 matrices: out[2i+k, 2j+l] = a[i, j] * b[k, l]."""
    return np.kron(as_matrix(a, 2), as_matrix(b, 2))


SIGMA_YY = np.kron(SIGMA_Y, SIGMA_Y)


def _det3(m: np.ndarray) -> complex:
    return (
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def det4(m: np.ndarray) -> complex:
    """
    Determinant by cofactor expansion along the first row.

    The evaluation order is fixed, so results are bit-reproducible.

    Args:
        m: 4x4 matrix

    Returns:
        Complex determinant
    """
    m = as_matrix(m, 4)
    total = 0j
    for j in range(4):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        sign = 1.0 if j % 2 == 0 else -1.0
        total += sign * m[0, j] * _det3(minor)
    return complex(total)


def hermiticity_residual(m: np.ndarray) -> float:
    """Frobenius norm of m - m^dagger."""
    return float(np.linalg.norm(m - dagger(m)))


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return (m + m^dagger) / 2."""
    return 0.5 * (m + dagger(m))


def check_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """
    Verify Hermiticity within rtol * ||m|| and return the symmetrized matrix.

    Raises:
        NotHermitian: If ||m - m^dagger|| exceeds rtol * ||m||
    """
    norm = float(np.linalg.norm(m))
    residual = hermiticity_residual(m)
    limit = rtol * norm
    if residual > limit:
        raise NotHermitian("Matrix is not Hermitian", residual=residual, limit=limit)
    return symmetrize(m)


def _off_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi_rotation(a: np.ndarray, p: int, q: int) -> Optional[np.ndarray]:
    """Unitary J with (J^dagger a J)[p, q] == 0, or None if already zero."""
    apq = a[p, q]
    g = abs(apq)
    if g == 0.0:
        return None
    phase = apq / g
    theta = (a[q, q].real - a[p, p].real) / (2.0 * g)
    if theta == 0.0:
        t = 1.0
    else:
        t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    j = np.eye(a.shape[0], dtype=complex)
    j[p, p] = c
    j[q, q] = c
    j[p, q] = s * phase
    j[q, p] = -s * np.conj(phase)
    return j


def hermitian_eig(m: np.ndarray, tol: float = 1e-12) -> HermitianSpectrum:
    """
    Full spectrum of a Hermitian 4x4 matrix by cyclic Jacobi rotations.

    Args:
        m: Hermitian matrix (within 1e-12 relative)
        tol: Residual tolerance; each pair must satisfy ||Mv - lv|| <= tol * ||M||

    Returns:
        HermitianSpectrum with eigenvalues in descending order

    Raises:
        NotHermitian: If m is not Hermitian within tolerance
        NoConvergence: If the sweep limit is hit or a residual gate fails
    """
    m = check_hermitian(as_matrix(m, 4))
    norm = float(np.linalg.norm(m))
    a = m.copy()
    v = np.eye(4, dtype=complex)

    if norm == 0.0:
        return HermitianSpectrum(eigenvalues=np.zeros(4), eigenvectors=v)

    stop = 1e-14 * norm
    sweeps = 0
    while _off_norm(a) > stop:
        if sweeps >= MAX_SWEEPS:
            off = _off_norm(a)
            if off > tol * norm:
                raise NoConvergence(
                    f"Jacobi did not converge in {MAX_SWEEPS} sweeps", residual=off, limit=tol * norm
                )
            break
        rotated = False
        for p, q in _JACOBI_PAIRS:
            j = _jacobi_rotation(a, p, q)
            if j is None:
                continue
            a = dagger(j) @ a @ j
            v = v @ j
            rotated = True
        sweeps += 1
        if not rotated:
            break
    logger.debug("Jacobi converged in %d sweeps", sweeps)

    w = np.real(np.diag(a)).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]

    limit = tol * norm
    for k in range(4):
        residual = float(np.linalg.norm(m @ v[:, k] - w[k] * v[:, k]))
        if residual > limit:
            raise NoConvergence(f"Eigenpair {k} residual too large", residual=residual, limit=limit)
    gram = float(np.linalg.norm(dagger(v) @ v - I4))
    if gram > max(tol, 1e-12):
        raise NoConvergence("Eigenvectors are not orthonormal", residual=gram, limit=tol)
    trace_gap = abs(float(np.sum(w)) - float(np.trace(m).real))
    if trace_gap > 1e-12 * max(1.0, norm):
        raise NoConvergence("Eigenvalue sum does not match trace", residual=trace_gap)

    return HermitianSpectrum(eigenvalues=w, eigenvectors=v)


def general_eig4_real(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """
    Real spectrum of a 4x4 product such as rho @ rho_tilde.

    Args:
        m: Matrix whose spectrum is known to be real and nonnegative
        tol: Largest admissible imaginary part; also the clamping floor

    Returns:
        Four real eigenvalues in descending order, values in [-tol, 0) set to 0

    Raises:
        SpectrumNotReal: If any eigenvalue has |Im| > tol
    """
    m = as_matrix(m, 4)
    raw = np.linalg.eigvals(m)
    worst = float(np.max(np.abs(raw.imag)))
    if worst > tol:
        raise SpectrumNotReal("Spectrum has non-negligible imaginary parts", residual=worst, limit=tol)
    lam = raw.real.copy()
    lam[(lam < 0.0) & (lam >= -tol)] = 0.0
    return np.sort(lam)[::-1].copy()


def random_hermitian(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    """Random Hermitian matrix with complex Gaussian entries (GUE-like scaling)."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + dagger(g))


def haar_unitary(rng: np.random.Generator, n: int = 2) -> np.ndarray:
    """Haar-random unitary via QR with the diagonal phase fix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def weyl_violations(x: np.ndarray, y: np.ndarray, slack: float = 1e-10) -> list[tuple[str, int, int, float]]:
    """
    Check both Weyl inequalities for Hermitian 4x4 matrices x and y.

    Upper: l_j(X+Y) <= l_i(X) + l_{j-i+1}(Y) for i <= j.
    Lower: l_j(X+Y) >= l_i(X) + l_{j-i+n}(Y) for i >= j.
    Indices are 1-based over descending eigenvalues.

    Returns:
        List of (kind, i, j, excess) for every violated combination
    """
    n = 4
    lx = hermitian_eig(x).eigenvalues
    ly = hermitian_eig(y).eigenvalues
    ls = hermitian_eig(x + y).eigenvalues
    out = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i <= j:
                excess = ls[j - 1] - (lx[i - 1] + ly[j - i])
                if excess > slack:
                    out.append(("upper", i, j, float(excess)))
            if i >= j:
                excess = (lx[i - 1] + ly[j - i + n - 1]) - ls[j - 1]
                if excess > slack:
                    out.append(("lower", i, j, float(excess)))
    return out
