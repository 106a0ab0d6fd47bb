"""Partial transpose, its spectrum, and the separability verdict."""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import matcore
from .entanglement import concurrence_oracle
from .errors import CriteriaDisagreement, InvalidParameters, OutOfRange
from .states import DensityMatrix

logger = logging.getLogger(__name__)

SEPARABLE = "separable"
INSEPARABLE = "inseparable"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class PTSpectrum:
    etas: tuple[float, float, float, float]  # descending
    det_pt: float
    signature: tuple[int, int, int]  # (n_pos, n_zero, n_neg)
    negativity: float


@dataclass(frozen=True)
class Verdict:
    """Separability decision with the evidence of both criteria."""

    status: str
    det_pt: float
    concurrence: float
    agreement: bool
    eps_sep: float
    eps_c: float

    @property
    def entangled(self) -> bool:
        return self.status == INSEPARABLE


def partial_transpose(
    rho: Union[DensityMatrix, np.ndarray], subsystem: str = "B"
) -> np.ndarray:
    """
    Partial transpose over one qubit.

    Args:
        rho: State or 4x4 array
        subsystem: "B" transposes each 2x2 block, "A" transposes the block layout

    Returns:
        New 4x4 array (Hermitian, unit trace, not necessarily PSD)
    """
    m = rho.mat if isinstance(rho, DensityMatrix) else matcore.as_matrix(rho, 4)
    t = m.reshape(2, 2, 2, 2)  # t[a, b, a', b']
    if subsystem == "B":
        return t.transpose(0, 3, 2, 1).reshape(4, 4).copy()
    if subsystem == "A":
        return t.transpose(2, 1, 0, 3).reshape(4, 4).copy()
    raise InvalidParameters(f"Subsystem must be 'A' or 'B', got {subsystem!r}")


def partial_transpose_b(rho: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
    return partial_transpose(rho, "B")


def signature(etas, eps: float) -> tuple[int, int, int]:
    """Count (positive, zero, negative) eigenvalues at threshold eps."""
    n_pos = sum(1 for e in etas if e > eps)
    n_neg = sum(1 for e in etas if e < -eps)
    return n_pos, len(etas) - n_pos - n_neg, n_neg


def pt_spectrum(rho: DensityMatrix, eps: float = 1e-9) -> PTSpectrum:
    """
    Spectrum, determinant, signature and negativity of the partial transpose.

    Args:
        rho: Valid density matrix
        eps: Threshold separating zero from positive/negative eigenvalues
    """
    pt = partial_transpose_b(rho)
    etas = matcore.hermitian_eig(pt).eigenvalues
    return PTSpectrum(
        etas=tuple(float(e) for e in etas),  # type: ignore[arg-type]
        det_pt=float(matcore.det4(pt).real),
        signature=signature(etas, eps),
        negativity=float(-np.sum(etas[etas < 0.0])),
    )


def verdict(
    rho: DensityMatrix,
    eps_sep: float = 1e-10,
    eps_c: float = 1e-8,
    concurrence: Optional[float] = None,
) -> Verdict:
    """
    Classify rho by the sign of det(rho^PT), cross-checked against the concurrence.

    inseparable when det_pt < -eps_sep, separable when det_pt > eps_sep,
    boundary when |det_pt| <= eps_sep. The concurrence is computed
    independently (or passed in) and must agree away from the boundary.

    Raises:
        CriteriaDisagreement: det_pt < -eps_sep with C < eps_c/10, or det_pt > eps_sep with C > eps_c
    """
    det_pt = float(matcore.det4(partial_transpose_b(rho)).real)
    if concurrence is None:
        concurrence = concurrence_oracle(rho).concurrence

    if det_pt < -eps_sep and concurrence < eps_c / 10.0:
        raise CriteriaDisagreement(
            f"det(rho^PT) = {det_pt:.3e} marks the state inseparable but C = {concurrence:.3e}"
        )
    if det_pt > eps_sep and concurrence > eps_c:
        raise CriteriaDisagreement(
            f"det(rho^PT) = {det_pt:.3e} marks the state separable but C = {concurrence:.3e}"
        )

    if det_pt < -eps_sep:
        status = INSEPARABLE
    elif det_pt > eps_sep:
        status = SEPARABLE
    else:
        status = BOUNDARY
    agreement = (det_pt < -eps_sep) == (concurrence > eps_c)
    if status == BOUNDARY and concurrence >= eps_c:
        logger.debug("det(rho^PT) within eps_sep while C = %.3e", concurrence)
    return Verdict(
        status=status,
        det_pt=det_pt,
        concurrence=concurrence,
        agreement=agreement,
        eps_sep=eps_sep,
        eps_c=eps_c,
    )


def pure_pt_eigen(c: float) -> tuple[float, float, float, float]:
    """
    Partial-transpose eigenvalues of a pure state with concurrence c.

    Returns:
        (C/2, -C/2, (1 + sqrt(1 - C^2))/2, (1 - sqrt(1 - C^2))/2), unsorted
    """
    if not -1e-12 <= c <= 1.0 + 1e-12:
        raise OutOfRange(f"Concurrence must lie in [0, 1], got {c!r}")
    c = min(1.0, max(0.0, c))
    root = math.sqrt((1.0 - c) * (1.0 + c))
    return (0.5 * c, -0.5 * c, 0.5 * (1.0 + root), 0.5 * (1.0 - root))
