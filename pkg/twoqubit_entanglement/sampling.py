"""Seeded random two-qubit states.

Each draw of a campaign gets its own generator derived from (seed, index),
so any draw can be regenerated alone and the draws can run in any order.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import matcore
from .config import ENSEMBLES
from .errors import ConfigError, RejectionExhausted, UnknownEnsemble
from .states import (
    TWO_PI,
    CanonicalParams,
    ConvexComboParams,
    DensityMatrix,
    LocalUnitary,
    PureParams,
    canonical_matrix,
    convex_combo,
    params_from_ket,
    projector,
    pure_concurrence,
    validate,
)

logger = logging.getLogger(__name__)

MIN_COMBO_CONCURRENCE = 0.05
CANONICAL_MODULUS_MAX = 0.5
X_MASK = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=bool,
)


@dataclass(frozen=True, eq=False)
class Draw:
    """One sampled state and whatever parameterization produced it."""

    ensemble: str
    rho: DensityMatrix
    ket: Optional[np.ndarray] = None
    pure: Optional[PureParams] = None
    canonical: Optional[CanonicalParams] = None
    combo: Optional[ConvexComboParams] = None


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_local_unitary(rng: np.random.Generator) -> LocalUnitary:
    """Independent Haar-random unitaries on each qubit."""
    return LocalUnitary(matcore.haar_unitary(rng), matcore.haar_unitary(rng))


class StateSampler:
    """Draws states from the named ensembles with one numpy Generator."""

    def __init__(self, rng: np.random.Generator, max_rejections: int = 10000):
        self.rng = rng
        self.max_rejections = max_rejections

    @classmethod
    def from_seed(cls, seed, max_rejections: int = 10000) -> "StateSampler":
        """seed is anything numpy.random.default_rng accepts, e.g. an int or [seed, index]."""
        return cls(np.random.default_rng(seed), max_rejections)

    def draw(self, ensemble: str) -> Draw:
        if ensemble.startswith("ginibre-rank-"):
            try:
                rank = int(ensemble.rsplit("-", 1)[1])
            except ValueError:
                rank = 0
            if rank not in (1, 2, 3, 4):
                raise ConfigError(f"Ginibre rank must be 1..4, got '{ensemble}'")
            return self.ginibre(rank)
        samplers = {
            "haar-pure": self.haar_pure,
            "canonical-uniform": self.canonical_uniform,
            "convex-combo": self.convex_combo,
            "x-state": self.x_state,
        }
        if ensemble not in samplers:
            raise UnknownEnsemble(
                f"Unknown ensemble '{ensemble}' (expected one of {', '.join(ENSEMBLES)})"
            )
        return samplers[ensemble]()

    def ket(self) -> np.ndarray:
        """Haar-random normalized 4-vector."""
        psi = _complex_gaussian(self.rng, 4)
        return psi / np.linalg.norm(psi)

    def ginibre(self, rank: int) -> Draw:
        """G G^dagger / tr(G G^dagger) with G a 4 x rank complex Gaussian matrix."""
        g = _complex_gaussian(self.rng, (4, rank))
        m = g @ matcore.dagger(g)
        rho = validate(m / np.trace(m).real)
        if rank > 1:
            return Draw(ensemble=f"ginibre-rank-{rank}", rho=rho)
        psi = g[:, 0] / np.linalg.norm(g[:, 0])
        return Draw(ensemble="ginibre-rank-1", rho=rho, ket=psi, pure=params_from_ket(psi))

    def haar_pure(self) -> Draw:
        psi = self.ket()
        return Draw(
            ensemble="haar-pure", rho=validate(projector(psi)), ket=psi, pure=params_from_ket(psi)
        )

    def canonical_uniform(self) -> Draw:
        """
        Rejection sampling of canonical parameters until the matrix is PSD.

        Populations come from four normalized uniforms, moduli are uniform on
        [0, 1/2] and phases uniform on [0, 2 pi).
        """
        for attempt in range(1, self.max_rejections + 1):
            e = self.rng.uniform(size=4)
            r, s, t = (e[:3] / e.sum()).tolist()
            u, v, w, q = self.rng.uniform(0.0, CANONICAL_MODULUS_MAX, size=4).tolist()
            tau1, tau2, tau3 = self.rng.uniform(0.0, TWO_PI, size=3).tolist()
            params = CanonicalParams(r, s, t, u, v, w, q, tau1, tau2, tau3)
            m = canonical_matrix(params)
            if np.linalg.eigvalsh(m)[0] >= 0.0:
                logger.debug("canonical-uniform accepted after %d attempts", attempt)
                return Draw(ensemble="canonical-uniform", rho=validate(m), canonical=params)
        raise RejectionExhausted(
            f"No PSD canonical matrix after {self.max_rejections} attempts"
        )

    def convex_combo(self) -> Draw:
        """p |00><00| + (1-p)|psi><psi| with psi re-sampled until C(psi) > 0.05."""
        p = float(self.rng.uniform())
        for attempt in range(1, self.max_rejections + 1):
            pure = params_from_ket(self.ket())
            if pure_concurrence(pure) > MIN_COMBO_CONCURRENCE:
                combo = ConvexComboParams(p=p, psi=pure)
                return Draw(ensemble="convex-combo", rho=convex_combo(combo), pure=pure, combo=combo)
            logger.debug("convex-combo rejected pure component (attempt %d)", attempt)
        raise RejectionExhausted(
            f"No pure component with C > {MIN_COMBO_CONCURRENCE} after {self.max_rejections} attempts"
        )

    def x_state(self) -> Draw:
        """Full-rank Ginibre draw with every entry off the X pattern set to zero."""
        base = self.ginibre(4).rho.mat
        return Draw(ensemble="x-state", rho=validate(np.where(X_MASK, base, 0.0)))

    def local_unitary(self) -> LocalUnitary:
        return random_local_unitary(self.rng)


def draw_for(seed: int, index: int, ensemble: str, max_rejections: int = 10000) -> Draw:
    """The index-th draw of a campaign with master seed ``seed``."""
    return StateSampler.from_seed([seed, index], max_rejections).draw(ensemble)


def random_state(ensemble: str, seed: int, max_rejections: int = 10000) -> DensityMatrix:
    """Deterministic random state from one of the named ensembles."""
    return StateSampler.from_seed(seed, max_rejections).draw(ensemble).rho
