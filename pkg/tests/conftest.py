"""Shared fixtures for the test suite."""

from pathlib import Path

import numpy as np
import pytest

from twoqubit_entanglement import states
from twoqubit_entanglement.config import Tolerances

FIXTURES = Path(__file__).parent / "fixtures"

# (document, expected verdict, expected concurrence)
GOLDEN = [
    ("bell.json", "inseparable", 1.0),
    ("maximally_mixed.json", "separable", 0.0),
    ("werner_0p2.json", "separable", 0.0),
    ("werner_1_3.json", "boundary", 0.0),
    ("werner_0p5.json", "inseparable", 0.25),
    ("werner_0p9.json", "inseparable", 0.85),
]


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


@pytest.fixture
def tol():
    return Tolerances()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def bell():
    return states.bell_state()


@pytest.fixture
def mixed():
    return states.maximally_mixed()


@pytest.fixture
def generic_canonical():
    """Diagonally dominant, hence PSD, canonical parameters with every modulus nonzero."""
    return states.CanonicalParams(
        r=0.4, s=0.2, t=0.15, u=0.1, v=0.05, w=0.05, q=0.05, tau1=0.3, tau2=1.1, tau3=-0.7
    )
