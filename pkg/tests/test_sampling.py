"""Tests for the seeded state samplers."""

import numpy as np
import pytest

from twoqubit_entanglement import sampling, states
from twoqubit_entanglement.config import ENSEMBLES
from twoqubit_entanglement.errors import ConfigError, RejectionExhausted, UnknownEnsemble


@pytest.mark.parametrize("ensemble", ENSEMBLES)
def test_every_ensemble_yields_valid_states(ensemble):
    for index in range(3):
        draw = sampling.draw_for(2, index, ensemble)
        assert draw.ensemble == ensemble
        # re-validation must accept the stored matrix unchanged
        np.testing.assert_allclose(states.validate(draw.rho.mat).mat, draw.rho.mat)


@pytest.mark.parametrize("ensemble", ["ginibre-rank-4", "haar-pure", "canonical-uniform"])
def test_draws_are_reproducible(ensemble):
    first = sampling.draw_for(9, 5, ensemble)
    again = sampling.draw_for(9, 5, ensemble)
    other = sampling.draw_for(9, 6, ensemble)
    np.testing.assert_array_equal(first.rho.mat, again.rho.mat)
    assert not np.allclose(first.rho.mat, other.rho.mat)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_ginibre_rank(rank):
    draw = sampling.draw_for(1, 0, f"ginibre-rank-{rank}")
    assert np.linalg.matrix_rank(draw.rho.mat, tol=1e-10) == rank


def test_pure_draws_carry_parameters():
    for ensemble in ("haar-pure", "ginibre-rank-1"):
        draw = sampling.draw_for(4, 0, ensemble)
        assert draw.ket is not None and draw.pure is not None
        rebuilt = states.projector(states.ket_from_params(draw.pure))
        np.testing.assert_allclose(rebuilt, draw.rho.mat, atol=1e-12)


def test_canonical_uniform_matches_its_parameters():
    draw = sampling.draw_for(4, 0, "canonical-uniform")
    np.testing.assert_allclose(states.canonical_matrix(draw.canonical), draw.rho.mat, atol=1e-15)
    p = draw.canonical
    assert max(p.u, p.v, p.w, p.q) <= sampling.CANONICAL_MODULUS_MAX


def test_convex_combo_draw():
    draw = sampling.draw_for(4, 1, "convex-combo")
    assert states.pure_concurrence(draw.combo.psi) > sampling.MIN_COMBO_CONCURRENCE
    assert 0.0 <= draw.combo.p <= 1.0
    np.testing.assert_allclose(states.convex_combo(draw.combo).mat, draw.rho.mat)
    assert np.linalg.matrix_rank(draw.rho.mat, tol=1e-10) <= 2


def test_x_state_pattern():
    draw = sampling.draw_for(4, 2, "x-state")
    off_pattern = draw.rho.mat[~sampling.X_MASK]
    np.testing.assert_array_equal(off_pattern, 0.0)


def test_unknown_ensemble():
    sampler = sampling.StateSampler.from_seed(0)
    with pytest.raises(UnknownEnsemble):
        sampler.draw("gaussian")
    with pytest.raises(ConfigError):
        sampler.draw("ginibre-rank-7")


def test_rejection_exhausted(monkeypatch):
    monkeypatch.setattr(sampling, "MIN_COMBO_CONCURRENCE", 1.1)
    sampler = sampling.StateSampler.from_seed(0, max_rejections=20)
    with pytest.raises(RejectionExhausted):
        sampler.convex_combo()


def test_random_state_is_deterministic():
    a = sampling.random_state("ginibre-rank-2", seed=17)
    b = sampling.random_state("ginibre-rank-2", seed=17)
    np.testing.assert_array_equal(a.mat, b.mat)


def test_random_local_unitary(rng):
    u = sampling.random_local_unitary(rng)
    np.testing.assert_allclose(u.matrix @ u.matrix.conj().T, np.eye(4), atol=1e-12)
