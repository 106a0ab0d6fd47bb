"""Tests for the dense matrix kernels."""

import numpy as np
import pytest

from twoqubit_entanglement import matcore, sampling
from twoqubit_entanglement.errors import InvalidParameters, NotHermitian, SpectrumNotReal


def test_kron_basis_order():
    """sigma_x on qubit A maps |00> to |10>, which is index 2."""
    e00 = np.array([1, 0, 0, 0], dtype=complex)
    out = matcore.kron(matcore.SIGMA_X, matcore.I2) @ e00
    np.testing.assert_allclose(out, [0, 0, 1, 0])

    out = matcore.kron(matcore.I2, matcore.SIGMA_X) @ e00
    np.testing.assert_allclose(out, [0, 1, 0, 0])


def test_sigma_yy_is_real_antidiagonal():
    expected = np.fliplr(np.diag([-1.0, 1.0, 1.0, -1.0]))
    np.testing.assert_allclose(matcore.SIGMA_YY, expected)


def test_det4_diagonal():
    assert matcore.det4(np.diag([1.0, 2.0, 3.0, 4.0])) == pytest.approx(24.0)


def test_det4_matches_numpy(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    np.testing.assert_allclose(matcore.det4(m), np.linalg.det(m), rtol=1e-12)


def test_det4_is_reproducible(rng):
    m = matcore.random_hermitian(rng)
    assert matcore.det4(m) == matcore.det4(m.copy())


def test_as_matrix_rejects_bad_input():
    with pytest.raises(InvalidParameters):
        matcore.as_matrix(np.eye(3), 4)
    bad = np.eye(4, dtype=complex)
    bad[1, 2] = np.nan
    with pytest.raises(InvalidParameters):
        matcore.as_matrix(bad, 4)


def test_hermitian_eig_matches_numpy(rng):
    for _ in range(5):
        m = matcore.random_hermitian(rng)
        spec = matcore.hermitian_eig(m)
        expected = np.sort(np.linalg.eigvalsh(m))[::-1]
        np.testing.assert_allclose(spec.eigenvalues, expected, atol=1e-10)
        for k in range(4):
            v = spec.eigenvectors[:, k]
            np.testing.assert_allclose(m @ v, spec.eigenvalues[k] * v, atol=1e-10)


def test_hermitian_eig_descending_with_degeneracy():
    spec = matcore.hermitian_eig(np.diag([0.1, 0.4, 0.4, 0.1]).astype(complex))
    np.testing.assert_allclose(spec.eigenvalues, [0.4, 0.4, 0.1, 0.1])


def test_hermitian_eig_zero_matrix():
    spec = matcore.hermitian_eig(np.zeros((4, 4)))
    np.testing.assert_array_equal(spec.eigenvalues, np.zeros(4))


def test_hermitian_eig_rejects_non_hermitian():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 0.5
    with pytest.raises(NotHermitian) as excinfo:
        matcore.hermitian_eig(m)
    assert excinfo.value.residual == pytest.approx(0.5**0.5)


def test_general_eig4_real_sorted_descending():
    lam = matcore.general_eig4_real(np.diag([0.1, 0.7, 0.0, 0.2]))
    np.testing.assert_allclose(lam, [0.7, 0.2, 0.1, 0.0])


def test_general_eig4_real_rejects_complex_spectrum():
    m = np.zeros((4, 4))
    m[0, 1], m[1, 0] = -1.0, 1.0  # rotation block, eigenvalues +-i
    with pytest.raises(SpectrumNotReal):
        matcore.general_eig4_real(m)


def test_haar_unitary_is_unitary(rng):
    u = matcore.haar_unitary(rng)
    np.testing.assert_allclose(matcore.dagger(u) @ u, matcore.I2, atol=1e-12)


def test_weyl_holds_for_random_pairs(rng):
    for _ in range(5):
        x = matcore.random_hermitian(rng)
        y = matcore.random_hermitian(rng)
        assert matcore.weyl_violations(x, y) == []


def test_off_diagonal_norm_of_diagonal_matrix_is_zero():
    assert matcore._off_norm(np.diag([0.4, 0.3, 0.2, 0.1]).astype(complex)) == 0.0


def test_hermitian_eig_converges_on_ginibre_states():
    for index in range(200):
        rho = sampling.draw_for(0, index, "ginibre-rank-4").rho
        spec = matcore.hermitian_eig(rho.mat)
        np.testing.assert_allclose(
            np.sort(spec.eigenvalues), np.linalg.eigvalsh(rho.mat), atol=1e-12
        )
