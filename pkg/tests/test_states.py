"""Tests for state validation, parameterizations, canonical form and documents."""

import json
import math

import numpy as np
import pytest
from conftest import fixture_path

from twoqubit_entanglement import matcore, states
from twoqubit_entanglement.errors import (
    InputError,
    InvalidParameters,
    MatrixFormatError,
    NotHermitian,
    NotPSD,
    TraceNotOne,
)
from twoqubit_entanglement.sampling import StateSampler


class TestValidate:
    def test_accepts_fixtures(self, bell, mixed):
        assert np.trace(bell.mat).real == pytest.approx(1.0)
        np.testing.assert_allclose(mixed.mat, np.eye(4) / 4)

    def test_not_hermitian(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1
        with pytest.raises(NotHermitian):
            states.validate(m)

    def test_trace_not_one(self):
        with pytest.raises(TraceNotOne) as excinfo:
            states.validate(np.eye(4) / 2)
        assert excinfo.value.residual == pytest.approx(1.0)

    def test_not_psd(self):
        with pytest.raises(NotPSD):
            states.validate(np.diag([0.6, 0.6, -0.2, 0.0]))

    def test_input_errors_are_value_errors(self):
        with pytest.raises(ValueError):
            states.validate(np.eye(4))

    def test_matrix_is_read_only(self, bell):
        with pytest.raises(ValueError):
            bell.mat[0, 0] = 1.0


class TestPureParams:
    def test_rejects_negative_amplitude(self):
        with pytest.raises(InvalidParameters):
            states.PureParams(a=-0.1, b=0.5, c=0.5)

    def test_rejects_norm_above_one(self):
        with pytest.raises(InvalidParameters):
            states.PureParams(a=0.8, b=0.8, c=0.0)

    def test_rejects_nan(self):
        with pytest.raises(InvalidParameters):
            states.PureParams(a=float("nan"), b=0.0, c=0.0)

    def test_phases_wrap_into_range(self):
        p = states.PureParams(a=0.5, b=0.5, c=0.5, theta1=-math.pi / 2, theta2=2 * math.pi + 0.5)
        assert p.theta1 == pytest.approx(1.5 * math.pi)
        assert p.theta2 == pytest.approx(0.5)
        assert 0.0 <= p.theta3 < 2 * math.pi

    def test_d_completes_the_norm(self):
        p = states.PureParams(a=0.6, b=0.0, c=0.0)
        assert p.d == pytest.approx(0.8)

    def test_ket_round_trip_up_to_global_phase(self):
        psi = np.array([0.5j, 0.5, -0.5, 0.5 * np.exp(0.3j)])
        p = states.params_from_ket(psi)
        np.testing.assert_allclose(
            states.projector(states.ket_from_params(p)), states.projector(psi), atol=1e-12
        )
        assert p.a == pytest.approx(0.5)

    def test_params_from_ket_rejects_unnormalized(self):
        with pytest.raises(InvalidParameters):
            states.params_from_ket(np.array([1.0, 1.0, 0.0, 0.0]))


class TestPureConcurrence:
    def test_bell_like(self):
        p = states.PureParams(a=1 / math.sqrt(2), b=0.0, c=0.0)
        assert states.pure_concurrence(p) == pytest.approx(1.0)

    def test_product(self):
        assert states.pure_concurrence(states.PureParams(a=1.0, b=0.0, c=0.0)) == 0.0

    def test_product_with_phases(self):
        # (|0> + |1>)(|0> + e^{i phi}|1>) / 2 is a product state for any phi
        phi = 0.7
        p = states.PureParams(a=0.5, b=0.5, c=0.5, theta1=phi, theta2=0.0, theta3=phi)
        assert states.pure_concurrence(p) == pytest.approx(0.0, abs=1e-7)

    def test_marginal_eigenvalues(self):
        assert states.marginal_eigenvalues(1.0) == pytest.approx((0.5, 0.5))
        assert states.marginal_eigenvalues(0.0) == pytest.approx((1.0, 0.0))
        assert states.marginal_eigenvalues(0.6) == pytest.approx((0.9, 0.1))

    def test_reduced_state_spectrum(self):
        p = states.PureParams(a=0.6, b=0.3, c=0.2, theta1=0.4, theta2=1.3, theta3=2.9)
        psi = states.ket_from_params(p)
        eig = np.sort(np.linalg.eigvalsh(states.reduced_a(psi)))[::-1]
        expected = states.marginal_eigenvalues(states.pure_concurrence(p))
        np.testing.assert_allclose(eig, expected, atol=1e-12)


class TestCanonical:
    def test_params_validation(self):
        with pytest.raises(InvalidParameters):
            states.CanonicalParams(r=0.5, s=0.4, t=0.3)
        with pytest.raises(InvalidParameters):
            states.CanonicalParams(r=0.4, s=0.2, t=0.1, u=-0.1)

    def test_assemble_rejects_non_psd(self):
        with pytest.raises(NotPSD):
            states.assemble_canonical(states.CanonicalParams(r=0.25, s=0.25, t=0.25, u=0.5))

    def test_canonical_matrix_layout(self, generic_canonical):
        m = states.canonical_matrix(generic_canonical)
        assert m[0, 1] == 0 and m[0, 2] == 0
        assert m[1, 2] == pytest.approx(0.05)
        assert m[3, 3].real == pytest.approx(0.25)
        np.testing.assert_allclose(m, matcore.dagger(m))

    def test_det_closed_form(self, generic_canonical):
        det = np.linalg.det(states.canonical_matrix(generic_canonical)).real
        assert states.det_canonical(generic_canonical) == pytest.approx(det, rel=1e-12)

    def test_werner_is_already_canonical(self):
        rho = states.werner_state(0.5)
        params, unitary = states.canonicalize(rho)
        assert params.r == pytest.approx(0.375)
        assert params.s == pytest.approx(0.125)
        assert params.t == pytest.approx(0.125)
        assert params.u == pytest.approx(0.25)
        assert params.v == params.w == params.q == 0.0
        np.testing.assert_allclose(unitary.matrix, np.eye(4), atol=1e-15)

    def test_canonicalize_random_states(self):
        sampler = StateSampler.from_seed(11)
        for _ in range(10):
            rho = sampler.ginibre(4).rho
            params, unitary = states.canonicalize(rho)
            rotated = unitary.apply(rho.mat)
            assert states.canonicalization_residual(rho, params, unitary) <= 1e-9
            assert abs(rotated[0, 1]) <= 1e-9 and abs(rotated[0, 2]) <= 1e-9
            assert params.r >= params.s - 1e-12 and params.r >= params.t - 1e-12
            assert params.v >= 0.0
            np.testing.assert_allclose(
                states.assemble_canonical(params).mat, rotated, atol=1e-9
            )

    def test_canonicalize_rotated_canonical_state(self, generic_canonical):
        rho = states.assemble_canonical(generic_canonical)
        u = states.LocalUnitary(
            matcore.haar_unitary(np.random.default_rng(5)),
            matcore.haar_unitary(np.random.default_rng(6)),
        )
        params, _ = states.canonicalize(u.apply_state(rho))
        assert states.det_canonical(params) == pytest.approx(
            states.det_canonical(generic_canonical), rel=1e-8
        )

    @pytest.mark.parametrize("gap", [1e-3, 1e-6, 0.0])
    def test_canonicalize_near_degenerate_top_block(self, gap):
        params = states.CanonicalParams(
            r=0.3 + gap, s=0.3, t=0.2, u=0.05, v=0.04, w=0.03, q=0.02, tau1=0.4, tau2=-1.2, tau3=2.0
        )
        rho = states.assemble_canonical(params)
        sampler = StateSampler.from_seed(17)
        for _ in range(20):
            rotated = sampler.local_unitary().apply_state(rho)
            found, unitary = states.canonicalize(rotated)
            assert states.canonicalization_residual(rotated, found, unitary) <= 1e-9
            assert states.det_canonical(found) == pytest.approx(
                states.det_canonical(params), rel=1e-7, abs=1e-15
            )

    def test_local_unitary_rejects_non_unitary(self):
        with pytest.raises(InvalidParameters):
            states.LocalUnitary(2 * matcore.I2, matcore.I2)


class TestConvexCombo:
    def test_bell_half_mixture(self):
        psi = states.PureParams(a=1 / math.sqrt(2), b=0.0, c=0.0)
        combo = states.ConvexComboParams(p=0.5, psi=psi)
        assert combo.x_term == pytest.approx(0.25)
        assert combo.y_term == pytest.approx(3 / 16)
        rho = states.convex_combo(combo)
        assert rho.mat[0, 0].real == pytest.approx(0.75)
        assert rho.mat[0, 3].real == pytest.approx(0.25)

    def test_rejects_product_component(self):
        with pytest.raises(InvalidParameters):
            states.ConvexComboParams(p=0.5, psi=states.PureParams(a=1.0, b=0.0, c=0.0))

    def test_rejects_weight_outside_unit_interval(self):
        psi = states.PureParams(a=1 / math.sqrt(2), b=0.0, c=0.0)
        with pytest.raises(InvalidParameters):
            states.ConvexComboParams(p=1.5, psi=psi)


class TestFixtures:
    @pytest.mark.parametrize("p,diag,off", [(0.2, (0.3, 0.2), 0.1), (0.9, (0.475, 0.025), 0.45)])
    def test_werner_entries(self, p, diag, off):
        m = states.werner_state(p).mat
        np.testing.assert_allclose(np.diag(m).real, [diag[0], diag[1], diag[1], diag[0]])
        assert m[0, 3].real == pytest.approx(off)

    def test_product_state(self):
        rho = states.product_state([1, 0], [0, 1])
        assert rho.mat[1, 1].real == pytest.approx(1.0)

    def test_fixture_lookup(self, bell):
        np.testing.assert_allclose(states.fixture("bell").mat, bell.mat)
        np.testing.assert_allclose(states.fixture("werner", 1.0).mat, bell.mat, atol=1e-15)

    def test_fixture_errors(self):
        with pytest.raises(InvalidParameters):
            states.fixture("werner")
        with pytest.raises(InvalidParameters):
            states.fixture("ghz")
        with pytest.raises(InvalidParameters):
            states.werner_state(1.5)


class TestDocuments:
    def test_read_golden_document(self):
        rho, label = states.read_density_matrix(fixture_path("werner_0p5.json"))
        assert label == "werner p=0.5"
        np.testing.assert_allclose(rho.mat, states.werner_state(0.5).mat, atol=1e-15)

    def test_document_round_trip(self, bell):
        doc = json.loads(json.dumps(states.density_document(bell, "bell")))
        rho, label = states.parse_density_document(doc)
        assert label == "bell"
        np.testing.assert_allclose(rho.mat, bell.mat)

    def test_short_row_names_the_row(self):
        with pytest.raises(MatrixFormatError) as excinfo:
            states.read_density_matrix(fixture_path("short_row.json"))
        assert excinfo.value.row == 2
        assert "row 2" in str(excinfo.value)

    def test_bad_entry_names_row_and_column(self):
        doc = states.density_document(states.maximally_mixed())
        doc["matrix"][1][3] = [0.0, "x"]
        with pytest.raises(MatrixFormatError) as excinfo:
            states.parse_density_document(doc)
        assert (excinfo.value.row, excinfo.value.col) == (1, 3)

    def test_not_psd_document(self):
        with pytest.raises(NotPSD):
            states.read_density_matrix(fixture_path("not_psd.json"))

    def test_missing_and_malformed_files(self, tmp_path):
        with pytest.raises(InputError):
            states.read_density_matrix(str(tmp_path / "missing.json"))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(MatrixFormatError):
            states.read_density_matrix(str(bad))

    @pytest.mark.parametrize("doc", [[], {"label": "x"}, {"matrix": [[]] * 3}])
    def test_structural_errors(self, doc):
        with pytest.raises(MatrixFormatError):
            states.parse_density_document(doc)
