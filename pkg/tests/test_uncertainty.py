import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from config import Config
from errors import DimensionError, PositivityError, SelfAdjointnessError
from hilbert import HermitianOperator, commutator, random_hermitian, random_state
from projective import metric_g, project, pushforward_field
from uncertainty import (
    CovarianceTensor, covariance, covariance_tensor, rs_check, saturating_partner,
    saturation_witness, uncertainty
)

dims = st.integers(min_value=2, max_value=9)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
hbars = st.sampled_from([1.0, 0.5])
fast = settings(max_examples=60, deadline=None)


def _triple(dim, seed):
    rng = np.random.default_rng(seed)
    return random_hermitian(dim, rng), random_hermitian(dim, rng), random_state(dim, rng)


class TestUncertainty:

    def test_eigenstate_has_no_spread(self, sigma_z, up):
        assert uncertainty(sigma_z, up) == 0.0

    def test_sigma_x_at_up(self, sigma_x, up):
        assert uncertainty(sigma_x, up) == pytest.approx(1.0)

    def test_spectral_oracle(self):
        A, _, psi = _triple(6, 17)
        energies, vectors = np.linalg.eigh(A.matrix)
        weights = np.abs(vectors.conj().T @ psi.base) ** 2
        mean = np.sum(weights * energies)
        expected = np.sqrt(np.sum(weights * (energies - mean) ** 2))
        assert uncertainty(A, psi) == pytest.approx(expected, rel=1e-12)

    def test_independent_of_hbar(self):
        A, _, psi = _triple(4, 2)
        assert uncertainty(A, psi, Config(hbar=0.5)) == uncertainty(A, psi)


class TestCovariance:

    def test_self_covariance_is_variance(self):
        A, _, psi = _triple(5, 4)
        assert covariance(A, A, psi) == pytest.approx(uncertainty(A, psi) ** 2, rel=1e-12)

    def test_identity_has_no_covariance(self, sigma_x, plus):
        assert covariance(sigma_x, HermitianOperator.identity(2), plus) == pytest.approx(0.0, abs=1e-15)

    def test_symmetric(self):
        A, B, psi = _triple(5, 6)
        assert covariance(A, B, psi) == pytest.approx(covariance(B, A, psi), rel=1e-12)

    def test_dimension_mismatch(self, sigma_x):
        with pytest.raises(DimensionError):
            covariance(sigma_x, random_hermitian(3, 0), random_state(2, 0))

    def test_imaginary_part_is_commutator(self):
        A, B, psi = _triple(5, 21)
        a_c = A.matrix @ psi.base - np.vdot(psi.base, A.matrix @ psi.base).real * psi.base
        b_c = B.matrix @ psi.base - np.vdot(psi.base, B.matrix @ psi.base).real * psi.base
        bracket = np.vdot(psi.base, commutator(A, B) @ psi.base) / 2j
        assert bracket.real == pytest.approx(np.vdot(a_c, b_c).imag, rel=1e-10)
        assert covariance(A, B, psi) == pytest.approx(np.vdot(a_c, b_c).real, rel=1e-10)


class TestCovarianceTensor:

    def test_pauli_example(self, sigma_x, sigma_y, up, half_hbar):
        assert np.allclose(covariance_tensor(sigma_x, sigma_y, up).entries, [[2, 0], [0, 2]])
        assert np.allclose(covariance_tensor(sigma_x, sigma_y, up, half_hbar).entries, [[4, 0], [0, 4]])

    def test_equal_observables_are_degenerate(self):
        A, _, psi = _triple(4, 12)
        m = covariance_tensor(A, A, psi)
        assert abs(m.determinant) < 1e-12 * np.max(m.entries) ** 2

    def test_identity_row_vanishes(self):
        _, B, psi = _triple(3, 13)
        m = covariance_tensor(HermitianOperator.identity(3), B, psi)
        assert np.allclose(m.entries[0], 0.0, atol=1e-14)
        assert np.allclose(m.entries[:, 0], 0.0, atol=1e-14)

    def test_base_is_projected_state(self, sigma_x, sigma_y, plus):
        assert covariance_tensor(sigma_x, sigma_y, plus).base == project(plus)

    @fast
    @given(dim=dims, seed=seeds, hbar=hbars)
    def test_gram_matrix_of_hamiltonian_fields(self, dim, seed, hbar):
        config = Config(hbar=hbar)
        A, B, psi = _triple(dim, seed)
        fields = (pushforward_field(A, psi, config), pushforward_field(B, psi, config))
        gram = np.array([[metric_g(v, w, config) for w in fields] for v in fields])
        m = covariance_tensor(A, B, psi, config)
        assert np.allclose(m.entries, gram, rtol=1e-10, atol=1e-12)
        assert m.is_psd()

    def test_asymmetric_entries(self, up):
        with pytest.raises(SelfAdjointnessError):
            CovarianceTensor(np.array([[1.0, 0.5], [0.4, 1.0]]), project(up), 1.0)

    def test_indefinite_entries(self, up):
        with pytest.raises(PositivityError):
            CovarianceTensor(np.array([[1.0, 2.0], [2.0, 1.0]]), project(up), 1.0)

    def test_wrong_shape(self, up):
        with pytest.raises(DimensionError):
            CovarianceTensor(np.eye(3), project(up), 1.0)

    def test_entries_read_only(self, up):
        m = CovarianceTensor(np.eye(2), project(up), 1.0)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 5.0


class TestRobertsonSchrodinger:

    def test_pauli_saturation(self, sigma_x, sigma_y, up):
        report = rs_check(sigma_x, sigma_y, up)
        assert report.lhs_operator_form == pytest.approx(1.0)
        assert report.rhs_operator_form == pytest.approx(1.0)
        assert report.lhs_geometric == pytest.approx(4.0)
        assert report.rhs_geometric == pytest.approx(4.0)
        assert report.saturated

    def test_equal_observables(self):
        A, _, psi = _triple(3, 30)
        report = rs_check(A, A, psi)
        assert report.lhs_operator_form == pytest.approx(0.0, abs=1e-10)
        assert report.rhs_operator_form == pytest.approx(0.0, abs=1e-20)
        assert report.saturated

    def test_eigenstate_of_one_observable(self, sigma_x, sigma_z, up):
        report = rs_check(sigma_x, sigma_z, up)
        assert report.lhs_operator_form == pytest.approx(0.0, abs=1e-15)
        assert report.rhs_operator_form == pytest.approx(0.0, abs=1e-15)

    def test_report_serializes(self, sigma_x, sigma_y, up):
        data = rs_check(sigma_x, sigma_y, up).to_dict()
        assert set(data) >= {'lhs_operator_form', 'rhs_operator_form', 'slack', 'saturated'}

    @fast
    @given(dim=dims, seed=seeds, hbar=hbars)
    def test_inequality_in_both_forms(self, dim, seed, hbar):
        config = Config(hbar=hbar)
        A, B, psi = _triple(dim, seed)
        report = rs_check(A, B, psi, config)
        scale = (2.0 / hbar) ** 2

        assert report.slack >= -1e-10
        assert report.slack_geometric >= -1e-10 * scale
        assert report.lhs_geometric == pytest.approx(scale * report.lhs_operator_form, rel=1e-9, abs=1e-10)
        assert report.rhs_geometric == pytest.approx(scale * report.rhs_operator_form, rel=1e-9, abs=1e-10)

    @fast
    @given(dim=dims, seed=seeds, shift_a=st.floats(-5, 5), shift_b=st.floats(-5, 5))
    def test_invariant_under_shifts(self, dim, seed, shift_a, shift_b):
        A, B, psi = _triple(dim, seed)
        base = rs_check(A, B, psi)
        shifted = rs_check(A.shifted(shift_a), B.shifted(shift_b), psi)
        assert shifted.lhs_operator_form == pytest.approx(base.lhs_operator_form, rel=1e-8, abs=1e-9)
        assert shifted.rhs_operator_form == pytest.approx(base.rhs_operator_form, rel=1e-8, abs=1e-9)

    @fast
    @given(dim=dims, seed=seeds, theta=st.floats(min_value=-np.pi, max_value=np.pi))
    def test_invariant_under_global_phase(self, dim, seed, theta):
        A, B, psi = _triple(dim, seed)
        base = rs_check(A, B, psi)
        rotated = rs_check(A, B, psi.phase_rotated(theta))
        assert rotated.lhs_operator_form == pytest.approx(base.lhs_operator_form, rel=1e-10, abs=1e-12)
        assert rotated.rhs_operator_form == pytest.approx(base.rhs_operator_form, rel=1e-10, abs=1e-12)

    def test_random_triples_are_not_saturated(self):
        saturated = [rs_check(*_triple(4, seed)).saturated for seed in range(50)]
        assert not any(saturated)


class TestSaturation:

    def test_pauli_witness(self, sigma_x, sigma_y, up):
        assert saturation_witness(sigma_x, sigma_y, up)
        assert not saturation_witness(sigma_y, sigma_x, up)

    def test_eigenstate_partner_is_not_witness(self, sigma_x, sigma_z, up):
        assert not saturation_witness(sigma_x, sigma_z, up)

    @fast
    @given(dim=dims, seed=seeds, hbar=hbars, with_noise=st.booleans())
    def test_constructed_partner_saturates(self, dim, seed, hbar, with_noise):
        config = Config(hbar=hbar)
        rng = np.random.default_rng(seed)
        A, psi = random_hermitian(dim, rng), random_state(dim, rng)
        B = saturating_partner(A, psi, seed=rng if with_noise else None, config=config)

        report = rs_check(A, B, psi, config)
        assert saturation_witness(A, B, psi, config)
        assert report.saturated
        assert abs(report.slack) <= 1e-10
        assert abs(covariance(A, B, psi, config)) <= 1e-10
        assert uncertainty(B, psi, config) == pytest.approx(uncertainty(A, psi, config), rel=1e-10)
