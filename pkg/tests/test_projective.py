import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from config import Config
from errors import BasePointError, NormalizationError
from hilbert import (
    HermitianOperator, HorizontalTangent, StateVector, commutator, expectation_rate,
    horizontal_projection, random_hermitian, random_state
)
from projective import (
    ProjectivePoint, complex_structure_J, from_real_coordinates, fs_inner, fs_inner_lifts,
    gauge_rotate, metric_g, poisson_bracket, project, pushforward_field,
    standard_complex_structure_matrix, symplectic_omega, to_real_coordinates
)
from uncertainty import uncertainty

dims = st.integers(min_value=2, max_value=9)
seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
hbars = st.sampled_from([1.0, 0.5])
fast = settings(max_examples=50, deadline=None)


def _tangents(dim, seed):
    """Two random horizontal tangents at a random base"""
    rng = np.random.default_rng(seed)
    psi = random_state(dim, rng)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    w = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return horizontal_projection(v, psi), horizontal_projection(w, psi)


class TestProjection:

    def test_canonical_gauge(self):
        point = project(np.array([1j, 0.0]))
        assert np.allclose(point.representative.base, [1.0, 0.0])

    def test_same_ray_is_same_point(self, plus):
        assert project(plus) == project(3.0 * np.exp(0.7j) * plus.base)

    def test_orthogonal_states_differ(self, up, down):
        assert project(up) != project(down)

    def test_zero_vector(self):
        with pytest.raises(NormalizationError):
            project(np.zeros(2))

    def test_non_canonical_representative_rejected(self):
        with pytest.raises(NormalizationError):
            ProjectivePoint(StateVector(np.array([1j, 0.0])))


class TestFubiniStudy:

    def test_unit_tangent(self, up):
        v = HorizontalTangent(up, np.array([0, 1.0]))
        assert fs_inner(v, v) == 1

    def test_complex_value(self, up):
        v = HorizontalTangent(up, np.array([0, -1j]))
        w = HorizontalTangent(up, np.array([0, 1.0]))
        assert fs_inner(v, w) == pytest.approx(1j)

    def test_different_bases_rejected(self, up, down):
        with pytest.raises(BasePointError):
            fs_inner(HorizontalTangent(up, np.array([0, 1.0])), HorizontalTangent(down, np.array([1.0, 0])))

    @fast
    @given(dim=dims, seed=seeds)
    def test_independent_of_lift(self, dim, seed):
        rng = np.random.default_rng(seed)
        psi = random_state(dim, rng).base
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        w = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        c = 2.5 * np.exp(1.3j)

        reference = fs_inner_lifts(v, w, psi)
        shifted = fs_inner_lifts(c * v + a * c * psi, c * w + b * c * psi, c * psi)
        horizontal = fs_inner(horizontal_projection(v, StateVector(psi)), horizontal_projection(w, StateVector(psi)))
        assert shifted == pytest.approx(reference, rel=1e-10, abs=1e-12)
        assert horizontal == pytest.approx(reference, rel=1e-10, abs=1e-12)

    @fast
    @given(dim=dims, seed=seeds, theta=st.floats(min_value=-np.pi, max_value=np.pi))
    def test_gauge_rotation_preserves_inner_product(self, dim, seed, theta):
        v, w = _tangents(dim, seed)
        rotated = fs_inner(gauge_rotate(v, theta), gauge_rotate(w, theta))
        assert rotated == pytest.approx(fs_inner(v, w), rel=1e-12, abs=1e-12)


class TestMetricAndSymplecticForm:

    def test_metric_of_unit_tangent(self, up, half_hbar):
        v = HorizontalTangent(up, np.array([0, 1.0]))
        assert metric_g(v, v) == 2.0
        assert metric_g(v, v, half_hbar) == 1.0

    def test_pauli_symplectic_value(self, sigma_x, sigma_y, up):
        assert poisson_bracket(sigma_x, sigma_y, up) == pytest.approx(2.0)
        assert poisson_bracket(sigma_y, sigma_x, up) == pytest.approx(-2.0)

    def test_commuting_observables(self):
        A = HermitianOperator(np.diag([1.0, 2.0, 3.0]))
        B = HermitianOperator(np.diag([-1.0, 0.0, 4.0]))
        assert poisson_bracket(A, B, random_state(3, 8)) == pytest.approx(0.0, abs=1e-14)

    @fast
    @given(dim=dims, seed=seeds)
    def test_omega_is_antisymmetric(self, dim, seed):
        v, w = _tangents(dim, seed)
        assert symplectic_omega(v, v) == pytest.approx(0.0, abs=1e-12)
        assert symplectic_omega(v, w) == pytest.approx(-symplectic_omega(w, v), abs=1e-12)

    @fast
    @given(dim=dims, seed=seeds, hbar=hbars)
    def test_metric_of_hamiltonian_field_is_variance(self, dim, seed, hbar):
        config = Config(hbar=hbar)
        rng = np.random.default_rng(seed)
        A, psi = random_hermitian(dim, rng), random_state(dim, rng)
        x_a = pushforward_field(A, psi, config)
        expected = (2.0 / hbar) * uncertainty(A, psi, config) ** 2
        assert metric_g(x_a, x_a, config) == pytest.approx(expected, rel=1e-10)

    @fast
    @given(dim=dims, seed=seeds, hbar=hbars)
    def test_omega_is_commutator_expectation(self, dim, seed, hbar):
        config = Config(hbar=hbar)
        rng = np.random.default_rng(seed)
        A, B, psi = random_hermitian(dim, rng), random_hermitian(dim, rng), random_state(dim, rng)
        expected = (-1j / hbar) * np.vdot(psi.base, commutator(A, B) @ psi.base)
        assert poisson_bracket(A, B, psi, config) == pytest.approx(expected.real, rel=1e-10, abs=1e-12)

    @fast
    @given(dim=dims, seed=seeds)
    def test_bracket_generates_expectation_rate(self, dim, seed):
        rng = np.random.default_rng(seed)
        A, H, psi = random_hermitian(dim, rng), random_hermitian(dim, rng), random_state(dim, rng)
        assert poisson_bracket(A, H, psi) == pytest.approx(expectation_rate(A, H, psi), rel=1e-10, abs=1e-12)


class TestComplexStructure:

    def test_pauli_example(self, up):
        v = HorizontalTangent(up, np.array([0, -1j]))
        assert np.allclose(complex_structure_J(v).vector, [0, 1])

    @fast
    @given(dim=dims, seed=seeds)
    def test_squares_to_minus_one(self, dim, seed):
        v, _ = _tangents(dim, seed)
        assert np.allclose(complex_structure_J(complex_structure_J(v)).vector, -v.vector)

    @fast
    @given(dim=dims, seed=seeds, hbar=hbars)
    def test_compatibility(self, dim, seed, hbar):
        config = Config(hbar=hbar)
        v, w = _tangents(dim, seed)
        J = complex_structure_J
        assert metric_g(v, w, config) == pytest.approx(symplectic_omega(v, J(w), config), rel=1e-12, abs=1e-12)
        assert metric_g(J(v), J(w), config) == pytest.approx(metric_g(v, w, config), rel=1e-12, abs=1e-12)
        assert symplectic_omega(J(v), J(w), config) == pytest.approx(
            symplectic_omega(v, w, config), rel=1e-12, abs=1e-12)

    @fast
    @given(dim=dims, seed=seeds)
    def test_nondegenerate(self, dim, seed):
        v, _ = _tangents(dim, seed)
        assert metric_g(v, v) > 0
        assert symplectic_omega(v, complex_structure_J(v)) == pytest.approx(metric_g(v, v))

    def test_real_block_matrix(self, rng):
        v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        j0 = standard_complex_structure_matrix(4)
        assert np.allclose(j0 @ to_real_coordinates(v), to_real_coordinates(1j * v))
        assert np.allclose(j0 @ j0, -np.eye(8))
        assert np.allclose(from_real_coordinates(to_real_coordinates(v)), v)


class TestPushforward:

    def test_identity_has_no_horizontal_part(self, plus):
        assert pushforward_field(HermitianOperator.identity(2), plus).norm == 0.0

    def test_sigma_x_at_up(self, sigma_x, up):
        assert np.allclose(pushforward_field(sigma_x, up).vector, [0, -1j])

    @fast
    @given(dim=dims, seed=seeds, theta=st.floats(min_value=-np.pi, max_value=np.pi))
    def test_gauge_covariant(self, dim, seed, theta):
        rng = np.random.default_rng(seed)
        A, psi = random_hermitian(dim, rng), random_state(dim, rng)
        moved = pushforward_field(A, psi.phase_rotated(theta))
        assert np.allclose(moved.vector, gauge_rotate(pushforward_field(A, psi), theta).vector, atol=1e-12)
