"""
Hermitian structure of the projective state space P(H)
Fubini-Study inner product, Riemannian metric g, symplectic form Omega and complex structure J,
evaluated on horizontal representatives at unit-norm base states
"""

import logging
from dataclasses import dataclass

import numpy as np

from config import Config, get_default_config
from errors import BasePointError, NormalizationError, DimensionError
from hilbert import (
    StateVector, HermitianOperator, HorizontalTangent, field_decompose, as_vector
)

logger = logging.getLogger(__name__)

# 2x2 block of the standard complex structure in real coordinates (y1, y2, ...)
J0_BLOCK = np.array([[0.0, -1.0], [1.0, 0.0]])


def _gauge_index(v: np.ndarray, tol: float) -> int:
    """First component whose modulus equals the largest one up to tol"""
    moduli = np.abs(v)
    return int(np.flatnonzero(moduli >= moduli.max() - tol)[0])


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """Pure state [psi] stored through its canonical-gauge representative"""
    representative: StateVector

    def __post_init__(self):
        rep = self.representative.base
        pivot = rep[_gauge_index(rep, get_default_config().tol_eq)]
        if abs(pivot.imag) > get_default_config().tol_eq or pivot.real <= 0:
            raise NormalizationError(f"Representative is not in canonical gauge (pivot {pivot})")

    @property
    def dim(self) -> int:
        return self.representative.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        if self.dim != other.dim:
            return False
        overlap = abs(np.vdot(self.representative.base, other.representative.base))
        return overlap >= 1.0 - get_default_config().tol_eq

    __hash__ = None

    def __repr__(self) -> str:
        return f"ProjectivePoint({np.round(self.representative.base, 6).tolist()})"


def project(psi) -> ProjectivePoint:
    """pi(psi) = [psi] with the phase fixed on the largest component"""
    v = as_vector(psi)
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise NormalizationError("Cannot project the zero vector")

    v = v / norm
    pivot = v[_gauge_index(v, get_default_config().tol_eq)]
    rep = v * (abs(pivot) / pivot)

    # Remove rounding left in the pivot so the invariant holds exactly
    index = _gauge_index(rep, get_default_config().tol_eq)
    rep[index] = abs(rep[index])
    return ProjectivePoint(StateVector(rep))


def _check_shared_base(V: HorizontalTangent, W: HorizontalTangent):
    if not V.shares_base(W):
        raise BasePointError("Tangent vectors are attached to different base states")


def fs_inner(V: HorizontalTangent, W: HorizontalTangent) -> complex:
    """<<V, W>> on horizontal representatives at a unit base"""
    _check_shared_base(V, W)
    return complex(np.vdot(V.vector, W.vector))


def fs_inner_lifts(v, w, psi) -> complex:
    """<<V, W>> from arbitrary lifts v, w at an arbitrary nonzero psi"""
    v, w, psi = as_vector(v), as_vector(w), as_vector(psi)
    if not (v.shape == w.shape == psi.shape):
        raise DimensionError(f"Shapes {v.shape}, {w.shape}, {psi.shape} do not agree")

    norm_sq = np.vdot(psi, psi).real
    if norm_sq == 0:
        raise NormalizationError("Base vector is zero")

    v_horiz = v - (np.vdot(psi, v) / norm_sq) * psi
    w_horiz = w - (np.vdot(psi, w) / norm_sq) * psi
    return complex(np.vdot(v_horiz, w_horiz) / norm_sq)


def metric_g(V: HorizontalTangent, W: HorizontalTangent, config: Config = None) -> float:
    """g(V, W) = 2 hbar Re <<V, W>>"""
    config = config or get_default_config()
    return 2.0 * config.hbar * fs_inner(V, W).real


def symplectic_omega(V: HorizontalTangent, W: HorizontalTangent, config: Config = None) -> float:
    """Omega(V, W) = 2 hbar Im <<V, W>>"""
    config = config or get_default_config()
    return 2.0 * config.hbar * fs_inner(V, W).imag


def complex_structure_J(V: HorizontalTangent) -> HorizontalTangent:
    """J V: multiplication of the representative by i"""
    return HorizontalTangent(V.base, 1j * V.vector)


def pushforward_field(A: HermitianOperator, psi: StateVector, config: Config = None) -> HorizontalTangent:
    """Representative of (X_a)_[psi] = pi_*(X_A): the horizontal part of X_A"""
    return field_decompose(A, psi, config)[1]


def poisson_bracket(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
                    config: Config = None) -> float:
    """{a, b}([psi]) = Omega(X_a, X_b)"""
    return symplectic_omega(pushforward_field(A, psi, config), pushforward_field(B, psi, config), config)


def gauge_rotate(V: HorizontalTangent, theta: float) -> HorizontalTangent:
    """The same tangent of P(H) seen from the lift e^{i theta} psi"""
    phase = np.exp(1j * theta)
    return HorizontalTangent(V.base.phase_rotated(theta), phase * V.vector)


def to_real_coordinates(v) -> np.ndarray:
    """(Re z1, Im z1, Re z2, Im z2, ...) coordinates on C^{n+1} = R^{2n+2}"""
    v = as_vector(v)
    real = np.empty(2 * v.shape[0])
    real[0::2] = v.real
    real[1::2] = v.imag
    return real


def from_real_coordinates(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] % 2:
        raise DimensionError(f"Real coordinates must have even length, got shape {y.shape}")
    return y[0::2] + 1j * y[1::2]


def standard_complex_structure_matrix(dim: int) -> np.ndarray:
    """Block-diagonal real matrix of J on R^{2 dim}, one j0 block per complex coordinate"""
    return np.kron(np.eye(dim), J0_BLOCK)


__all__ = [
    'J0_BLOCK',
    'ProjectivePoint',
    'project',
    'fs_inner',
    'fs_inner_lifts',
    'metric_g',
    'symplectic_omega',
    'complex_structure_J',
    'pushforward_field',
    'poisson_bracket',
    'gauge_rotate',
    'to_real_coordinates',
    'from_real_coordinates',
    'standard_complex_structure_matrix',
]
