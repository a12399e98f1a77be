"""
Complex Hilbert-space primitives for finite-dimensional quantum systems
States, observables, expectation values, hamiltonian vector fields and exact Schrodinger flow
"""

import logging
from typing import Tuple, Union
from dataclasses import dataclass

import numpy as np

from config import Config, get_default_config
from errors import (
    DimensionError, NormalizationError, SelfAdjointnessError, NumericalError
)

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.Generator, None]

PAULI_MATRICES = {
    'x': np.array([[0, 1], [1, 0]], dtype=complex),
    'y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'z': np.array([[1, 0], [0, -1]], dtype=complex),
}


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


def as_generator(seed: SeedLike) -> np.random.Generator:
    """Accept an integer seed or an existing generator"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm representative psi of a pure state"""
    base: np.ndarray

    def __post_init__(self):
        base = _frozen(self.base)
        if base.ndim != 1:
            raise DimensionError(f"State must be a vector, got shape {base.shape}")
        if base.shape[0] < 2:
            raise DimensionError(f"State dimension must be at least 2, got {base.shape[0]}")

        norm = np.linalg.norm(base)
        if abs(norm - 1.0) > get_default_config().tol_eq:
            raise NormalizationError(f"State norm is {norm!r}, expected 1 (use normalize())")

        object.__setattr__(self, 'base', base)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def phase_rotated(self, theta: float) -> 'StateVector':
        """Same ray, representative multiplied by e^{i theta}"""
        return StateVector(np.exp(1j * theta) * self.base)

    def __repr__(self) -> str:
        return f"StateVector(dim={self.dim}, base={np.round(self.base, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Self-adjoint observable on C^{n+1}"""
    matrix: np.ndarray

    def __post_init__(self):
        matrix = _frozen(self.matrix)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"Operator must be a square matrix, got shape {matrix.shape}")
        if matrix.shape[0] < 2:
            raise DimensionError(f"Operator dimension must be at least 2, got {matrix.shape[0]}")

        scale = max(1.0, float(np.max(np.abs(matrix))))
        asymmetry = float(np.max(np.abs(matrix - matrix.conj().T)))
        if asymmetry > get_default_config().tol_eq * scale:
            raise SelfAdjointnessError(f"Operator is not Hermitian (max |A - A^H| = {asymmetry:.3e})")

        object.__setattr__(self, 'matrix', matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def shifted(self, c: float) -> 'HermitianOperator':
        """A + c I"""
        return HermitianOperator(self.matrix + c * np.eye(self.dim))

    def scaled(self, factor: float) -> 'HermitianOperator':
        return HermitianOperator(factor * self.matrix)

    @classmethod
    def identity(cls, dim: int) -> 'HermitianOperator':
        return cls(np.eye(dim, dtype=complex))

    @classmethod
    def pauli(cls, name: str) -> 'HermitianOperator':
        """Pauli matrix by axis name: 'x', 'y' or 'z'"""
        try:
            return cls(PAULI_MATRICES[name.lower()])
        except KeyError:
            raise ValueError(f"Unknown Pauli matrix '{name}'") from None

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True, eq=False)
class HorizontalTangent:
    """Tangent vector at base, Hermitian orthogonal to it

    Represents both the horizontal part of a hamiltonian field on S(H) and,
    through the projection, a tangent vector of P(H).
    """
    base: StateVector
    vector: np.ndarray

    def __post_init__(self):
        vector = _frozen(self.vector)
        if vector.shape != self.base.base.shape:
            raise DimensionError(
                f"Tangent has shape {vector.shape}, base state has shape {self.base.base.shape}"
            )

        overlap = abs(np.vdot(self.base.base, vector))
        if overlap > get_default_config().tol_eq * max(1.0, float(np.linalg.norm(vector))):
            raise NormalizationError(f"Tangent is not horizontal (|<psi, v>| = {overlap:.3e})")

        object.__setattr__(self, 'vector', vector)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def shares_base(self, other: 'HorizontalTangent') -> bool:
        return self.base is other.base or np.array_equal(self.base.base, other.base.base)

    def __neg__(self) -> 'HorizontalTangent':
        return HorizontalTangent(self.base, -self.vector)

    def __repr__(self) -> str:
        return f"HorizontalTangent(dim={self.base.dim}, vector={np.round(self.vector, 6).tolist()})"


def as_vector(v) -> np.ndarray:
    if isinstance(v, StateVector):
        return v.base
    if isinstance(v, HorizontalTangent):
        return v.vector
    return np.asarray(v, dtype=complex)


def _check_operator_state(A: HermitianOperator, psi: StateVector):
    if A.dim != psi.dim:
        raise DimensionError(f"Operator dimension {A.dim} does not match state dimension {psi.dim}")


def hermitian_inner(v, w) -> complex:
    """<v, w>, conjugate-linear in v and linear in w"""
    v, w = as_vector(v), as_vector(w)
    if v.shape != w.shape:
        raise DimensionError(f"Cannot pair vectors of shapes {v.shape} and {w.shape}")
    return complex(np.vdot(v, w))


def normalize(v) -> StateVector:
    """Explicitly rescale a nonzero vector onto the unit sphere"""
    v = as_vector(v)
    norm = np.linalg.norm(v)
    if norm == 0 or not np.isfinite(norm):
        raise NormalizationError("Cannot normalize a zero or non-finite vector")
    return StateVector(v / norm)


def expectation(A: HermitianOperator, psi: StateVector, config: Config = None) -> float:
    """<psi, A psi> / <psi, psi>, checked to be real"""
    config = config or get_default_config()
    _check_operator_state(A, psi)

    value = np.vdot(psi.base, A.matrix @ psi.base) / np.vdot(psi.base, psi.base)
    if abs(value.imag) > config.tol_eq * max(1.0, abs(value)):
        raise SelfAdjointnessError(f"Expectation value has imaginary part {value.imag:.3e}")
    return float(value.real)


def commutator(A: HermitianOperator, B: HermitianOperator) -> np.ndarray:
    """[A, B] = AB - BA (anti-Hermitian)"""
    if A.dim != B.dim:
        raise DimensionError(f"Cannot commute operators of dimensions {A.dim} and {B.dim}")
    return A.matrix @ B.matrix - B.matrix @ A.matrix


def hamiltonian_field(A: HermitianOperator, psi: StateVector, config: Config = None) -> np.ndarray:
    """(X_A)_psi = (-i/hbar) A psi"""
    config = config or get_default_config()
    _check_operator_state(A, psi)
    return (-1j / config.hbar) * (A.matrix @ psi.base)


def horizontal_projection(v, psi: StateVector) -> HorizontalTangent:
    """Part of v Hermitian orthogonal to psi: v - <psi, v> psi"""
    v = as_vector(v)
    if v.shape != psi.base.shape:
        raise DimensionError(f"Vector shape {v.shape} does not match state shape {psi.base.shape}")
    return HorizontalTangent(psi, v - np.vdot(psi.base, v) * psi.base)


def field_decompose(A: HermitianOperator, psi: StateVector,
                    config: Config = None) -> Tuple[np.ndarray, HorizontalTangent]:
    """Split X_A into vertical and horizontal components at psi"""
    config = config or get_default_config()
    _check_operator_state(A, psi)

    mean = expectation(A, psi, config)
    factor = -1j / config.hbar
    vertical = factor * mean * psi.base
    centered = A.matrix @ psi.base - mean * psi.base
    return vertical, HorizontalTangent(psi, factor * centered)


def dispersion_decompose(A: HermitianOperator, psi: StateVector,
                         config: Config = None) -> Tuple[float, float, np.ndarray]:
    """A psi = <A> psi + Delta chi with chi unit and orthogonal to psi

    chi is the zero vector when psi is an eigenvector of A.
    """
    config = config or get_default_config()
    mean = expectation(A, psi, config)
    centered = A.matrix @ psi.base - mean * psi.base
    delta = float(np.linalg.norm(centered))
    if delta <= config.tol_eq:
        return mean, 0.0, np.zeros_like(psi.base)
    return mean, delta, centered / delta


def expectation_rate(A: HermitianOperator, H: HermitianOperator, psi: StateVector,
                     config: Config = None) -> float:
    """d<A>/dt along the Schrodinger flow of H: (i/hbar) <[H, A]>"""
    config = config or get_default_config()
    _check_operator_state(A, psi)
    value = (1j / config.hbar) * np.vdot(psi.base, commutator(H, A) @ psi.base)
    if abs(value.imag) > config.tol_eq * max(1.0, abs(value)):
        raise SelfAdjointnessError(f"Expectation rate has imaginary part {value.imag:.3e}")
    return float(value.real)


def schrodinger_flow(H: HermitianOperator, psi: StateVector, t: float,
                     config: Config = None) -> StateVector:
    """exp(-i H t / hbar) psi via eigen-decomposition"""
    config = config or get_default_config()
    _check_operator_state(H, psi)

    try:
        energies, vectors = np.linalg.eigh(H.matrix)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"Eigen-decomposition failed: {e}") from e

    phases = np.exp(-1j * energies * t / config.hbar)
    evolved = vectors @ (phases * (vectors.conj().T @ psi.base))

    drift = abs(np.linalg.norm(evolved) - 1.0)
    if drift > config.tol_eq:
        raise NumericalError(f"Flow lost unitarity (norm drift {drift:.3e})")
    return StateVector(evolved)


def random_hermitian(dim: int, seed: SeedLike = None) -> HermitianOperator:
    """GUE sample (G + G^H)/2 with standard complex Gaussian entries"""
    if dim < 2:
        raise DimensionError(f"Operator dimension must be at least 2, got {dim}")

    rng = as_generator(seed)
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    return HermitianOperator((g + g.conj().T) / 2.0)


def random_state(dim: int, seed: SeedLike = None) -> StateVector:
    """Uniformly distributed point of the unit sphere S(H)"""
    if dim < 2:
        raise DimensionError(f"State dimension must be at least 2, got {dim}")

    rng = as_generator(seed)
    return normalize(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


__all__ = [
    'PAULI_MATRICES',
    'StateVector',
    'HermitianOperator',
    'HorizontalTangent',
    'as_generator',
    'as_vector',
    'hermitian_inner',
    'normalize',
    'expectation',
    'commutator',
    'hamiltonian_field',
    'horizontal_projection',
    'field_decompose',
    'dispersion_decompose',
    'expectation_rate',
    'schrodinger_flow',
    'random_hermitian',
    'random_state',
]
