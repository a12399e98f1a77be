"""
Uncertainty, covariance and the Robertson-Schrodinger relation
Operator form and geometric form are evaluated independently so their agreement can be checked
"""

import logging
from typing import Any, Dict
from dataclasses import dataclass, asdict

import numpy as np

from config import Config, get_default_config
from errors import DimensionError, PositivityError, SelfAdjointnessError
from hilbert import (
    StateVector, HermitianOperator, SeedLike, expectation, commutator, random_hermitian
)
from projective import (
    ProjectivePoint, project, pushforward_field, metric_g, symplectic_omega, complex_structure_J
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CovarianceTensor:
    """2x2 covariance tensor M(A, B) at a base point, equal to the pull-back metric h"""
    entries: np.ndarray
    base: ProjectivePoint
    hbar: float

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (2, 2):
            raise DimensionError(f"Covariance tensor must be 2x2, got shape {entries.shape}")
        if entries[0, 1] != entries[1, 0]:
            raise SelfAdjointnessError(
                f"Covariance tensor is not symmetric ({entries[0, 1]!r} vs {entries[1, 0]!r})"
            )

        scale = max(1.0, float(np.max(np.abs(entries))))
        lowest = float(np.linalg.eigvalsh(entries)[0])
        if lowest < -get_default_config().tol_psd * scale:
            raise PositivityError(f"Covariance tensor is not positive semidefinite (eigenvalue {lowest:.3e})")

        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def determinant(self) -> float:
        m = self.entries
        return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    def is_psd(self, tol: float = None) -> bool:
        tol = get_default_config().tol_psd if tol is None else tol
        scale = max(1.0, float(np.max(np.abs(self.entries))))
        return bool(np.linalg.eigvalsh(self.entries)[0] >= -tol * scale)

    def __repr__(self) -> str:
        return f"CovarianceTensor({np.round(self.entries, 6).tolist()}, hbar={self.hbar})"


@dataclass(frozen=True)
class RsReport:
    """Both sides of the Robertson-Schrodinger relation in operator and geometric form"""
    lhs_operator_form: float
    rhs_operator_form: float
    lhs_geometric: float
    rhs_geometric: float
    slack: float
    saturated: bool

    # lhs_geometric - rhs_geometric, reported separately from the operator-form slack
    slack_geometric: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _centered(A: HermitianOperator, psi: StateVector, config: Config) -> np.ndarray:
    """(A - <A> I) psi"""
    mean = expectation(A, psi, config)
    return A.matrix @ psi.base - mean * psi.base


def uncertainty(A: HermitianOperator, psi: StateVector, config: Config = None) -> float:
    """Delta_psi(A) = <psi, (A - <A>)^2 psi>^(1/2)"""
    config = config or get_default_config()
    mean = expectation(A, psi, config)
    shifted = A.matrix - mean * np.eye(A.dim)

    radicand = np.vdot(psi.base, shifted @ (shifted @ psi.base))
    scale = max(1.0, abs(radicand))
    if abs(radicand.imag) > config.tol_eq * scale:
        raise SelfAdjointnessError(f"Variance has imaginary part {radicand.imag:.3e}")
    if radicand.real < -config.tol_eq * scale:
        raise SelfAdjointnessError(f"Variance is negative ({radicand.real:.3e})")

    return float(np.sqrt(max(radicand.real, 0.0)))


def covariance(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
               config: Config = None) -> float:
    """C_psi(A, B) = 1/2 <psi, (A_c B_c + B_c A_c) psi> with centered operators"""
    config = config or get_default_config()
    if A.dim != B.dim:
        raise DimensionError(f"Observables have dimensions {A.dim} and {B.dim}")

    identity = np.eye(A.dim)
    a_c = A.matrix - expectation(A, psi, config) * identity
    b_c = B.matrix - expectation(B, psi, config) * identity

    value = 0.5 * np.vdot(psi.base, (a_c @ b_c + b_c @ a_c) @ psi.base)
    if abs(value.imag) > config.tol_eq * max(1.0, abs(value)):
        raise SelfAdjointnessError(f"Covariance has imaginary part {value.imag:.3e}")
    return float(value.real)


def covariance_tensor(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
                      config: Config = None) -> CovarianceTensor:
    """M(A, B) = (2/hbar) [[Delta A^2, C], [C, Delta B^2]]"""
    config = config or get_default_config()
    c = covariance(A, B, psi, config)
    entries = (2.0 / config.hbar) * np.array([
        [uncertainty(A, psi, config) ** 2, c],
        [c, uncertainty(B, psi, config) ** 2],
    ])
    return CovarianceTensor(entries, project(psi), config.hbar)


def rs_check(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
             config: Config = None) -> RsReport:
    """Evaluate the Robertson-Schrodinger relation in both forms

    Operator form: Delta A^2 Delta B^2 - C^2 >= ((1/2i) <[A, B]>)^2.
    Geometric form: det [g(X_k, X_l)] >= Omega(X_a, X_b)^2, built from the
    pushed-forward fields rather than from the operator-form numbers.
    """
    config = config or get_default_config()

    delta_a = uncertainty(A, psi, config)
    delta_b = uncertainty(B, psi, config)
    c = covariance(A, B, psi, config)
    lhs_op = delta_a ** 2 * delta_b ** 2 - c ** 2

    bracket = np.vdot(psi.base, commutator(A, B) @ psi.base) / 2j
    if abs(bracket.imag) > config.tol_eq * max(1.0, abs(bracket)):
        raise SelfAdjointnessError(f"Commutator expectation is not imaginary (residue {bracket.imag:.3e})")
    rhs_op = float(bracket.real) ** 2

    x_a = pushforward_field(A, psi, config)
    x_b = pushforward_field(B, psi, config)
    g_ab = metric_g(x_a, x_b, config)
    lhs_geo = metric_g(x_a, x_a, config) * metric_g(x_b, x_b, config) - g_ab ** 2
    rhs_geo = symplectic_omega(x_a, x_b, config) ** 2

    slack = lhs_op - rhs_op
    report = RsReport(
        lhs_operator_form=float(lhs_op),
        rhs_operator_form=float(rhs_op),
        lhs_geometric=float(lhs_geo),
        rhs_geometric=float(rhs_geo),
        slack=float(slack),
        saturated=bool(slack <= config.tol_eq),
        slack_geometric=float(lhs_geo - rhs_geo),
    )
    logger.debug(f"rs_check: slack={report.slack:.3e} geometric slack={report.slack_geometric:.3e}")
    return report


def saturation_witness(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
                       config: Config = None) -> bool:
    """True when X_b = J X_a at [psi], the equality case of the relation"""
    config = config or get_default_config()
    x_a = pushforward_field(A, psi, config)
    x_b = pushforward_field(B, psi, config)

    gap = np.linalg.norm(x_b.vector - complex_structure_J(x_a).vector)
    return bool(gap <= config.tol_eq * (x_a.norm + x_b.norm))


def saturating_partner(A: HermitianOperator, psi: StateVector, seed: SeedLike = None,
                       config: Config = None) -> HermitianOperator:
    """Observable B with X_b = J X_a at psi

    B = i chi psi^H - i psi chi^H + P G P with chi = (A - <A>) psi and P the
    projector orthogonal to psi. G is a GUE sample when a seed is given and
    zero otherwise; it never changes B psi.
    """
    config = config or get_default_config()
    chi = _centered(A, psi, config)
    psi_col = psi.base[:, None]
    chi_col = chi[:, None]

    matrix = 1j * chi_col @ psi_col.conj().T - 1j * psi_col @ chi_col.conj().T
    if seed is not None:
        projector = np.eye(A.dim) - psi_col @ psi_col.conj().T
        g = random_hermitian(A.dim, seed).matrix
        matrix = matrix + projector @ g @ projector

    # Exact Hermitian part absorbs rounding from the outer products
    return HermitianOperator(0.5 * (matrix + matrix.conj().T))


__all__ = [
    'CovarianceTensor',
    'RsReport',
    'uncertainty',
    'covariance',
    'covariance_tensor',
    'rs_check',
    'saturation_witness',
    'saturating_partner',
]
