"""
Differential energy identity at a single point of a map u: Sigma -> P(H)

The map is described by its differential at one point: du(d/ds) and du(d/dt)
are the horizontal hamiltonian fields of two observables. The pull-back metric
h = u*g is the covariance tensor, and the energy form sqrt(det h) splits into
the antiholomorphic part plus the pulled-back symplectic form.
"""

import logging
from typing import Any, Dict, Tuple
from dataclasses import dataclass, asdict

import numpy as np

from config import Config, get_default_config
from errors import BasePointError, DegenerateMetricError, PositivityError, InvariantViolation
from hilbert import StateVector, HermitianOperator, HorizontalTangent, field_decompose
from projective import (
    project, metric_g, symplectic_omega, complex_structure_J, to_real_coordinates
)
from uncertainty import CovarianceTensor

logger = logging.getLogger(__name__)

STRUCTURES = ('flat', 'pullback')


@dataclass(frozen=True, eq=False)
class MapDifferential:
    """du at one point: d_s = du(d/ds), d_t = du(d/dt), both horizontal at base"""
    base: StateVector
    d_s: HorizontalTangent
    d_t: HorizontalTangent

    def __post_init__(self):
        if not (self.d_s.shares_base(self.d_t) and self.d_s.base.dim == self.base.dim):
            raise BasePointError("Differential columns must be attached to the same base state")


@dataclass(frozen=True)
class IdentityReport:
    """Coefficients of ds^dt in the energy identity at one point"""
    energy_coeff: float
    symplectic_coeff: float
    dbar_norm_sq: float
    degenerate: bool

    # Same identity with the flat complex structure of the (s, t) chart
    dirichlet_coeff: float = 0.0
    flat_dbar_norm_sq: float = 0.0

    @property
    def residual(self) -> float:
        return self.energy_coeff - self.dbar_norm_sq - self.symplectic_coeff

    @property
    def flat_residual(self) -> float:
        return self.dirichlet_coeff - self.flat_dbar_norm_sq - self.symplectic_coeff

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['residual'] = self.residual
        data['flat_residual'] = self.flat_residual
        return data


def map_differential(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
                     config: Config = None) -> MapDifferential:
    """Differential of a map whose partials are X_A^horiz and X_B^horiz"""
    config = config or get_default_config()
    d_s = field_decompose(A, psi, config)[1]
    d_t = field_decompose(B, psi, config)[1]
    return MapDifferential(psi, d_s, d_t)


def pullback_metric(d: MapDifferential, config: Config = None) -> CovarianceTensor:
    """h_kl = 2 hbar Re <d_k, d_l>"""
    config = config or get_default_config()
    h11 = 2.0 * config.hbar * float(np.vdot(d.d_s.vector, d.d_s.vector).real)
    h22 = 2.0 * config.hbar * float(np.vdot(d.d_t.vector, d.d_t.vector).real)
    h12 = 2.0 * config.hbar * float(np.vdot(d.d_s.vector, d.d_t.vector).real)
    return CovarianceTensor(np.array([[h11, h12], [h12, h22]]), project(d.base), config.hbar)


def _determinant(h: CovarianceTensor, config: Config) -> float:
    det = h.determinant
    if det < -config.tol_psd * max(1.0, float(np.max(np.abs(h.entries))) ** 2):
        raise PositivityError(f"Pull-back metric has negative determinant {det:.3e}")
    return max(det, 0.0)


def energy_density(d: MapDifferential, config: Config = None) -> float:
    """e(u) = 1/2 g_ab h^kl du^a_k du^b_l, contracted with the inverse pull-back metric"""
    config = config or get_default_config()
    h = pullback_metric(d, config)
    if h.determinant <= config.tol_psd:
        raise DegenerateMetricError(f"Pull-back metric is degenerate (det {h.determinant:.3e})")

    columns = (d.d_s, d.d_t)
    ambient = np.array([[metric_g(v, w, config) for w in columns] for v in columns])
    return 0.5 * float(np.trace(np.linalg.solve(h.entries, ambient)))


def energy_form_coeff(d: MapDifferential, config: Config = None) -> float:
    """sqrt(det h), the coefficient of 1/2 |du|^2_h dA_h"""
    config = config or get_default_config()
    return float(np.sqrt(_determinant(pullback_metric(d, config), config)))


def symplectic_form_coeff(d: MapDifferential, config: Config = None) -> float:
    """(u*Omega)(d/ds, d/dt) = Omega(d_s, d_t)"""
    return symplectic_omega(d.d_s, d.d_t, config)


def dirichlet_density(d: MapDifferential, config: Config = None) -> float:
    """1/2 (h11 + h22), the energy density for the flat metric on the chart"""
    h = pullback_metric(d, config)
    return 0.5 * float(h.entries[0, 0] + h.entries[1, 1])


def antiholomorphic_part(d: MapDifferential, structure: str = 'flat',
                         config: Config = None) -> Tuple[float, np.ndarray]:
    """dbar_J u = 1/2 (du + J du j), returned as (norm_sq, columns)

    structure='flat' uses j d/ds = d/dt on the chart; norm_sq is the sum of the
    g-norms of both columns and equals dirichlet_density - symplectic_form_coeff.

    structure='pullback' uses the complex structure j_h that the pull-back
    metric induces on Sigma; norm_sq is |dbar|^2_h sqrt(det h) and equals
    energy_form_coeff - symplectic_form_coeff. Undefined when h is degenerate.

    columns has shape (2, n+1): the images of d/ds and d/dt.
    """
    config = config or get_default_config()
    if structure not in STRUCTURES:
        raise ValueError(f"Unknown complex structure '{structure}', expected one of {STRUCTURES}")

    v, w = d.d_s.vector, d.d_t.vector
    J = complex_structure_J

    if structure == 'flat':
        col_s = 0.5 * (v + J(d.d_t).vector)
        col_t = 0.5 * (w - J(d.d_s).vector)
        norm_sq = 2.0 * config.hbar * float(np.vdot(col_s, col_s).real + np.vdot(col_t, col_t).real)
        return norm_sq, np.stack([col_s, col_t])

    h = pullback_metric(d, config)
    det = h.determinant
    if det <= config.tol_psd:
        raise DegenerateMetricError(f"Pull-back complex structure undefined (det {det:.3e})")

    (h11, h12), (_, h22) = h.entries
    root = np.sqrt(det)

    # du(j_h d/ds) and du(j_h d/dt)
    du_js = (-h12 * v + h11 * w) / root
    du_jt = (-h22 * v + h12 * w) / root
    columns = np.stack([0.5 * (v + 1j * du_js), 0.5 * (w + 1j * du_jt)])

    gram = 2.0 * config.hbar * (columns.conj() @ columns.T).real
    inverse = np.array([[h22, -h12], [-h12, h11]]) / det
    norm_sq = float(np.sum(inverse * gram)) * root
    return norm_sq, columns


def cauchy_riemann_residual(d: MapDifferential) -> float:
    """Largest violation of v_a = w_{a+1}, v_{a+1} = -w_a over real coordinate pairs"""
    v = to_real_coordinates(d.d_s)
    w = to_real_coordinates(d.d_t)
    first = np.abs(v[0::2] - w[1::2])
    second = np.abs(v[1::2] + w[0::2])
    return float(max(first.max(), second.max()))


def symplectic_determinant_sum(d: MapDifferential, config: Config = None) -> float:
    """2 hbar sum over coordinate pairs of det [[v_a, w_a], [v_{a+1}, w_{a+1}]]"""
    config = config or get_default_config()
    v = to_real_coordinates(d.d_s)
    w = to_real_coordinates(d.d_t)
    total = float(np.sum(v[0::2] * w[1::2] - w[0::2] * v[1::2]))
    return 2.0 * config.hbar * total


def verify_differential(d: MapDifferential, config: Config = None) -> IdentityReport:
    """Evaluate and check the energy identity for given differential data"""
    config = config or get_default_config()

    h = pullback_metric(d, config)
    degenerate = h.determinant <= config.tol_psd
    energy = energy_form_coeff(d, config)
    symplectic = symplectic_form_coeff(d, config)

    if degenerate:
        # Rank-deficient du: only the coefficient form is defined
        dbar = energy - symplectic
    else:
        dbar = antiholomorphic_part(d, 'pullback', config)[0]

    report = IdentityReport(
        energy_coeff=energy,
        symplectic_coeff=symplectic,
        dbar_norm_sq=dbar,
        degenerate=bool(degenerate),
        dirichlet_coeff=dirichlet_density(d, config),
        flat_dbar_norm_sq=antiholomorphic_part(d, 'flat', config)[0],
    )

    scale = config.tol_eq * max(1.0, report.dirichlet_coeff)
    if abs(report.residual) > scale or abs(report.flat_residual) > scale:
        logger.error(f"Energy identity violated: residual={report.residual:.3e} "
                     f"flat residual={report.flat_residual:.3e}")
        raise InvariantViolation("Energy identity does not hold at this point", report)
    if report.dbar_norm_sq < -scale or report.flat_dbar_norm_sq < -scale:
        raise InvariantViolation("Antiholomorphic part has negative norm", report)

    return report


def verify_identity(A: HermitianOperator, B: HermitianOperator, psi: StateVector,
                    config: Config = None) -> IdentityReport:
    """Energy identity for the map family generated by A and B at psi"""
    return verify_differential(map_differential(A, B, psi, config), config)


__all__ = [
    'MapDifferential',
    'IdentityReport',
    'map_differential',
    'pullback_metric',
    'energy_density',
    'energy_form_coeff',
    'symplectic_form_coeff',
    'dirichlet_density',
    'antiholomorphic_part',
    'cauchy_riemann_residual',
    'symplectic_determinant_sum',
    'verify_differential',
    'verify_identity',
]
