"""
Discretized maps from a rectangle of the complex plane into P(H)
Quadrature of energy, area and symplectic area, holomorphic samplers,
boundary-preserving perturbations and harmonic-map relaxation
"""

import json
import logging
from typing import Any, Dict, List, Sequence, Tuple
from dataclasses import dataclass, field, asdict

import numpy as np
import pandas as pd
from scipy import integrate

from config import Config, get_default_config, ReportConfig, CampaignDefaults
from errors import (
    ConvergenceError, DimensionError, InvariantViolation, NormalizationError
)
from hilbert import StateVector, HorizontalTangent, SeedLike, as_generator
from pointwise import MapDifferential

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid:
    """Tensor grid on [s0, s1] x [t0, t1], nodes indexed (i_s, i_t)"""
    s_range: Tuple[float, float]
    t_range: Tuple[float, float]
    n_s: int
    n_t: int

    def __post_init__(self):
        if self.n_s < 3 or self.n_t < 3:
            raise ValueError(f"Grid needs at least 3 nodes per axis, got {self.n_s} x {self.n_t}")
        if not (self.s_range[1] > self.s_range[0] and self.t_range[1] > self.t_range[0]):
            raise ValueError(f"Grid ranges must be increasing, got {self.s_range} and {self.t_range}")
        object.__setattr__(self, 's_range', tuple(float(x) for x in self.s_range))
        object.__setattr__(self, 't_range', tuple(float(x) for x in self.t_range))

    @classmethod
    def square(cls, radius: float, n: int) -> 'Grid':
        """[-radius, radius]^2 with n nodes per axis"""
        return cls((-radius, radius), (-radius, radius), n, n)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_s, self.n_t

    @property
    def spacing(self) -> Tuple[float, float]:
        return ((self.s_range[1] - self.s_range[0]) / (self.n_s - 1),
                (self.t_range[1] - self.t_range[0]) / (self.n_t - 1))

    @property
    def s_nodes(self) -> np.ndarray:
        return np.linspace(self.s_range[0], self.s_range[1], self.n_s)

    @property
    def t_nodes(self) -> np.ndarray:
        return np.linspace(self.t_range[0], self.t_range[1], self.n_t)

    def complex_nodes(self) -> np.ndarray:
        """z = s + i t on the node array"""
        s, t = np.meshgrid(self.s_nodes, self.t_nodes, indexing='ij')
        return s + 1j * t

    def weights(self) -> np.ndarray:
        """Trapezoidal quadrature weights"""
        h_s, h_t = self.spacing
        w_s = np.full(self.n_s, h_s)
        w_t = np.full(self.n_t, h_t)
        w_s[[0, -1]] *= 0.5
        w_t[[0, -1]] *= 0.5
        return np.outer(w_s, w_t)

    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        mask[[0, -1], :] = True
        mask[:, [0, -1]] = True
        return mask

    def to_dict(self) -> Dict[str, Any]:
        return {'s_range': list(self.s_range), 't_range': list(self.t_range),
                'n_s': self.n_s, 'n_t': self.n_t}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'Grid':
        return cls(tuple(data['s_range']), tuple(data['t_range']), int(data['n_s']), int(data['n_t']))


@dataclass(frozen=True, eq=False)
class SurfaceMap:
    """Unit-norm representatives f(s, t) on every node, with a Dirichlet mask"""
    grid: Grid
    values: np.ndarray
    boundary_fixed: np.ndarray = None

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        if values.ndim != 3 or values.shape[:2] != self.grid.shape:
            raise DimensionError(f"Values have shape {values.shape}, grid expects {self.grid.shape} x dim")
        if values.shape[2] < 2:
            raise DimensionError(f"State dimension must be at least 2, got {values.shape[2]}")

        drift = float(np.max(np.abs(np.linalg.norm(values, axis=-1) - 1.0)))
        if drift > get_default_config().tol_eq:
            raise NormalizationError(f"Map values are not unit norm (max drift {drift:.3e})")

        mask = self.grid.boundary_mask() if self.boundary_fixed is None else np.array(self.boundary_fixed, dtype=bool)
        if mask.shape != self.grid.shape:
            raise DimensionError(f"Boundary mask has shape {mask.shape}, grid expects {self.grid.shape}")

        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, 'values', values)
        object.__setattr__(self, 'boundary_fixed', mask)

    @property
    def dim(self) -> int:
        return self.values.shape[2]

    def state(self, i: int, j: int) -> StateVector:
        return StateVector(self.values[i, j])

    def with_values(self, values: np.ndarray) -> 'SurfaceMap':
        return SurfaceMap(self.grid, values, self.boundary_fixed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'format': ReportConfig.MAP_FORMAT,
            'version': ReportConfig.MAP_VERSION,
            'grid': self.grid.to_dict(),
            'dim': self.dim,
            'values': np.stack([self.values.real, self.values.imag], axis=-1).tolist(),
            'boundary_fixed': self.boundary_fixed.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SurfaceMap':
        if data.get('format') != ReportConfig.MAP_FORMAT:
            raise ValueError(f"Not a surface map document (format {data.get('format')!r})")
        if data.get('version') != ReportConfig.MAP_VERSION:
            raise ValueError(f"Unsupported surface map version {data.get('version')!r}")

        pairs = np.array(data['values'], dtype=float)
        values = pairs[..., 0] + 1j * pairs[..., 1]
        if values.shape[-1] != data['dim']:
            raise DimensionError(f"Declared dim {data['dim']} does not match values of shape {values.shape}")
        return cls(Grid.from_dict(data['grid']), values, np.array(data['boundary_fixed'], dtype=bool))

    def __repr__(self) -> str:
        return f"SurfaceMap(grid={self.grid.n_s}x{self.grid.n_t}, dim={self.dim})"


@dataclass(frozen=True)
class EnergyBreakdown:
    """Integrated functionals of one map"""
    energy: float
    area: float
    symplectic: float
    dbar: float
    dirichlet: float = 0.0
    identity_residual: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class RelaxResult:
    """Outcome of harmonic_relax"""
    map: SurfaceMap
    energy_trace: List[float]
    symplectic_trace: List[float] = field(default_factory=list)
    converged: bool = False
    steps_taken: int = 0
    final_step_size: float = 0.0
    message: str = ""

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'step': np.arange(len(self.energy_trace)),
            'energy': self.energy_trace,
            'symplectic': self.symplectic_trace,
        })


# --- Finite differences ---

def _align(neighbor: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Rotate neighbor representatives so <center, neighbor> is real and non-negative"""
    overlap = np.sum(center.conj() * neighbor, axis=-1)
    magnitude = np.abs(overlap)
    phase = np.ones_like(overlap)
    nonzero = magnitude > 0
    phase[nonzero] = overlap[nonzero].conj() / magnitude[nonzero]
    return neighbor * phase[..., None]


def _axis_derivative(values: np.ndarray, axis: int, h: float) -> np.ndarray:
    """Gauge-aligned second-order differences along one grid axis"""
    v = np.moveaxis(values, axis, 0)
    d = np.empty_like(v)

    d[1:-1] = (_align(v[2:], v[1:-1]) - _align(v[:-2], v[1:-1])) / (2.0 * h)
    d[0] = (-3.0 * v[0] + 4.0 * _align(v[1], v[0]) - _align(v[2], v[0])) / (2.0 * h)
    d[-1] = (3.0 * v[-1] - 4.0 * _align(v[-2], v[-1]) + _align(v[-3], v[-1])) / (2.0 * h)
    return np.moveaxis(d, 0, axis)


def _horizontal(derivative: np.ndarray, values: np.ndarray) -> np.ndarray:
    radial = np.sum(values.conj() * derivative, axis=-1)
    return derivative - radial[..., None] * values


def differential_fields(surface: SurfaceMap) -> Tuple[np.ndarray, np.ndarray]:
    """Horizontal d_s and d_t on every node, arrays shaped like surface.values"""
    h_s, h_t = surface.grid.spacing
    d_s = _horizontal(_axis_derivative(surface.values, 0, h_s), surface.values)
    d_t = _horizontal(_axis_derivative(surface.values, 1, h_t), surface.values)
    return d_s, d_t


def discrete_differential(surface: SurfaceMap, node: Tuple[int, int]) -> MapDifferential:
    """MapDifferential at one node; edge nodes use one-sided stencils"""
    i, j = node
    if not (0 <= i < surface.grid.n_s and 0 <= j < surface.grid.n_t):
        raise DimensionError(f"Node {node} is outside the {surface.grid.n_s}x{surface.grid.n_t} grid")

    d_s, d_t = differential_fields(surface)
    base = surface.state(i, j)
    return MapDifferential(base, HorizontalTangent(base, d_s[i, j]), HorizontalTangent(base, d_t[i, j]))


def _densities(surface: SurfaceMap, config: Config) -> Dict[str, np.ndarray]:
    d_s, d_t = differential_fields(surface)
    two_hbar = 2.0 * config.hbar

    h11 = two_hbar * np.sum(np.abs(d_s) ** 2, axis=-1)
    h22 = two_hbar * np.sum(np.abs(d_t) ** 2, axis=-1)
    cross = np.sum(d_s.conj() * d_t, axis=-1)
    h12 = two_hbar * cross.real

    return {
        'energy': 0.5 * (h11 + h22),
        'area': np.sqrt(np.clip(h11 * h22 - h12 ** 2, 0.0, None)),
        'symplectic': two_hbar * cross.imag,
        # flat dbar: hbar |d_s + i d_t|^2
        'dbar': config.hbar * np.sum(np.abs(d_s + 1j * d_t) ** 2, axis=-1),
    }


def _integrate(density: np.ndarray, grid: Grid) -> float:
    return float(np.sum(grid.weights() * density))


# --- Functionals ---

def total_energy(surface: SurfaceMap, config: Config = None) -> float:
    """E(u) = integral of 1/2 |du|^2 with the flat chart metric"""
    config = config or get_default_config()
    return _integrate(_densities(surface, config)['energy'], surface.grid)


def total_symplectic_area(surface: SurfaceMap, config: Config = None) -> float:
    """Integral of u*Omega"""
    config = config or get_default_config()
    return _integrate(_densities(surface, config)['symplectic'], surface.grid)


def total_volume(surface: SurfaceMap, config: Config = None) -> float:
    """V(u) = integral of sqrt(det h)"""
    config = config or get_default_config()
    return _integrate(_densities(surface, config)['area'], surface.grid)


def energy_identity_integral(surface: SurfaceMap, config: Config = None,
                             check: bool = True) -> EnergyBreakdown:
    """All integrated functionals from one pass, checking E = dbar + symplectic"""
    config = config or get_default_config()
    densities = _densities(surface, config)
    totals = {name: _integrate(density, surface.grid) for name, density in densities.items()}

    breakdown = EnergyBreakdown(
        energy=totals['energy'],
        area=totals['area'],
        symplectic=totals['symplectic'],
        dbar=totals['dbar'],
        dirichlet=totals['energy'],
        identity_residual=totals['energy'] - totals['dbar'] - totals['symplectic'],
    )

    if check:
        tol = config.tol_quad * max(1.0, abs(breakdown.energy))
        if abs(breakdown.identity_residual) > tol:
            raise InvariantViolation(
                f"Integrated energy identity off by {breakdown.identity_residual:.3e}", breakdown
            )
        if breakdown.energy < breakdown.symplectic - tol:
            raise InvariantViolation("Energy is below the symplectic area", breakdown)
        if breakdown.area > breakdown.energy + tol:
            raise InvariantViolation("Area exceeds energy", breakdown)

    return breakdown


# --- Samplers and perturbations ---

def rational_curve_sample(degree: int, grid: Grid, target_dim: int = 1) -> SurfaceMap:
    """Normalized representatives of z -> [1 : z^degree : 0 : ... : 0] in CP^target_dim"""
    if degree < 1:
        raise ValueError(f"degree must be at least 1, got {degree}")
    if target_dim < 1:
        raise ValueError(f"target_dim must be at least 1, got {target_dim}")

    z = grid.complex_nodes()
    values = np.zeros(grid.shape + (target_dim + 1,), dtype=complex)
    values[..., 0] = 1.0
    values[..., 1] = z ** degree
    values /= np.linalg.norm(values, axis=-1, keepdims=True)
    return SurfaceMap(grid, values)


def _normalized(values: np.ndarray) -> np.ndarray:
    return values / np.linalg.norm(values, axis=-1, keepdims=True)


def perturb(surface: SurfaceMap, amplitude: float, seed: SeedLike = None) -> SurfaceMap:
    """Add a smooth random bump vanishing on the grid boundary; fixed nodes stay untouched"""
    if amplitude < 0:
        raise ValueError(f"amplitude must be non-negative, got {amplitude}")
    if amplitude == 0:
        return surface

    rng = as_generator(seed)
    grid = surface.grid
    modes = CampaignDefaults.BUMP_MODES

    sigma = (grid.s_nodes - grid.s_range[0]) / (grid.s_range[1] - grid.s_range[0])
    tau = (grid.t_nodes - grid.t_range[0]) / (grid.t_range[1] - grid.t_range[0])
    k = np.arange(1, modes + 1)[:, None]
    basis_s = np.sin(np.pi * k * sigma[None, :])
    basis_t = np.sin(np.pi * k * tau[None, :])

    shape = (modes, modes, surface.dim)
    coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    bump = np.einsum('klc,ki,lj->ijc', coeffs, basis_s, basis_t) * (amplitude / modes)

    values = _normalized(surface.values + bump)
    values[surface.boundary_fixed] = surface.values[surface.boundary_fixed]
    return surface.with_values(values)


# --- Edge energy and relaxation ---

def _edge_coefficients(grid: Grid, hbar: float) -> Tuple[np.ndarray, np.ndarray]:
    """Weights of s-edges and t-edges; edges on the grid boundary count half"""
    h_s, h_t = grid.spacing
    w_t = np.ones(grid.n_t)
    w_t[[0, -1]] = 0.5
    w_s = np.ones(grid.n_s)
    w_s[[0, -1]] = 0.5

    c_s = hbar * (h_t / h_s) * np.broadcast_to(w_t, (grid.n_s - 1, grid.n_t))
    c_t = hbar * (h_s / h_t) * np.broadcast_to(w_s[:, None], (grid.n_s, grid.n_t - 1))
    return c_s, c_t


def edge_energy_values(values: np.ndarray, grid: Grid, hbar: float = 1.0) -> float:
    """Sum over edges of hbar (cell area / h_e^2) (1 - |<psi_i, psi_j>|^2)"""
    c_s, c_t = _edge_coefficients(grid, hbar)
    overlap_s = np.sum(values[:-1].conj() * values[1:], axis=-1)
    overlap_t = np.sum(values[:, :-1].conj() * values[:, 1:], axis=-1)
    return float(np.sum(c_s * (1.0 - np.abs(overlap_s) ** 2)) + np.sum(c_t * (1.0 - np.abs(overlap_t) ** 2)))


def edge_energy(surface: SurfaceMap, config: Config = None) -> float:
    """Edge discretization of total_energy, the functional harmonic_relax descends"""
    config = config or get_default_config()
    return edge_energy_values(surface.values, surface.grid, config.hbar)


def edge_energy_gradient(values: np.ndarray, grid: Grid, hbar: float = 1.0) -> np.ndarray:
    """Gradient of edge_energy_values in real coordinates, packed as Re + i Im

    For an edge (i, j) with weight c the contribution at i is
    -2 c psi_j <psi_j, psi_i>.
    """
    c_s, c_t = _edge_coefficients(grid, hbar)
    gradient = np.zeros_like(values)

    overlap_s = np.sum(values[:-1].conj() * values[1:], axis=-1)
    gradient[:-1] -= 2.0 * (c_s * overlap_s.conj())[..., None] * values[1:]
    gradient[1:] -= 2.0 * (c_s * overlap_s)[..., None] * values[:-1]

    overlap_t = np.sum(values[:, :-1].conj() * values[:, 1:], axis=-1)
    gradient[:, :-1] -= 2.0 * (c_t * overlap_t.conj())[..., None] * values[:, 1:]
    gradient[:, 1:] -= 2.0 * (c_t * overlap_t)[..., None] * values[:, :-1]
    return gradient


def _descent_step(values: np.ndarray, free: np.ndarray, step: float,
                  grid: Grid, hbar: float) -> np.ndarray:
    gradient = edge_energy_gradient(values, grid, hbar)
    radial = np.sum(values.conj() * gradient, axis=-1).real
    tangent = gradient - radial[..., None] * values

    moved = values.copy()
    moved[free] = _normalized(values[free] - step * tangent[free])
    return moved


def harmonic_relax(surface: SurfaceMap, steps: int, step_size: float,
                   config: Config = None, strict: bool = False) -> RelaxResult:
    """Projected gradient descent on the edge energy with Dirichlet boundary

    Each step moves free nodes against the tangential gradient and renormalizes.
    A step that raises the energy is retried with the step size scaled by
    BACKOFF_FACTOR, at most MAX_BACKOFF times. The run stops early once the
    relative decrease falls below RELAX_STALL_TOL.
    """
    config = config or get_default_config()
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if step_size < 0:
        raise ValueError(f"step_size must be non-negative, got {step_size}")
    if not surface.boundary_fixed.any():
        raise ValueError("harmonic_relax needs at least one fixed node")

    grid, hbar = surface.grid, config.hbar
    free = ~surface.boundary_fixed
    values = surface.values
    energy = edge_energy_values(values, grid, hbar)
    energy_trace = [energy]
    symplectic_trace = [total_symplectic_area(surface, config)]

    if step_size == 0 or steps == 0:
        return RelaxResult(surface, energy_trace, symplectic_trace, True, 0, step_size,
                           "no steps requested")

    step = step_size
    converged = False
    message = f"step budget of {steps} exhausted"
    steps_taken = 0

    for _ in range(steps):
        for _attempt in range(CampaignDefaults.MAX_BACKOFF + 1):
            candidate = _descent_step(values, free, step, grid, hbar)
            candidate_energy = edge_energy_values(candidate, grid, hbar)
            if candidate_energy <= energy:
                break
            step *= CampaignDefaults.BACKOFF_FACTOR
            logger.debug(f"Energy rose to {candidate_energy:.12g}, step size reduced to {step:.3e}")
        else:
            if candidate_energy - energy <= CampaignDefaults.RELAX_STALL_TOL * energy:
                converged = True
                message = "stalled at a local minimum"
                break
            message = "energy did not decrease after exhausting step-size backoff"
            logger.warning(message)
            if strict:
                raise ConvergenceError(message)
            break

        decrease = energy - candidate_energy
        values, energy = candidate, candidate_energy
        steps_taken += 1
        energy_trace.append(energy)
        symplectic_trace.append(total_symplectic_area(surface.with_values(values), config))

        if decrease <= CampaignDefaults.RELAX_STALL_TOL * energy:
            converged = True
            message = "relative energy decrease below stall tolerance"
            break

    logger.info(f"Relaxation finished after {steps_taken} steps: {message} (energy {energy:.9g})")
    return RelaxResult(surface.with_values(values), energy_trace, symplectic_trace,
                       converged, steps_taken, step, message)


# --- Oracles and studies ---

def _area_density(degree: int, hbar: float):
    def density(y: float, x: float) -> float:
        r_sq = x * x + y * y
        return 2.0 * hbar * degree ** 2 * r_sq ** (degree - 1) / (1.0 + r_sq ** degree) ** 2
    return density


def chart_symplectic_area(radius: float, degree: int = 1, hbar: float = 1.0) -> float:
    """Symplectic area of z -> [1 : z^degree] over the square [-radius, radius]^2"""
    quadrant, _ = integrate.dblquad(_area_density(degree, hbar), 0.0, radius, 0.0, radius,
                                    epsabs=1e-13, epsrel=1e-12)
    return 4.0 * quadrant


def disk_symplectic_area(radius: float, degree: int = 1, hbar: float = 1.0) -> float:
    """Same area over the round disk |z| <= radius: 2 pi hbar d R^2d / (1 + R^2d)"""
    power = radius ** (2 * degree)
    return 2.0 * np.pi * hbar * degree * power / (1.0 + power)


def refinement_study(degree: int = 1, radius: float = 4.0, sizes: Sequence[int] = (33, 65, 129),
                     target_dim: int = 1, config: Config = None) -> pd.DataFrame:
    """Integrated functionals of the rational sample on successively finer grids"""
    config = config or get_default_config()
    oracle = chart_symplectic_area(radius, degree, config.hbar)

    rows = []
    for n in sizes:
        surface = rational_curve_sample(degree, Grid.square(radius, n), target_dim)
        breakdown = energy_identity_integral(surface, config)
        rows.append({
            'n_s': n,
            'n_t': n,
            'energy': breakdown.energy,
            'area': breakdown.area,
            'symplectic': breakdown.symplectic,
            'dbar': breakdown.dbar,
            'residual': breakdown.identity_residual,
            'oracle': oracle,
            'oracle_error': abs(breakdown.symplectic - oracle),
        })
        logger.info(f"Refinement level {n}x{n}: symplectic={breakdown.symplectic:.9f} "
                    f"oracle error={rows[-1]['oracle_error']:.3e}")

    return pd.DataFrame(rows, columns=ReportConfig.SURFACE_COLUMNS)


def invariance_study(surface: SurfaceMap, amplitude: float, trials: int = CampaignDefaults.INVARIANCE_TRIALS,
                     seed: int = 0, config: Config = None) -> pd.DataFrame:
    """Functionals of independently perturbed copies of one map"""
    config = config or get_default_config()
    children = np.random.SeedSequence(seed).spawn(trials)

    rows = []
    for trial, child in enumerate(children):
        breakdown = energy_identity_integral(perturb(surface, amplitude, np.random.default_rng(child)), config)
        rows.append({'trial': trial, 'energy': breakdown.energy, 'symplectic': breakdown.symplectic,
                     'area': breakdown.area, 'dbar': breakdown.dbar})

    frame = pd.DataFrame(rows, columns=['trial', 'energy', 'symplectic', 'area', 'dbar'])
    logger.info(f"Invariance study: symplectic spread {np.ptp(frame['symplectic']):.3e} over {trials} trials")
    return frame


# --- Persistence ---

def save_map(surface: SurfaceMap, path: str):
    with open(path, 'w') as f:
        json.dump(surface.to_dict(), f, indent=2, sort_keys=True)
    logger.info(f"Saved surface map to {path}")


def load_map(path: str) -> SurfaceMap:
    with open(path, 'r') as f:
        return SurfaceMap.from_dict(json.load(f))


__all__ = [
    'Grid',
    'SurfaceMap',
    'EnergyBreakdown',
    'RelaxResult',
    'differential_fields',
    'discrete_differential',
    'total_energy',
    'total_symplectic_area',
    'total_volume',
    'energy_identity_integral',
    'rational_curve_sample',
    'perturb',
    'edge_energy',
    'edge_energy_values',
    'edge_energy_gradient',
    'harmonic_relax',
    'chart_symplectic_area',
    'disk_symplectic_area',
    'refinement_study',
    'invariance_study',
    'save_map',
    'load_map',
]
