"""
Verification campaigns
Per-trial evaluation of the uncertainty relation and the pointwise energy identity,
plus the surface experiments, each returning rows, a summary and any violations
"""

import logging
from typing import Any, Dict, List, Optional
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from config import Config, CampaignDefaults, CampaignMode, CampaignSpec, ReportConfig
from errors import GeometryError, InvariantViolation
from hilbert import random_hermitian, random_state
from uncertainty import rs_check, covariance_tensor
from pointwise import map_differential, pullback_metric, verify_differential, energy_density
from surface import (
    Grid, rational_curve_sample, perturb, harmonic_relax, energy_identity_integral,
    refinement_study, invariance_study, chart_symplectic_area
)

logger = logging.getLogger(__name__)


@dataclass
class TrialOutcome:
    """One evaluated trial"""
    trial: int
    row: Dict[str, Any]
    violation: Optional[str] = None


@dataclass
class CampaignResult:
    """Everything a campaign produces, before it is written to disk"""
    mode: CampaignMode
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    violations: List[Dict[str, Any]] = field(default_factory=list)

    # Extra tables keyed by file name (relaxation trace, invariance table)
    frames: Dict[str, pd.DataFrame] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations


def trial_seeds(seed: int, trials: int) -> List[np.random.SeedSequence]:
    """Independent child seeds, one per trial, fixed by the campaign seed alone"""
    return np.random.SeedSequence(seed).spawn(trials)


def _sample_triple(seed_seq: np.random.SeedSequence, dim: int, force_equal: bool = False):
    rng = np.random.default_rng(seed_seq)
    A = random_hermitian(dim, rng)
    B = A if force_equal else random_hermitian(dim, rng)
    psi = random_state(dim, rng)
    return A, B, psi


def rs_trial(trial: int, seed_seq: np.random.SeedSequence, dim: int, config: Config) -> TrialOutcome:
    A, B, psi = _sample_triple(seed_seq, dim)
    report = rs_check(A, B, psi, config)

    scale = (2.0 / config.hbar) ** 2
    row = {'trial': trial, 'dim': dim, 'hbar': config.hbar, **report.to_dict()}
    row['form_gap_lhs'] = abs(report.lhs_geometric - scale * report.lhs_operator_form)
    row['form_gap_rhs'] = abs(report.rhs_geometric - scale * report.rhs_operator_form)

    violation = None
    if report.slack < -config.tol_eq:
        violation = f"operator-form slack {report.slack:.3e} below -tol_eq"
    elif report.slack_geometric < -config.tol_eq * max(1.0, scale):
        violation = f"geometric slack {report.slack_geometric:.3e} below tolerance"
    elif max(row['form_gap_lhs'], row['form_gap_rhs']) > config.tol_eq * max(1.0, abs(report.lhs_geometric)):
        violation = f"forms disagree by {max(row['form_gap_lhs'], row['form_gap_rhs']):.3e}"
    return TrialOutcome(trial, row, violation)


def identity_trial(trial: int, seed_seq: np.random.SeedSequence, dim: int, config: Config,
                   force_equal: bool = False) -> TrialOutcome:
    A, B, psi = _sample_triple(seed_seq, dim, force_equal)
    d = map_differential(A, B, psi, config)
    row = {'trial': trial, 'dim': dim, 'hbar': config.hbar}

    try:
        report = verify_differential(d, config)
    except InvariantViolation as e:
        row.update(e.report.to_dict() if e.report is not None else {})
        return TrialOutcome(trial, row, str(e))

    row.update(report.to_dict())

    h = pullback_metric(d, config)
    m = covariance_tensor(A, B, psi, config)
    row['metric_gap'] = float(np.max(np.abs(h.entries - m.entries)))
    row['energy_density'] = float('nan') if report.degenerate else energy_density(d, config)

    violation = None
    if row['metric_gap'] > config.tol_psd * max(1.0, float(np.max(np.abs(m.entries)))):
        violation = f"pull-back metric differs from covariance tensor by {row['metric_gap']:.3e}"
    elif not report.degenerate:
        # Solving against h loses accuracy in proportion to its condition number
        allowed = config.tol_eq * max(1.0, float(np.linalg.cond(h.entries)))
        if abs(row['energy_density'] - 1.0) > allowed:
            violation = f"energy density {row['energy_density']!r} is not 1"
    return TrialOutcome(trial, row, violation)


def run_trial_chunk(mode: CampaignMode, trials: List[int], seeds: List[np.random.SeedSequence],
                    spec: CampaignSpec, config: Config) -> List[TrialOutcome]:
    """Evaluate a contiguous block of trials; GeometryError is recorded per trial"""
    outcomes = []
    for trial, seed_seq in zip(trials, seeds):
        try:
            if mode == CampaignMode.RS_VERIFY:
                outcomes.append(rs_trial(trial, seed_seq, spec.dim, config))
            else:
                outcomes.append(identity_trial(trial, seed_seq, spec.dim, config, spec.force_equal))
        except GeometryError as e:
            logger.error(f"Trial {trial} raised {type(e).__name__}: {e}")
            outcomes.append(TrialOutcome(trial, {'trial': trial, 'dim': spec.dim}, f"{type(e).__name__}: {e}"))
    return outcomes


def _violation_records(mode: CampaignMode, outcomes: List[TrialOutcome]) -> List[Dict[str, Any]]:
    return [{'mode': mode.value, 'trial': o.trial, 'message': o.violation, 'row': o.row}
            for o in outcomes if o.violation]


def collect_trials(mode: CampaignMode, outcomes: List[TrialOutcome], spec: CampaignSpec) -> CampaignResult:
    """Order outcomes by trial index and summarize them"""
    outcomes = sorted(outcomes, key=lambda o: o.trial)
    rows = [o.row for o in outcomes]
    frame = pd.DataFrame(rows)
    violations = _violation_records(mode, outcomes)

    summary = {'mode': mode.value, 'dim': spec.dim, 'hbar': spec.hbar, 'seed': spec.seed,
               'trials': len(rows), 'violations': len(violations), 'passed': not violations}

    if mode == CampaignMode.RS_VERIFY and 'slack' in frame:
        summary.update({
            'min_slack': float(frame['slack'].min()),
            'min_slack_geometric': float(frame['slack_geometric'].min()),
            'saturation_count': int(frame['saturated'].fillna(False).astype(bool).sum()),
            'max_form_gap': float(frame[['form_gap_lhs', 'form_gap_rhs']].max().max()),
        })
    elif mode == CampaignMode.POINT_IDENTITY and 'residual' in frame:
        summary.update({
            'degenerate_count': int(frame['degenerate'].fillna(False).astype(bool).sum()),
            'max_identity_residual': float(frame['residual'].abs().max()),
            'max_flat_residual': float(frame['flat_residual'].abs().max()),
            'max_metric_gap': float(frame['metric_gap'].max()) if 'metric_gap' in frame else None,
        })

    return CampaignResult(mode, rows, summary, violations)


# --- Surface experiments ---

def _records(mode: CampaignMode, violations: List[str]) -> List[Dict[str, Any]]:
    return [{'mode': mode.value, 'trial': 0, 'message': message, 'row': {}} for message in violations]


def surface_identity_campaign(spec: CampaignSpec, config: Config) -> CampaignResult:
    """Integrated identity of the rational sample on every refinement level, checked against the oracle"""
    mode = CampaignMode.SURFACE_IDENTITY
    try:
        frame = refinement_study(spec.degree, spec.grid.radius, spec.grid.levels, spec.target_dim, config)
    except InvariantViolation as e:
        record = {'mode': mode.value, 'trial': 0, 'message': str(e),
                  'row': e.report.to_dict() if e.report is not None else {}}
        return CampaignResult(mode, summary={'mode': mode.value, 'passed': False}, violations=[record])

    errors = frame['oracle_error'].to_numpy()
    ratios = (errors[:-1] / errors[1:]).tolist() if len(errors) > 1 else []
    final_relative_error = float(errors[-1] / frame['oracle'].iloc[-1])

    violations = []
    for (coarse, fine), ratio in zip(zip(spec.grid.levels, spec.grid.levels[1:]), ratios):
        if not ratio > CampaignDefaults.MIN_ORACLE_ERROR_RATIO:
            violations.append(f"oracle error ratio {ratio:.3f} from {coarse} to {fine} nodes "
                              f"is not above {CampaignDefaults.MIN_ORACLE_ERROR_RATIO}")
    if not final_relative_error < CampaignDefaults.MAX_ORACLE_RELATIVE_ERROR:
        violations.append(f"relative oracle error {final_relative_error:.3e} at the finest level "
                          f"is not below {CampaignDefaults.MAX_ORACLE_RELATIVE_ERROR}")

    summary = {
        'mode': mode.value,
        'degree': spec.degree,
        'radius': spec.grid.radius,
        'levels': list(spec.grid.levels),
        'oracle': float(frame['oracle'].iloc[0]),
        'max_identity_residual': float(frame['residual'].abs().max()),
        'oracle_error_ratios': ratios,
        'final_relative_error': final_relative_error,
        'violations': len(violations),
        'passed': not violations,
    }
    return CampaignResult(mode, frame.to_dict('records'), summary, _records(mode, violations))


def relax_campaign(spec: CampaignSpec, config: Config) -> CampaignResult:
    """Relax a perturbed rational sample and track energy against the symplectic floor"""
    mode = CampaignMode.RELAX
    base = rational_curve_sample(spec.degree, Grid.square(spec.grid.radius, spec.grid.n), spec.target_dim)
    start = perturb(base, spec.amplitude, spec.seed)
    initial = energy_identity_integral(start, config, check=False)
    result = harmonic_relax(start, spec.steps, spec.step_size, config)

    final = energy_identity_integral(result.map, config, check=False)
    trace = np.asarray(result.energy_trace)
    symplectic = np.asarray(result.symplectic_trace)
    drift = float(np.max(np.abs(symplectic - symplectic[0])))
    floor = max(abs(final.symplectic), 1e-300)
    initial_gap = (initial.energy - initial.symplectic) / floor
    relative_gap = (final.energy - final.symplectic) / floor

    violations = []
    if np.any(np.diff(trace) > 0):
        violations.append('energy trace increased')
    if drift > config.tol_quad * max(1.0, abs(symplectic[0])):
        violations.append(f"symplectic area drifted by {drift:.3e}")
    if relative_gap > CampaignDefaults.RELAX_FLOOR_TOL:
        violations.append(f"relative gap {relative_gap:.3e} to the symplectic floor "
                          f"is above {CampaignDefaults.RELAX_FLOOR_TOL}")
    if not result.converged and 'backoff' in result.message:
        violations.append(result.message)

    summary = {
        'mode': mode.value,
        'grid_n': spec.grid.n,
        'initial_energy': float(trace[0]),
        'final_energy': float(trace[-1]),
        'final_total_energy': final.energy,
        'symplectic_floor': final.symplectic,
        'initial_relative_gap': initial_gap,
        'relative_gap': relative_gap,
        'symplectic_drift': drift,
        'steps_taken': result.steps_taken,
        'final_step_size': result.final_step_size,
        'converged': result.converged,
        'message': result.message,
        'violations': len(violations),
        'passed': not violations,
    }
    return CampaignResult(mode, [], summary, _records(mode, violations),
                          frames={ReportConfig.RELAX_TRACE_FILE: result.to_frame()})


def invariance_campaign(spec: CampaignSpec, config: Config) -> CampaignResult:
    """Symplectic area of seeded perturbations with the boundary fixed, bounded by the quadrature error"""
    mode = CampaignMode.INVARIANCE
    base = rational_curve_sample(spec.degree, Grid.square(spec.grid.radius, spec.grid.n), spec.target_dim)
    reference = energy_identity_integral(base, config)
    frame = invariance_study(base, spec.amplitude, spec.trials, spec.seed, config)

    oracle = chart_symplectic_area(spec.grid.radius, spec.degree, config.hbar)
    quadrature_error = abs(reference.symplectic - oracle)
    spread = float(np.ptp(frame['symplectic'].to_numpy()))
    max_change = float(np.max(np.abs(frame['symplectic'] - reference.symplectic)))

    violations = []
    if max_change > quadrature_error:
        violations.append(f"symplectic area changed by {max_change:.3e}, "
                          f"more than the quadrature error {quadrature_error:.3e}")
    not_increased = frame.index[frame['energy'] <= reference.energy].tolist()
    if not_increased:
        violations.append(f"energy did not increase for trials {not_increased}")

    summary = {
        'mode': mode.value,
        'grid_n': spec.grid.n,
        'trials': spec.trials,
        'amplitude': spec.amplitude,
        'reference_energy': reference.energy,
        'reference_symplectic': reference.symplectic,
        'oracle': oracle,
        'quadrature_error': quadrature_error,
        'symplectic_spread': spread,
        'max_symplectic_change': max_change,
        'min_energy_increase': float(np.min(frame['energy'] - reference.energy)),
        'violations': len(violations),
        'passed': not violations,
    }
    return CampaignResult(mode, [], summary, _records(mode, violations),
                          frames={ReportConfig.INVARIANCE_FILE: frame})


SURFACE_CAMPAIGNS = {
    CampaignMode.SURFACE_IDENTITY: surface_identity_campaign,
    CampaignMode.RELAX: relax_campaign,
    CampaignMode.INVARIANCE: invariance_campaign,
}


__all__ = [
    'TrialOutcome',
    'CampaignResult',
    'trial_seeds',
    'rs_trial',
    'identity_trial',
    'run_trial_chunk',
    'collect_trials',
    'surface_identity_campaign',
    'relax_campaign',
    'invariance_campaign',
    'SURFACE_CAMPAIGNS',
]
