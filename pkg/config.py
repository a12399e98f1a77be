"""
Configuration module for the geometric quantum mechanics toolkit
Contains numerical tolerances, campaign modes, grid parameters and report settings
"""

import os
import json
import logging
from enum import Enum
from typing import Any, Dict, List, Optional
from dataclasses import dataclass, field, asdict, replace

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

# Environment variable honoured by Config.from_env
ENV_TOL_EQ = 'GQM_TOL_EQ'


class CampaignMode(Enum):
    RS_VERIFY = "rs-verify"
    POINT_IDENTITY = "point-identity"
    SURFACE_IDENTITY = "surface-identity"
    RELAX = "relax"
    INVARIANCE = "invariance"

    @property
    def uses_state_space(self) -> bool:
        """Modes that sample random (A, B, psi) triples"""
        return self in (CampaignMode.RS_VERIFY, CampaignMode.POINT_IDENTITY)


@dataclass(frozen=True)
class Config:
    """Action units and tolerances shared by every operation"""
    hbar: float = 1.0
    tol_eq: float = 1e-10
    tol_psd: float = 1e-12

    # Integrated identities on discretized surfaces
    tol_quad: float = 5e-3

    def __post_init__(self):
        for name in ('hbar', 'tol_eq', 'tol_psd', 'tol_quad'):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"Config.{name} must be positive, got {value}")

    def with_hbar(self, hbar: float) -> 'Config':
        return replace(self, hbar=hbar)

    def with_tolerances(self, tol_eq: Optional[float] = None,
                        tol_psd: Optional[float] = None) -> 'Config':
        return replace(
            self,
            tol_eq=self.tol_eq if tol_eq is None else tol_eq,
            tol_psd=self.tol_psd if tol_psd is None else tol_psd
        )

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> 'Config':
        """Build a Config, letting GQM_TOL_EQ override the equality tolerance"""
        load_dotenv(dotenv_path)

        kwargs = {}
        tol_eq = os.getenv(ENV_TOL_EQ)
        if tol_eq:
            kwargs['tol_eq'] = float(tol_eq)
            logger.info(f"tol_eq overridden from environment: {tol_eq}")

        return cls(**kwargs)


@dataclass
class GridConfig:
    """Grid parameters for surface campaigns"""
    n: int = 33
    radius: float = 4.0

    # Node counts per refinement level (None derives three levels from n)
    levels: List[int] = None

    def __post_init__(self):
        if self.levels is None:
            self.levels = [self.n, 2 * self.n - 1, 4 * self.n - 3]

    def validate(self):
        if self.n < 3:
            raise ValueError(f"grid n must be at least 3, got {self.n}")
        if not self.radius > 0:
            raise ValueError(f"grid radius must be positive, got {self.radius}")
        bad = [level for level in self.levels if level < 3]
        if bad:
            raise ValueError(f"refinement levels must be at least 3, got {bad}")


@dataclass
class CampaignSpec:
    """One verification campaign, parsed from flags or a JSON config file"""
    mode: CampaignMode = CampaignMode.RS_VERIFY
    dim: int = 2
    trials: int = 1000
    seed: int = 7
    hbar: float = 1.0
    grid: GridConfig = field(default_factory=GridConfig)
    output_path: str = "reports"

    # Surface parameters
    degree: int = 1
    target_dim: int = 1
    amplitude: float = 0.05
    steps: int = 5000
    step_size: float = 0.1

    # Execution
    workers: int = 4
    force_equal: bool = False

    def validate(self):
        """Raise ValueError on an inconsistent spec"""
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.mode.uses_state_space and self.dim < 2:
            raise ValueError(f"dim must be at least 2 for {self.mode.value}, got {self.dim}")
        if not self.hbar > 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if self.degree < 1:
            raise ValueError(f"degree must be at least 1, got {self.degree}")
        if self.target_dim < 1:
            raise ValueError(f"target_dim must be at least 1, got {self.target_dim}")
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be non-negative, got {self.amplitude}")
        if self.steps < 0:
            raise ValueError(f"steps must be non-negative, got {self.steps}")
        if self.step_size < 0:
            raise ValueError(f"step_size must be non-negative, got {self.step_size}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")
        self.grid.validate()

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['mode'] = self.mode.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CampaignSpec':
        data = dict(data)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"Unknown campaign fields: {sorted(unknown)}")

        if 'mode' in data:
            data['mode'] = CampaignMode(data['mode'])
        if isinstance(data.get('grid'), dict):
            data['grid'] = GridConfig(**data['grid'])
        return cls(**data)

    @classmethod
    def from_file(cls, path: str) -> 'CampaignSpec':
        with open(path, 'r') as f:
            spec = cls.from_dict(json.load(f))
        logger.info(f"Loaded campaign spec from {path}")
        return spec

    def merge_overrides(self, overrides: Dict[str, Any]) -> 'CampaignSpec':
        """Return a copy where every non-None override replaces the file value"""
        data = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            if key in ('grid_n', 'grid_radius', 'levels'):
                grid_key = {'grid_n': 'n', 'grid_radius': 'radius', 'levels': 'levels'}[key]
                data['grid'][grid_key] = value
                if key == 'grid_n' and overrides.get('levels') is None:
                    data['grid']['levels'] = None
            else:
                data[key] = value
        return CampaignSpec.from_dict(data)


class ReportConfig:
    """Report file layout"""

    LOG_FILE = "gqm_campaign.log"

    ROWS_SUFFIX = "_rows.csv"
    SUMMARY_SUFFIX = "_summary.json"
    RELAX_TRACE_FILE = "relax_trace.csv"
    INVARIANCE_FILE = "invariance.csv"
    VIOLATIONS_FILE = "violations.json"

    # Full double precision in CSV rows
    FLOAT_FORMAT = "%.17g"

    SURFACE_COLUMNS = ['n_s', 'n_t', 'energy', 'area', 'symplectic', 'dbar',
                       'residual', 'oracle', 'oracle_error']

    MAP_FORMAT = "gqm-surface-map"
    MAP_VERSION = 1


class CampaignDefaults:
    """Execution defaults for campaigns and relaxation"""

    CHUNK_SIZE = 250
    MAX_WORKERS = 4

    # Relaxation step-size backoff
    MAX_BACKOFF = 20
    BACKOFF_FACTOR = 0.5

    # Relative energy decrease below which relaxation is considered settled
    RELAX_STALL_TOL = 1e-12

    # Relaxed energy must end within this fraction of the symplectic floor
    RELAX_FLOOR_TOL = 0.01

    INVARIANCE_TRIALS = 20

    # Refinement study: minimum oracle error ratio between levels, maximum relative error at the finest
    MIN_ORACLE_ERROR_RATIO = 3.0
    MAX_ORACLE_RELATIVE_ERROR = 0.01

    # Modes of the smooth perturbation bump along each axis
    BUMP_MODES = 3


def get_mode_names() -> List[str]:
    """Get list of all campaign mode names"""
    return [mode.value for mode in CampaignMode]


# Global default configuration, built from the environment on first use
_default_config = None


def get_default_config() -> Config:
    """Get the configuration used when an operation receives no explicit Config"""
    global _default_config
    if _default_config is None:
        _default_config = Config.from_env()
    return _default_config


def reset_default_config():
    """Drop the cached default so the next call re-reads the environment"""
    global _default_config
    _default_config = None


# Export key components
__all__ = [
    'ENV_TOL_EQ',
    'CampaignMode',
    'Config',
    'GridConfig',
    'CampaignSpec',
    'ReportConfig',
    'CampaignDefaults',
    'get_default_config',
    'reset_default_config',
    'get_mode_names',
]
