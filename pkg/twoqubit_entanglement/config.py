"""Tolerances and campaign configuration."""

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import yaml

from . import utils
from .errors import ConfigError, UnknownEnsemble

ENSEMBLES = (
    "ginibre-rank-1",
    "ginibre-rank-2",
    "ginibre-rank-3",
    "ginibre-rank-4",
    "haar-pure",
    "canonical-uniform",
    "convex-combo",
    "x-state",
)


@dataclass
class Tolerances:
    """Every numerical threshold used by the pipeline, with module defaults."""

    eps_sep: float = 1e-10
    eps_c: float = 1e-8
    ferrari_tol: Optional[float] = None  # None selects the scale-aware default
    eig_tol: float = 1e-12
    imag_tol: float = 1e-10
    clamp_floor: float = 1e-10
    canon_tol: float = 1e-9
    root_atol: float = 1e-9
    signature_eps: float = 1e-9
    identity_rtol: float = 1e-10
    det_rtol: float = 1e-12

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None and f.name == "ferrari_tol":
                continue
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(f"Tolerance '{f.name}' must be > 0, got {value!r}")

    def as_dict(self) -> dict[str, Optional[float]]:
        """Effective tolerance set, echoed into every report."""
        return asdict(self)


@dataclass
class CampaignConfig:
    """Configuration of one randomized verification campaign."""

    ensemble: str = "ginibre-rank-4"
    trials: int = 1000
    seed: int = 0
    checks: list[str] = field(default_factory=lambda: ["equivalence"])
    tolerances: Tolerances = field(default_factory=Tolerances)
    workers: int = 1
    max_rejections: int = 10000
    boundary_limit: float = 0.01

    def __post_init__(self):
        if self.ensemble not in ENSEMBLES:
            raise UnknownEnsemble(
                f"Unknown ensemble '{self.ensemble}' (expected one of {', '.join(ENSEMBLES)})"
            )
        if self.seed < 0:
            raise ConfigError(f"seed must be >= 0, got {self.seed}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.max_rejections < 1:
            raise ConfigError(f"max_rejections must be >= 1, got {self.max_rejections}")
        if not self.checks:
            raise ConfigError("At least one check is required")

    def echo(self) -> dict[str, Any]:
        """Config as plain data for the report body."""
        return {
            "ensemble": self.ensemble,
            "trials": self.trials,
            "seed": self.seed,
            "checks": list(self.checks),
            "tolerances": self.tolerances.as_dict(),
            "workers": self.workers,
            "max_rejections": self.max_rejections,
            "boundary_limit": self.boundary_limit,
        }


def _as_float(value: Any) -> Any:
    # YAML 1.1 reads "1e-10" (no dot) as a string
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"Tolerance value {value!r} is not a number")
    return value


def load_tolerances(data: Optional[dict] = None, **overrides: Optional[float]) -> Tolerances:
    """
    Build tolerances from a mapping plus explicit overrides.

    Args:
        data: Mapping of tolerance name -> value (e.g. from YAML)
        overrides: Values from CLI flags; None means "not given"

    Returns:
        Tolerances with defaults for missing values
    """
    merged = {k: _as_float(v) for k, v in (data or {}).items()}
    known = {f.name for f in fields(Tolerances)}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"Unknown tolerance(s): {', '.join(sorted(unknown))}")
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return Tolerances(**merged)


def load_campaign(config_path: Optional[str] = None, **overrides: Any) -> CampaignConfig:
    """
    Load a campaign configuration from a YAML file.

    Args:
        config_path: Path to a YAML document. If None, only defaults and overrides apply.
        overrides: Field values from CLI flags; None means "not given".
            ``tolerances`` may be a dict of individual tolerance overrides.

    Returns:
        CampaignConfig with defaults for missing values.
    """
    data: dict = {}
    if config_path is not None:
        if not Path(config_path).is_file():
            raise ConfigError(f"Config file not found: {config_path}")
        with open(config_path) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"Config file {config_path} must contain a mapping")

    tol_overrides = overrides.pop("tolerances", None) or {}
    tolerances = load_tolerances(data.get("tolerances"), **tol_overrides)

    merged = {k: v for k, v in data.items() if k != "tolerances"}
    merged.update({k: v for k, v in overrides.items() if v is not None})

    known = {f.name for f in fields(CampaignConfig)}
    unknown = set(merged) - known
    if unknown:
        raise ConfigError(f"Unknown campaign field(s): {', '.join(sorted(unknown))}")

    if isinstance(merged.get("checks"), str):
        merged["checks"] = utils.split_list(merged["checks"])

    return CampaignConfig(tolerances=tolerances, **merged)

