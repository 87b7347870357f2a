"""Configuration for the verification harness"""

import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

from errors import ConfigError
from precision import DOUBLE, DOUBLE_DOUBLE, PRECISIONS

logger = logging.getLogger(__name__)

CONFIG_FILENAME = ".rtf_verify_config.json"


def _default_path(path: Optional[str]) -> Path:
    if path is None:
        return Path.home() / CONFIG_FILENAME
    return Path(path).expanduser()


@dataclass
class ToleranceConfig:
    """Tolerances, caps and backend choice"""

    # Pass/fail threshold on the relative residual
    identity_tol: float = 1e-8
    series_tol: float = 1e-12
    precision: str = "double"
    # weights at or above this run in double-double on the double backend (0 disables)
    extended_from_weight: int = 20

    # Work caps
    series_cap: int = 100000
    quadrature_cap: int = 1024
    hyp_cap: int = 200000
    qexp_length: int = 2000
    qexp_cap: int = 20000

    # (0,0) main term contour
    contour_radius: float = 0.1
    contour_samples: int = 64

    # scan
    workers: int = 1

    def __post_init__(self):
        for name in ("identity_tol", "series_tol"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")
        if self.series_tol >= self.identity_tol:
            raise ConfigError(f"series_tol {self.series_tol} must be below identity_tol {self.identity_tol}")
        if self.precision not in PRECISIONS:
            raise ConfigError(f"precision must be one of {', '.join(PRECISIONS)}, got '{self.precision}'")
        for name in ("series_cap", "quadrature_cap", "hyp_cap", "qexp_length", "qexp_cap", "workers"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer, got {getattr(self, name)}")
        if int(self.extended_from_weight) < 0:
            raise ConfigError(f"extended_from_weight must be non-negative, got {self.extended_from_weight}")
        if self.qexp_length > self.qexp_cap:
            raise ConfigError(f"qexp_length {self.qexp_length} exceeds qexp_cap {self.qexp_cap}")
        if not 0 < self.contour_radius < 0.5:
            raise ConfigError(f"contour_radius must lie in (0, 0.5), got {self.contour_radius}")
        if self.contour_samples < 16:
            raise ConfigError(f"contour_samples must be at least 16, got {self.contour_samples}")

    def precision_for(self, k: int) -> str:
        """Backend a weight-k instance runs on"""
        if self.precision == DOUBLE and self.extended_from_weight and k >= self.extended_from_weight:
            return DOUBLE_DOUBLE
        return self.precision

    def replace(self, **changes) -> "ToleranceConfig":
        """Copy with the non-None overrides applied"""
        data = asdict(self)
        data.update({k: v for k, v in changes.items() if v is not None})
        return ToleranceConfig(**data)

    def save(self, path: Optional[str] = None) -> Path:
        """Save configuration to JSON file"""
        path = _default_path(path)
        with open(path, "w") as f:
            json.dump(asdict(self), f, indent=2)
        logger.info("✓ Configuration saved to %s", path)
        return path

    @classmethod
    def load(cls, path: Optional[str] = None) -> "ToleranceConfig":
        """Load configuration from JSON, or return defaults if not found"""
        path = _default_path(path)
        if not path.exists():
            logger.info("ℹ️  No configuration file found, using defaults")
            return cls()
        try:
            with open(path, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Configuration file {path} is not valid JSON: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            logger.warning("⚠️  Ignoring unknown configuration keys: %s", ", ".join(sorted(unknown)))
        logger.info("✓ Configuration loaded from %s", path)
        return cls(**{k: v for k, v in data.items() if k in known})

    @staticmethod
    def exists(path: Optional[str] = None) -> bool:
        """Check if configuration file exists"""
        return _default_path(path).exists()
