"""
Runtime configuration for cone-kernel.

Tunables are read from (highest precedence first) explicit keyword overrides,
a key=value config file, CONEKERNEL_* environment variables or a .env file, and
finally the shipped defaults below.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Optional

import structlog
from dotenv import dotenv_values
from pydantic import BaseModel, Field

from .models import ContourSpec, SeriesConfig, SpecFunConfig

logger = structlog.get_logger(__name__)

ENV_PREFIX = "CONEKERNEL_"


class Settings(BaseModel):
    """All numerical and harness tunables with their shipped defaults."""

    # Special functions
    rel_tol: float = Field(1e-12, gt=0, le=1e-3)
    max_terms: int = Field(500, ge=16)
    quad_panels: int = Field(64, ge=8)

    # Series
    series_tol: float = Field(1e-12, gt=0)
    max_modes: int = Field(4000, ge=8)

    # Contour
    contour_radius: float = Field(1.3, gt=1)
    contour_delta: float = Field(0.1, gt=0)
    panels_circle: int = Field(96, ge=4)
    panels_ray: int = Field(48, ge=4)
    contour_tol: float = Field(1e-10, gt=0)

    # Asymptotics
    kmax: int = Field(2, ge=0, le=4)
    cauchy_nodes: int = Field(128, ge=16)
    cauchy_radius: float = Field(0.5, gt=0, lt=1)

    # Harness
    compare_tol: float = Field(1e-6, gt=0)
    images_tol: float = Field(1e-8, gt=0)
    small_x_slope_window: float = Field(0.2, gt=0)
    large_x_slope_window: float = Field(0.3, gt=0)
    contour_max_x: float = Field(30.0, gt=0)
    asymptotic_min_x: float = Field(40.0, gt=0)
    small_x_auto: float = Field(0.5, gt=0, lt=2)
    seed: int = 0

    class Config:
        """Pydantic config."""
        frozen = True
        extra = "ignore"

    def specfun_config(self) -> SpecFunConfig:
        return SpecFunConfig(
            rel_tol=self.rel_tol, max_terms=self.max_terms, quad_panels=self.quad_panels
        )

    def series_config(self) -> SeriesConfig:
        return SeriesConfig(
            tol=self.series_tol, max_modes=self.max_modes, specfun=self.specfun_config()
        )

    def contour_spec(self) -> ContourSpec:
        return ContourSpec(
            R=self.contour_radius,
            delta=self.contour_delta,
            panels_circle=self.panels_circle,
            panels_ray=self.panels_ray,
            tol=self.contour_tol,
        )


def normalize_key(key: str) -> str:
    """Map a flag-style key (``--x-min``, ``X_MIN``) onto a field name (``x_min``)."""
    return key.strip().lstrip("-").replace("-", "_").lower()


def read_config_file(path: Path) -> dict[str, str]:
    """
    Read a key=value config file.

    Args:
        path: Config file location

    Returns:
        Mapping of normalised keys to raw string values

    Raises:
        FileNotFoundError: If the file does not exist
    """
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    raw = dotenv_values(path)
    values = {normalize_key(k): v for k, v in raw.items() if v is not None}
    logger.debug("config_file_loaded", path=str(path), keys=sorted(values))
    return values


def read_environment(env_file: Optional[Path] = Path(".env")) -> dict[str, str]:
    """CONEKERNEL_* values from a .env file, overridden by the process environment."""
    raw: dict[str, Optional[str]] = {}
    if env_file is not None and env_file.exists():
        raw.update(dotenv_values(env_file))
    raw.update(os.environ)
    return {
        normalize_key(k[len(ENV_PREFIX) :]): v
        for k, v in raw.items()
        if v is not None and k.upper().startswith(ENV_PREFIX)
    }


def load_settings(
    config_values: Optional[dict[str, Any]] = None,
    env_file: Optional[Path] = Path(".env"),
    **overrides: Any,
) -> Settings:
    """
    Build Settings from the environment, config-file values and explicit overrides.

    Keys unknown to Settings are ignored here; the CLI consumes them as
    command defaults.
    """
    known = set(Settings.model_fields)
    merged: dict[str, Any] = {k: v for k, v in read_environment(env_file).items() if k in known}
    merged.update({k: v for k, v in (config_values or {}).items() if k in known})
    merged.update({k: v for k, v in overrides.items() if v is not None and k in known})
    return Settings(**merged)
