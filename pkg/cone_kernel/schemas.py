"""
Pydantic models for harness grids and reports.

Reports serialise deterministically: sorted keys and floats in shortest
round-trip form.
"""

from __future__ import annotations

import json
import math
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .kernel import canonical_eta
from .models import ConeGeometry, EvalResult

SCHEMA_VERSION = "1"


class GridSpec(BaseModel):
    """Evaluation grid: cone radii, an x range and eta samples over one period."""

    rho_list: list[float] = Field(default_factory=lambda: [1.0], min_length=1)
    x_min: float = Field(0.5, ge=0, description="Smallest x")
    x_max: float = Field(20.0, gt=0, description="Largest x")
    x_count: int = Field(16, ge=2, description="Number of x samples")
    x_spacing: Literal["log", "linear"] = "log"
    eta_count: int = Field(16, ge=2, description="eta samples per period 2*pi*rho")
    include_interface: bool = Field(False, description="Also sample eta on the interface")

    @field_validator("rho_list")
    @classmethod
    def validate_rho_list(cls, v: list[float]) -> list[float]:
        """Every rho must be positive and finite."""
        for rho in v:
            if not (math.isfinite(rho) and rho > 0):
                raise ValueError(f"rho must be positive and finite, got {rho}")
        return v

    @model_validator(mode="after")
    def validate_range(self) -> "GridSpec":
        """0 < x_min < x_max for log spacing; 0 <= x_min < x_max for linear."""
        if self.x_min >= self.x_max:
            raise ValueError(f"x_min={self.x_min} must be below x_max={self.x_max}")
        if self.x_spacing == "log" and self.x_min <= 0:
            raise ValueError("log spacing needs x_min > 0")
        return self

    def x_values(self) -> list[float]:
        if self.x_spacing == "log":
            xs = np.geomspace(self.x_min, self.x_max, self.x_count)
        else:
            xs = np.linspace(self.x_min, self.x_max, self.x_count)
        return [float(x) for x in xs]

    def eta_values(self, g: ConeGeometry) -> list[float]:
        """Cell midpoints -pi*rho + 2*pi*rho*(m + 1/2)/n, plus interface points on request."""
        period = g.period
        n = self.eta_count
        etas = [-0.5 * period + period * (m + 0.5) / n for m in range(n)]
        if self.include_interface:
            exact: dict[float, float] = {}
            for v in (-math.pi, 0.0, math.pi):
                eta = canonical_eta(v, g)
                exact.setdefault(round(eta, 12), eta)
            etas.extend(exact[key] for key in sorted(exact))
        return etas

    class Config:
        """Pydantic config."""
        frozen = True
        extra = "forbid"
        json_schema_extra = {
            "example": {
                "rho_list": [1.0, 0.5],
                "x_min": 0.5,
                "x_max": 20.0,
                "x_count": 16,
                "eta_count": 16,
            }
        }


class MethodValue(BaseModel):
    """One method's value at a grid point."""

    method: str
    re: float
    im: float
    abs_err: float
    rigorous: bool = True

    @classmethod
    def from_result(cls, result: EvalResult, label: Optional[str] = None) -> "MethodValue":
        return cls(
            method=label or result.method.value,
            re=result.value.real,
            im=result.value.imag,
            abs_err=result.abs_err,
            rigorous=result.rigorous,
        )

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


class PairDiff(BaseModel):
    """|a - b| against the allowance tol + abs_err(a) + abs_err(b)."""

    a: str
    b: str
    diff: float
    allowed: float
    passed: bool


class PointRecord(BaseModel):
    """Everything evaluated at one (rho, x, eta)."""

    rho: float
    x: float
    eta: float
    valid_methods: list[str] = Field(default_factory=list, description="Provenance")
    values: list[MethodValue] = Field(default_factory=list)
    diffs: list[PairDiff] = Field(default_factory=list)
    errors: dict[str, str] = Field(default_factory=dict, description="Method -> failure")
    passed: bool = True


class SlopeFit(BaseModel):
    """Least-squares slope of log|error| against log x."""

    mode: Literal["small_x", "large_x"]
    target: float
    window: float
    slope: Optional[float] = None
    residual: Optional[float] = None
    verdict: Literal["pass", "fail", "inconclusive"] = "inconclusive"
    x: list[float] = Field(default_factory=list)
    errors: list[float] = Field(default_factory=list)


class Report(BaseModel):
    """Harness output shared by every command."""

    schema_version: str = SCHEMA_VERSION
    kind: str
    passed: bool
    parameters: dict[str, Any] = Field(default_factory=dict)
    summary: dict[str, Any] = Field(default_factory=dict)
    records: list[PointRecord] = Field(default_factory=list)
    fits: list[SlopeFit] = Field(default_factory=list)

    def to_json(self) -> str:
        """Deterministic JSON text."""
        return json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True)
