"""
Pydantic v2 models for the cone-kernel library.

Value types shared by every evaluator: the cone geometry, kernel queries and their
reduced variables, pole phases, evaluation results, and the frozen configuration
objects that steer the numerical methods.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

Sign = Literal[-1, 1]


def _require_finite(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


class Method(str, Enum):
    """Evaluation methods for S(x, eta)."""

    SERIES = "series"
    CONTOUR = "contour"
    SMALL_X = "small_x"
    UNIFORM = "uniform"
    PRELIMINARY = "preliminary"
    IMAGES = "images"


class ConeGeometry(BaseModel):
    """Flat cone over a circle of radius rho (total cone angle 2*pi*rho)."""

    rho: float = Field(..., gt=0, description="Cross-sectional radius of the cone")

    @field_validator("rho")
    @classmethod
    def validate_rho(cls, v: float) -> float:
        """rho must be finite."""
        return _require_finite(v)

    @property
    def period(self) -> float:
        """Angular period 2*pi*rho."""
        return 2.0 * math.pi * self.rho

    class Config:
        """Pydantic config."""
        frozen = True
        json_schema_extra = {"example": {"rho": 0.75}}


class KernelQuery(BaseModel):
    """Space-time point (t, r1, theta1, r2, theta2) at which the kernel is evaluated."""

    t: float = Field(..., gt=0, description="Time")
    r1: float = Field(..., gt=0, description="Radius of the first point")
    r2: float = Field(..., gt=0, description="Radius of the second point")
    theta1: float = Field(0.0, description="Angle of the first point (radians, mod 2*pi*rho)")
    theta2: float = Field(0.0, description="Angle of the second point (radians, mod 2*pi*rho)")

    @field_validator("t", "r1", "r2", "theta1", "theta2")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        """Reject NaN and infinities."""
        return _require_finite(v)

    class Config:
        """Pydantic config."""
        frozen = True
        json_schema_extra = {
            "example": {"t": 1.0, "r1": 2.0, "r2": 3.0, "theta1": 1.0, "theta2": 0.25}
        }


class ReducedArgs(BaseModel):
    """Dimensionless variables x = r1*r2/(2t) and eta = theta1 - theta2 (unreduced)."""

    x: float = Field(..., ge=0, description="r1*r2/(2t)")
    eta: float = Field(..., description="theta1 - theta2, not reduced modulo the period")

    class Config:
        """Pydantic config."""
        frozen = True


class PolePhase(BaseModel):
    """One pole phase phi = pi/2 + alpha*eta + 2*pi*rho*k in [-pi, pi)."""

    phi: float = Field(..., ge=-math.pi, lt=math.pi)
    k: int
    alpha: Sign
    sigma: Sign = Field(..., description="sgn(cos phi), +1 on the interface")
    on_interface: bool = Field(False, description="True when |cos phi| < 1e-14")

    class Config:
        """Pydantic config."""
        frozen = True


class PolePhaseSet(BaseModel):
    """The finite set of pole phases for one (eta, alpha) pair."""

    eta: float
    alpha: Sign
    rho: float = Field(..., gt=0)
    phases: list[PolePhase] = Field(default_factory=list)

    @property
    def on_interface(self) -> bool:
        """True if any phase sits on the interface."""
        return any(p.on_interface for p in self.phases)

    @property
    def angles(self) -> list[float]:
        return [p.phi for p in self.phases]

    def __len__(self) -> int:
        return len(self.phases)

    class Config:
        """Pydantic config."""
        frozen = True


class EvalResult(BaseModel):
    """A complex value with an a-posteriori absolute error estimate."""

    value: complex = Field(..., description="Computed value")
    abs_err: float = Field(..., ge=0, description="Absolute error estimate")
    method: Method = Field(..., description="Method that produced the value")
    rigorous: bool = Field(
        True, description="False when abs_err is a heuristic (asymptotic methods)"
    )

    @field_validator("value")
    @classmethod
    def validate_value(cls, v: complex) -> complex:
        """Value must be finite."""
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError("value must be finite")
        return v

    @field_validator("abs_err")
    @classmethod
    def validate_abs_err(cls, v: float) -> float:
        """Error estimate must be finite."""
        return _require_finite(v)

    class Config:
        """Pydantic config."""
        frozen = True
        json_schema_extra = {
            "example": {"value": "0.5403023+0.8414710j", "abs_err": 1e-13, "method": "series"}
        }


class SpecFunConfig(BaseModel):
    """Accuracy and work limits for the special functions."""

    rel_tol: float = Field(1e-12, gt=0, le=1e-3, description="Relative accuracy target")
    max_terms: int = Field(500, ge=16, description="Series term cap")
    quad_panels: int = Field(64, ge=8, description="Base panel count for integral representations")

    class Config:
        """Pydantic config."""
        frozen = True


class SeriesConfig(BaseModel):
    """Truncation controls for the Bessel-Fourier series."""

    tol: float = Field(1e-12, gt=0, description="Absolute tail tolerance")
    max_modes: int = Field(4000, ge=8, description="Cap on the mode index j")
    specfun: SpecFunConfig = Field(default_factory=SpecFunConfig)

    class Config:
        """Pydantic config."""
        frozen = True


class ContourSpec(BaseModel):
    """Realisation of the loop contour: circle of radius R joined to two rays."""

    R: float = Field(1.3, gt=1, description="Circle radius")
    delta: float = Field(0.1, gt=0, lt=math.pi / 4, description="Ray-junction half-angle")
    L: Optional[float] = Field(None, description="Ray truncation abscissa (computed when None)")
    panels_circle: int = Field(96, ge=4)
    panels_ray: int = Field(48, ge=4)
    tol: float = Field(1e-10, gt=0, description="Target absolute accuracy")
    margin: float = Field(0.02, gt=0, description="Minimum pole clearance")
    max_doublings: int = Field(4, ge=1)

    @model_validator(mode="after")
    def validate_truncation(self) -> "ContourSpec":
        """An explicit truncation abscissa must lie beyond the circle."""
        if self.L is not None and self.L <= self.R:
            raise ValueError(f"L={self.L} must exceed R={self.R}")
        return self

    class Config:
        """Pydantic config."""
        frozen = True


class BCoeffs(BaseModel):
    """Normalised even Taylor coefficients of the regular part B at s = 0."""

    alpha: Sign
    beta: Sign
    kmax: int = Field(..., ge=0, le=4)
    coeffs: list[complex] = Field(..., description="b-hat_{2k} for k = 0..kmax")
    radius: float = Field(..., gt=0, description="Cauchy extraction radius actually used")

    @field_validator("coeffs")
    @classmethod
    def validate_coeffs(cls, v: list[complex]) -> list[complex]:
        """Every coefficient must be finite."""
        for c in v:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError("non-finite Taylor coefficient")
        return v

    class Config:
        """Pydantic config."""
        frozen = True


class ExpansionBreakdown(BaseModel):
    """Kernel-level terms of the large-x expansion for one alpha."""

    alpha: Sign
    geometric: list[tuple[int, complex]] = Field(default_factory=list)
    erfc_front: list[tuple[int, complex]] = Field(default_factory=list)
    diffractive: list[tuple[int, complex]] = Field(default_factory=list)
    valid: bool = True

    def total(self) -> complex:
        """Sum of all labelled contributions."""
        return complex(
            sum(v for _, v in self.geometric)
            + sum(v for _, v in self.erfc_front)
            + sum(v for _, v in self.diffractive)
        )


class KernelBreakdown(BaseModel):
    """Both alpha breakdowns plus the prefactor used to build them."""

    prefactor: complex
    x: float
    eta: float
    s_value: complex = Field(..., description="S from the uniform expansion")
    abs_err: float = Field(..., ge=0)
    parts: list[ExpansionBreakdown]

    @property
    def valid(self) -> bool:
        return all(p.valid for p in self.parts)

    def recombine(self) -> complex:
        """Kernel value along the assemble_kernel arithmetic path."""
        return self.prefactor * self.s_value
