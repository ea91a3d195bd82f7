"""
Contour evaluation - S(x, eta) by quadrature of its loop integral.

    S(x, eta) = (1/4pi) * loop_C exp[(x/2)(v - 1/v)]
                * {cot[(pi/2 + eta + i log v)/2rho] + cot[(pi/2 - eta + i log v)/2rho]} dv/v

C starts at -infinity below the negative real axis, runs counterclockwise around
the unit circle and returns to -infinity above the axis. It is realised as the
arc v = R e^{i psi}, |psi| <= pi - delta, joined to the horizontal rays
v = -s -+ i R sin(delta), s in [R cos(delta), L]. The integrand is analytic on C,
so composite Gauss-Legendre panels converge spectrally; the only evaluator that
stays valid on the interface.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
import structlog

from .exceptions import AccuracyException, DomainException, GeometryException
from .kernel import pole_phases
from .models import ConeGeometry, ContourSpec, EvalResult, Method
from .quadrature import composite_gauss_legendre, graded_gauss_legendre
from .specfun import cot_cplx

logger = structlog.get_logger(__name__)

# Above this x the amplitude exp[(x/2)(R - 1/R)] starts eating the digits
CONTOUR_MAX_X = 30.0

_RADIUS_LADDER = (1.3, 1.45, 1.6)
_DELTA_LADDER = (0.1, 0.17, 0.23)
_EPS = float(np.finfo(float).eps)


def _amplitude(v: np.ndarray, x: float, eta: float, rho: float) -> np.ndarray:
    """exp[(x/2)(v - 1/v)] times the cotangent pair (the dv/v factor is applied by callers)."""
    ilog = 1j * np.log(v)
    pair = cot_cplx((0.5 * np.pi + eta + ilog) / (2.0 * rho)) + cot_cplx(
        (0.5 * np.pi - eta + ilog) / (2.0 * rho)
    )
    return np.exp(0.5 * x * (v - 1.0 / v)) * pair


def truncation_abscissa(x: float, spec: ContourSpec) -> float:
    """L = max(2R, (2/x) ln(10/tol)) unless spec.L is set."""
    if spec.L is not None:
        return spec.L
    return max(2.0 * spec.R, 2.0 / x * math.log(10.0 / spec.tol))


def pole_clearance(spec: ContourSpec, phases: list[float], L: float) -> float:
    """Smallest distance from the poles e^{i phi} to the arc and the two rays."""
    eps = spec.R * math.sin(spec.delta)
    s0 = spec.R * math.cos(spec.delta)
    arc_ends = (complex(-s0, -eps), complex(-s0, eps))
    best = math.inf
    for phi in phases:
        p = complex(math.cos(phi), math.sin(phi))
        if abs(phi) <= math.pi - spec.delta:
            best = min(best, spec.R - 1.0)
        else:
            best = min(best, min(abs(p - e) for e in arc_ends))
        s_star = min(max(-p.real, s0), L)
        for height in (-eps, eps):
            best = min(best, abs(p - complex(-s_star, height)))
    return best


def _candidate_specs(spec: ContourSpec) -> list[ContourSpec]:
    ladder = [spec]
    for R in _RADIUS_LADDER:
        for delta in _DELTA_LADDER:
            if (R, delta) != (spec.R, spec.delta):
                ladder.append(spec.model_copy(update={"R": R, "delta": delta}))
    return ladder


def clear_contour(x: float, eta: float, g: ConeGeometry, spec: ContourSpec) -> ContourSpec:
    """
    Return the first contour on the R/delta ladder that keeps every pole at least
    spec.margin away.

    Raises:
        GeometryException: If no candidate clears the poles
    """
    phases = pole_phases(g, eta, 1).angles + pole_phases(g, eta, -1).angles
    clearance = 0.0
    for attempt, chosen in enumerate(_candidate_specs(spec), start=1):
        clearance = pole_clearance(chosen, phases, truncation_abscissa(x, chosen))
        if clearance >= chosen.margin:
            return chosen
        logger.info("contour_rejected", attempt=attempt, R=chosen.R, delta=chosen.delta)
    raise GeometryException(
        f"no contour on the ladder clears the poles (last clearance {clearance:.3g})"
    )


def _loop_integral(
    x: float, eta: float, rho: float, spec: ContourSpec, level: int
) -> tuple[complex, float]:
    """One quadrature level; returns (value, rounding scale)."""
    R, delta = spec.R, spec.delta
    eps = R * math.sin(delta)
    s0 = R * math.cos(delta)
    L = truncation_abscissa(x, spec)
    scale = 2**level

    psi, w_arc = composite_gauss_legendre(
        -math.pi + delta, math.pi - delta, spec.panels_circle * scale
    )
    v_arc = R * np.exp(1j * psi)
    f_arc = _amplitude(v_arc, x, eta, rho) * 1j  # dv/v = i dpsi
    arc = np.dot(w_arc, f_arc)

    s, w_ray = graded_gauss_legendre(s0, L, spec.panels_ray * scale)
    v_low = -s - 1j * eps
    v_up = -s + 1j * eps
    f_low = _amplitude(v_low, x, eta, rho) / v_low
    f_up = _amplitude(v_up, x, eta, rho) / v_up
    rays = np.dot(w_ray, f_low - f_up)

    magnitude = float(np.dot(w_arc, np.abs(f_arc)))
    magnitude += float(np.dot(w_ray, np.abs(f_low) + np.abs(f_up)))
    return complex(arc + rays) / (4.0 * math.pi), magnitude * _EPS / (4.0 * math.pi)


def s_contour(
    x: float, eta: float, g: ConeGeometry, spec: Optional[ContourSpec] = None
) -> EvalResult:
    """
    Evaluate S(x, eta) by numerical quadrature of the loop integral.

    Panel counts are doubled until two successive levels agree to spec.tol
    (at most spec.max_doublings times); abs_err is the last level difference
    plus a rounding estimate.

    Args:
        x: r1*r2/(2t), x > 0
        eta: theta1 - theta2
        g: Cone geometry
        spec: Contour realisation and accuracy target

    Returns:
        EvalResult tagged contour

    Raises:
        DomainException: If x <= 0 or an argument is non-finite
        GeometryException: If no contour on the ladder clears the poles
        AccuracyException: If the quadrature does not converge
    """
    spec = spec or ContourSpec()
    if not (math.isfinite(x) and math.isfinite(eta)):
        raise DomainException(f"s_contour: non-finite argument x={x}, eta={eta}")
    if x <= 0:
        raise DomainException(f"s_contour: x must be positive, got {x}")
    if x > CONTOUR_MAX_X:
        logger.warning("contour_beyond_ceiling", x=x, ceiling=CONTOUR_MAX_X)

    spec = clear_contour(x, eta, g, spec)
    previous, _ = _loop_integral(x, eta, g.rho, spec, 0)
    for level in range(1, spec.max_doublings + 1):
        current, rounding = _loop_integral(x, eta, g.rho, spec, level)
        diff = abs(current - previous)
        if diff <= spec.tol:
            return EvalResult(value=current, abs_err=diff + rounding, method=Method.CONTOUR)
        previous = current
    raise AccuracyException(
        f"s_contour: no convergence after {spec.max_doublings} doublings at x={x}, eta={eta}",
        best_estimate=current,
        abs_err=diff,
    )
