"""
Special functions for the cone kernel.

Self-contained double-precision evaluation of:
- Bessel J and I of real order >= 0 and real argument >= 0
- the complementary error function of a complex argument
- the gamma function (and its logarithm) of a positive real argument

The orders j/rho are not unit spaced, so each order is evaluated on its own:
the power series where it is well conditioned, downward recurrence at fixed
fractional order when the order exceeds the argument, otherwise the
real-integral (Schlafli) representation on composite Gauss-Legendre panels.
I_nu uses its positive-term series throughout.
"""

from __future__ import annotations

import cmath
import math
from typing import Callable, Optional

import numpy as np
import structlog

from .exceptions import AccuracyException, DomainException
from .models import SpecFunConfig
from .quadrature import composite_gauss_legendre

logger = structlog.get_logger(__name__)

SQRT_PI = math.sqrt(math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Lanczos approximation, g = 7, nine coefficients
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Above this argument Gamma overflows a double
_GAMMA_OVERFLOW = 171.6

_DEFAULT_CONFIG = SpecFunConfig()


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainException(f"{name}: non-finite argument {v!r}")


def _lanczos_sum(z: float) -> float:
    acc = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        acc += _LANCZOS_COEFFS[i] / (z + i)
    return acc


# ============================================
# Gamma
# ============================================

def log_gamma_pos(x: float) -> float:
    """
    Natural logarithm of Gamma(x) for x > 0.

    Raises:
        DomainException: If x is non-finite or not positive
    """
    _require_finite("log_gamma_pos", x)
    if x <= 0:
        raise DomainException(f"log_gamma_pos: x must be positive, got {x}")
    if x < 0.5:
        return log_gamma_pos(x + 1.0) - math.log(x)
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def gamma_pos(x: float) -> float:
    """
    Gamma(x) for x > 0 to about 1e-15 relative accuracy.

    Raises:
        DomainException: If x <= 0, non-finite, or Gamma(x) overflows
    """
    _require_finite("gamma_pos", x)
    if x <= 0:
        raise DomainException(f"gamma_pos: x must be positive, got {x}")
    if x > _GAMMA_OVERFLOW:
        raise DomainException(f"gamma_pos: Gamma({x}) overflows double precision")
    if x < 0.5:
        return gamma_pos(x + 1.0) / x
    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z+0.5) cannot overflow before exp(-t) is applied
    p = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * _lanczos_sum(z) * (p * math.exp(-t)) * p


# ============================================
# Shared quadrature driver
# ============================================

def _refined_quadrature(
    rule: Callable[[int], float],
    panels: int,
    what: str,
    tol: Callable[[float], float],
    max_doublings: int = 4,
) -> float:
    """Evaluate rule(panels), doubling until two levels agree to tol(value)."""
    previous = rule(panels)
    for _ in range(max_doublings):
        panels *= 2
        current = rule(panels)
        if abs(current - previous) <= tol(current):
            return current
        previous = current
    raise AccuracyException(
        f"{what}: quadrature did not converge with {panels} panels",
        best_estimate=previous,
        abs_err=abs(current - previous),
    )


def _semi_infinite_tail(x: float, nu: float, rel_tol: float) -> float:
    """Integral over t in [0, inf) of exp(-x*sinh(t) - nu*t)."""
    budget = math.log(1.0 / rel_tol) + math.log(1.0 / x + 1.0)
    # x*sinh(t) + nu*t = budget has its root below asinh(budget/x)
    t_max = math.asinh(budget / x)
    panels = max(8, math.ceil((x + nu) * t_max / 4.0))

    def rule(n: int) -> float:
        t, w = composite_gauss_legendre(0.0, t_max, n)
        return float(np.dot(w, np.exp(-x * np.sinh(t) - nu * t)))

    return _refined_quadrature(
        rule, panels, "bessel tail", lambda v: rel_tol * max(abs(v), 1e-300)
    )


def _series_well_conditioned(nu: float, x: float) -> bool:
    """The J series loses about exp(x^2/2(nu+1)) to cancellation; accept up to e^4."""
    return x <= 12.0 or x * x <= 8.0 * (nu + 1.0)


# ============================================
# Bessel J
# ============================================

def _bessel_j_series(nu: float, x: float, cfg: SpecFunConfig) -> float:
    half = 0.5 * x
    log_lead = nu * math.log(half) - log_gamma_pos(nu + 1.0)
    if log_lead < -745.0:
        return 0.0
    term = math.exp(log_lead)
    total = term
    q = half * half
    for j in range(1, cfg.max_terms + 1):
        term *= -q / (j * (nu + j))
        total += term
        if j * (nu + j) > q and abs(term) <= 0.1 * cfg.rel_tol * abs(total):
            return total
    raise AccuracyException(
        f"bessel_j series: no convergence in {cfg.max_terms} terms (nu={nu}, x={x})",
        best_estimate=total,
        abs_err=abs(term),
    )


def _bessel_j_integral(nu: float, x: float, cfg: SpecFunConfig) -> float:
    def rule(n: int) -> float:
        theta, w = composite_gauss_legendre(0.0, math.pi, n)
        return float(np.dot(w, np.cos(x * np.sin(theta) - nu * theta))) / math.pi

    panels = max(cfg.quad_panels, math.ceil(0.25 * (x + nu)))
    value = _refined_quadrature(
        rule, panels, "bessel_j", lambda v: cfg.rel_tol * max(1.0, abs(v))
    )
    s = math.sin(nu * math.pi)
    if s != 0.0 and nu != math.floor(nu):
        value -= s / math.pi * _semi_infinite_tail(x, nu, cfg.rel_tol)
    return value


def _log_j_ratio(nu: float, steps: int, x: float, extra: int) -> float:
    """
    log(J_nu(x) / J_{nu-steps}(x)) from the backward ratio recurrence
    r_k = 1 / (2k/x - r_{k+1}), started at order nu + extra with r = 0.
    """
    r = 0.0
    log_ratio = 0.0
    for i in range(extra, -steps, -1):
        k = nu + i
        r = 1.0 / (2.0 * k / x - r)
        if i <= 0:
            log_ratio += math.log(r)
    return log_ratio


def _bessel_j_downward(nu: float, x: float, cfg: SpecFunConfig) -> float:
    """
    J_nu(x) for nu > x + 1 by downward recurrence at fixed fractional order.

    The anchor order mu = nu - m lies in [x, x + 1), below the first zero of J_mu,
    so J_mu(x) is positive and of size x^(-1/3). Every ratio J_k/J_{k-1} with
    k > x is in (0, 1) and the recurrence is stable in the downward direction.
    """
    steps = math.floor(nu - x)
    mu = nu - steps
    anchor = _bessel_j_series(mu, x, cfg) if _series_well_conditioned(mu, x) else (
        _bessel_j_integral(mu, x, cfg)
    )
    extra = max(16, math.ceil(x))
    previous = _log_j_ratio(nu, steps, x, extra)
    for _ in range(6):
        extra *= 2
        current = _log_j_ratio(nu, steps, x, extra)
        if abs(current - previous) <= 0.1 * cfg.rel_tol:
            log_value = math.log(anchor) + current
            return math.exp(log_value) if log_value > -745.0 else 0.0
        previous = current
    best = anchor * math.exp(max(previous, -745.0))
    raise AccuracyException(
        f"bessel_j recurrence: ratios did not settle (nu={nu}, x={x})",
        best_estimate=best,
        abs_err=abs(best) * abs(current - previous),
    )


def bessel_j(nu: float, x: float, cfg: Optional[SpecFunConfig] = None) -> float:
    """
    Bessel function of the first kind J_nu(x) for real nu >= 0, x >= 0.

    Routing: the power series where its cancellation is mild, downward
    recurrence anchored near order x when nu > x + 1, and the real-integral
    representation in the oscillatory region.

    Args:
        nu: Order
        x: Argument
        cfg: Accuracy configuration

    Returns:
        J_nu(x)

    Raises:
        DomainException: If an argument is non-finite or negative
        AccuracyException: If the tolerance is not met within the work limits
    """
    cfg = cfg or _DEFAULT_CONFIG
    _require_finite("bessel_j", nu, x)
    if nu < 0 or x < 0:
        raise DomainException(f"bessel_j: need nu >= 0 and x >= 0, got nu={nu}, x={x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    if _series_well_conditioned(nu, x):
        return _bessel_j_series(nu, x, cfg)
    if nu >= x + 1.0:
        return _bessel_j_downward(nu, x, cfg)
    return _bessel_j_integral(nu, x, cfg)


# ============================================
# Bessel I
# ============================================

_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


def _bessel_i_scaled_series(nu: float, x: float, cfg: SpecFunConfig) -> float:
    """
    exp(-x) * I_nu(x) from the power series.

    Every term is positive, so the series is accurate for any x; the sum is
    carried with a running log scale so that neither exp(-x) nor the peak term
    under- or overflows. It needs about x/2 + O(sqrt(x)) terms.
    """
    half = 0.5 * x
    log_lead = nu * math.log(half) - log_gamma_pos(nu + 1.0) - x
    term = 1.0
    total = 1.0
    log_scale = 0.0
    q = half * half
    limit = cfg.max_terms + math.ceil(x)
    for j in range(1, limit + 1):
        term *= q / (j * (nu + j))
        total += term
        if total > _RESCALE:
            term /= _RESCALE
            total /= _RESCALE
            log_scale += _LOG_RESCALE
        if j * (nu + j) > q and term <= 0.1 * cfg.rel_tol * total:
            log_value = log_lead + log_scale + math.log(total)
            return math.exp(log_value) if log_value > -745.0 else 0.0
    raise AccuracyException(
        f"bessel_i series: no convergence in {limit} terms (nu={nu}, x={x})",
        best_estimate=math.exp(min(log_lead + log_scale + math.log(total), 709.0)),
        abs_err=term,
    )


def bessel_i_scaled(nu: float, x: float, cfg: Optional[SpecFunConfig] = None) -> float:
    """Exponentially scaled modified Bessel function exp(-x) * I_nu(x)."""
    cfg = cfg or _DEFAULT_CONFIG
    _require_finite("bessel_i", nu, x)
    if nu < 0 or x < 0:
        raise DomainException(f"bessel_i: need nu >= 0 and x >= 0, got nu={nu}, x={x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    return _bessel_i_scaled_series(nu, x, cfg)


def bessel_i(nu: float, x: float, cfg: Optional[SpecFunConfig] = None) -> float:
    """
    Modified Bessel function of the first kind I_nu(x) for real nu >= 0, x >= 0.

    Raises:
        DomainException: If an argument is invalid or I_nu(x) overflows
        AccuracyException: If the tolerance is not met within the work limits
    """
    scaled = bessel_i_scaled(nu, x, cfg)
    if scaled > 0.0 and x + math.log(scaled) > 709.0:
        raise DomainException(f"bessel_i: I_{nu}({x}) overflows; use bessel_i_scaled")
    if x > 700.0:
        return math.exp(x + math.log(scaled)) if scaled > 0.0 else 0.0
    return math.exp(x) * scaled


# ============================================
# Complementary error function
# ============================================

def _erf_series(z: complex, cfg: SpecFunConfig) -> complex:
    z2 = z * z
    term = z
    total = z
    for n in range(1, cfg.max_terms + 1):
        term *= -z2 / n
        contrib = term / (2 * n + 1)
        total += contrib
        if n > abs(z2) and abs(contrib) <= 1e-3 * cfg.rel_tol * max(1.0, abs(total)):
            return 2.0 / SQRT_PI * total
    raise AccuracyException(
        f"erfc series: no convergence in {cfg.max_terms} terms at z={z}",
        best_estimate=1.0 - 2.0 / SQRT_PI * total,
    )


def _erfc_continued_fraction(z: complex, cfg: SpecFunConfig) -> complex:
    # modified Lentz on z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))
    tiny = 1e-300
    f = z
    c = f
    d = 0j
    for n in range(1, 10 * cfg.max_terms + 1):
        a = 0.5 * n
        d = z + a * d
        if d == 0:
            d = tiny
        c = z + a / c
        if c == 0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) <= 1e-2 * cfg.rel_tol:
            return cmath.exp(-z * z) / (SQRT_PI * f)
    raise AccuracyException(
        f"erfc continued fraction: no convergence at z={z}",
        best_estimate=cmath.exp(-z * z) / (SQRT_PI * f),
    )


def erfc_cplx(z: complex, cfg: Optional[SpecFunConfig] = None) -> complex:
    """
    Complementary error function of a complex argument.

    The right half-plane is covered by the Taylor series of erf near the origin and
    by the Laplace continued fraction of exp(z^2)*erfc(z) further out; the left
    half-plane follows from erfc(-z) = 2 - erfc(z).

    Raises:
        DomainException: If z is non-finite or erfc(z) overflows
        AccuracyException: If the tolerance is not met within the work limits
    """
    cfg = cfg or _DEFAULT_CONFIG
    z = complex(z)
    _require_finite("erfc_cplx", z.real, z.imag)
    if z.real < 0:
        return 2.0 - erfc_cplx(-z, cfg)
    if z.real >= 1.5 or abs(z) >= 6.0:
        value = _erfc_continued_fraction(z, cfg)
    else:
        value = 1.0 - _erf_series(z, cfg)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise DomainException(f"erfc_cplx: erfc({z}) overflows double precision")
    return value


def erfc_asymptotic(z: complex, terms: int = 1) -> complex:
    """
    Leading terms of the large-|z| expansion of erfc, valid for |arg z| < 3*pi/4:
    exp(-z^2)/(sqrt(pi) z) * sum_k (-1)^k (2k)! / (k! (2z)^(2k)).
    """
    z = complex(z)
    if z == 0:
        raise DomainException("erfc_asymptotic: z must be non-zero")
    inv = 1.0 / (2.0 * z * z)
    coeff = 1.0 + 0j
    total = coeff
    for k in range(1, terms):
        coeff *= -(2 * k - 1) * inv
        total += coeff
    return cmath.exp(-z * z) / (SQRT_PI * z) * total


# ============================================
# Cotangent
# ============================================

def cot_cplx(z: np.ndarray) -> np.ndarray:
    """
    Elementwise complex cotangent that cannot overflow for large |Im z|.

    Uses cot(z) = i(w + 1)/(w - 1) with w = exp(2iz) on the upper half-plane and
    cot(-z) = -cot(z) below it, so |w| <= 1 always.
    """
    z = np.asarray(z, dtype=complex)
    sign = np.where(z.imag >= 0, 1.0, -1.0)
    w = np.exp(2j * (sign * z))
    return sign * 1j * (w + 1.0) / (w - 1.0)
