"""
Series evaluation - the Bessel-Fourier series for S(x, eta) and the heat kernel.

This is the slow but reliable reference evaluator:

    S(x, eta) = J_0(x) + 2 * sum_{j>=1} i^{j/rho} J_{j/rho}(x) cos(j*eta/rho)

The series is truncated at the first mode past which the envelope
(x/2)^nu / Gamma(nu+1) of |J_nu(x)| sums below the tolerance.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
import structlog

from .exceptions import AccuracyException, DomainException
from .kernel import reduce
from .models import ConeGeometry, EvalResult, KernelQuery, Method, SeriesConfig
from .specfun import bessel_i_scaled, bessel_j, log_gamma_pos

logger = structlog.get_logger(__name__)

# Above this x the series needs O(x/rho) Bessel evaluations
EXPENSIVE_X = 50.0

_EPS = float(np.finfo(float).eps)


def _log_envelope(nu: float, x: float) -> float:
    """log of (x/2)^nu / Gamma(nu+1)."""
    return nu * math.log(0.5 * x) - log_gamma_pos(nu + 1.0)


def tail_bound(x: float, rho: float, j: int, log_excess: Callable[[float], float]) -> float:
    """
    Bound on 2 * sum_{j' > j} envelope(j'/rho) via the geometric majorant.

    The envelope is log-concave in nu, so consecutive ratios decrease and the tail
    past j+1 is dominated by a geometric series with the ratio at j+1.
    log_excess(nu) adds a non-increasing correction (zero for J, the
    exp(x^2/(4(nu+1)) - x) factor for the scaled I).
    """
    if x == 0.0:
        return 0.0
    nu1 = (j + 1) / rho
    nu2 = (j + 2) / rho
    log_m1 = _log_envelope(nu1, x)
    ratio = math.exp(_log_envelope(nu2, x) - log_m1)
    if ratio >= 1.0:
        return math.inf
    return 2.0 * math.exp(log_m1 + log_excess(nu1)) / (1.0 - ratio)


def _past_envelope_peak(nu: float, x: float) -> bool:
    if nu <= x:
        return False
    return x < 2.0 or nu > math.e * x / 2.0


@lru_cache(maxsize=512)
def _mode_table(
    x: float, rho: float, cfg: SeriesConfig, kind: str
) -> tuple[tuple[float, ...], float, bool]:
    """
    Bessel values for orders j/rho, j = 0..J*, together with the tail bound.

    Returns:
        (values, tail, converged); converged is False when max_modes was hit first
    """
    if kind == "j":
        evaluate: Callable[[float], float] = lambda nu: bessel_j(nu, x, cfg.specfun)
        log_excess: Callable[[float], float] = lambda nu: 0.0
    else:
        evaluate = lambda nu: bessel_i_scaled(nu, x, cfg.specfun)
        log_excess = lambda nu: x * x / (4.0 * (nu + 1.0)) - x

    values = [evaluate(0.0)]
    tail = math.inf
    for j in range(1, cfg.max_modes + 1):
        nu = j / rho
        values.append(evaluate(nu))
        if _past_envelope_peak(nu, x):
            tail = tail_bound(x, rho, j, log_excess)
            if tail <= cfg.tol:
                return tuple(values), tail, True
    return tuple(values), tail, False


def _cosine_sum(
    values: tuple[float, ...], eta: float, rho: float, twisted: bool
) -> tuple[complex, float]:
    b = np.asarray(values)
    j = np.arange(1, len(b))
    weights = 2.0 * np.cos(j * eta / rho)
    if twisted:
        weights = weights * np.exp(0.5j * np.pi * j / rho)
    total = complex(b[0] + np.sum(weights * b[1:]))
    rounding = 8.0 * _EPS * (1.0 + 2.0 * float(np.sum(np.abs(b))))
    return total, rounding


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainException(f"{name}: non-finite argument {v!r}")


def s_series(
    x: float, eta: float, g: ConeGeometry, cfg: Optional[SeriesConfig] = None
) -> EvalResult:
    """
    Evaluate S(x, eta) by the truncated Bessel-Fourier series.

    Args:
        x: r1*r2/(2t), x >= 0
        eta: theta1 - theta2
        g: Cone geometry
        cfg: Truncation controls

    Returns:
        EvalResult with abs_err = tail bound + rounding estimate

    Raises:
        DomainException: If x < 0 or an argument is non-finite
        AccuracyException: If the truncation index exceeds max_modes
    """
    cfg = cfg or SeriesConfig()
    _require_finite("s_series", x, eta)
    if x < 0:
        raise DomainException(f"s_series: x must be >= 0, got {x}")
    if x == 0.0:
        return EvalResult(value=1.0, abs_err=0.0, method=Method.SERIES)
    if x > EXPENSIVE_X:
        logger.info("series_expensive", x=x, rho=g.rho)

    values, tail, converged = _mode_table(x, g.rho, cfg, "j")
    total, rounding = _cosine_sum(values, eta, g.rho, twisted=True)
    if not converged:
        raise AccuracyException(
            f"s_series: truncation index exceeds max_modes={cfg.max_modes} at x={x}",
            best_estimate=total,
            abs_err=tail,
        )
    return EvalResult(value=total, abs_err=tail + rounding, method=Method.SERIES)


def heat_kernel(
    s: float, q: KernelQuery, g: ConeGeometry, cfg: Optional[SeriesConfig] = None
) -> EvalResult:
    """
    Heat kernel of the cone at time s from Weber's integral:

        K = (1/(2*pi*rho)) * sum_j exp(-(r1^2+r2^2)/4s)/(2s) * I_{|j|/rho}(r1 r2/2s) e^{ij eta/rho}

    The Gaussian factor is folded into exponentially scaled I so that large
    r1*r2/s cannot overflow. The query's t is ignored; s is the heat time.

    Raises:
        DomainException: If s is not positive
        AccuracyException: If the truncation index exceeds max_modes
    """
    cfg = cfg or SeriesConfig()
    _require_finite("heat_kernel", s)
    if s <= 0:
        raise DomainException(f"heat_kernel: s must be positive, got {s}")
    x = q.r1 * q.r2 / (2.0 * s)
    eta = reduce(q, g).eta
    gauss = math.exp(-((q.r1 - q.r2) ** 2) / (4.0 * s)) / (2.0 * s)
    scale = gauss / (2.0 * math.pi * g.rho)

    values, tail, converged = _mode_table(x, g.rho, cfg, "i_scaled")
    total, rounding = _cosine_sum(values, eta, g.rho, twisted=False)
    if not converged:
        raise AccuracyException(
            f"heat_kernel: truncation index exceeds max_modes={cfg.max_modes} at x={x}",
            best_estimate=scale * total.real,
            abs_err=scale * tail,
        )
    return EvalResult(
        value=complex(scale * total.real, 0.0),
        abs_err=scale * (tail + rounding),
        method=Method.SERIES,
    )


def heat_images_closed_form(s: float, q: KernelQuery, N: int) -> float:
    """Gaussian images sum (1/4 pi s) sum_{j<N} exp(-|z1 - R^j z2|^2 / 4s) for rho = 1/N."""
    if N < 1:
        raise DomainException(f"heat_images_closed_form: N must be >= 1, got {N}")
    eta = q.theta1 - q.theta2
    total = 0.0
    for j in range(N):
        d2 = q.r1**2 + q.r2**2 - 2.0 * q.r1 * q.r2 * math.cos(eta - 2.0 * math.pi * j / N)
        total += math.exp(-d2 / (4.0 * s))
    return total / (4.0 * math.pi * s)
