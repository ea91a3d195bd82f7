"""
Kernel core - cone geometry, reduced variables, pole phases and kernel assembly.

The Schrodinger kernel on the cone factors as prefactor(q) * S(x, eta) with
x = r1*r2/(2t) and eta = theta1 - theta2. Everything in this module is exact
arithmetic on those quantities; the evaluators of S live elsewhere.
"""

from __future__ import annotations

import cmath
import math

from .exceptions import DomainException
from .models import (
    ConeGeometry,
    EvalResult,
    KernelQuery,
    PolePhase,
    PolePhaseSet,
    ReducedArgs,
    Sign,
)

# |cos(phi)| below this marks a pole phase on the interface
INTERFACE_GUARD = 1e-14


def reduce(q: KernelQuery, g: ConeGeometry) -> ReducedArgs:
    """Reduced variables x = r1*r2/(2t), eta = theta1 - theta2 (eta left unreduced)."""
    return ReducedArgs(x=q.r1 * q.r2 / (2.0 * q.t), eta=q.theta1 - q.theta2)


def prefactor(q: KernelQuery, g: ConeGeometry) -> complex:
    """
    The factor -exp[(r1^2 + r2^2)/(4it)] / (4*pi*i*rho*t) multiplying S(x, eta).

    Raises:
        DomainException: If t is not positive
    """
    if not q.t > 0:
        raise DomainException(f"prefactor: t must be positive, got {q.t}")
    phase = cmath.exp(-1j * (q.r1 * q.r1 + q.r2 * q.r2) / (4.0 * q.t))
    return -phase / (4j * math.pi * g.rho * q.t)


def pole_phases(g: ConeGeometry, eta: float, alpha: Sign) -> PolePhaseSet:
    """
    Enumerate the pole phases phi = pi/2 + alpha*eta + 2*pi*rho*k lying in [-pi, pi).

    Args:
        g: Cone geometry
        eta: Angle difference (any real; reduction happens here)
        alpha: Sign selecting which cotangent summand

    Returns:
        PolePhaseSet sorted by phi, each phase carrying k and sigma = sgn(cos phi)
    """
    base = 0.5 * math.pi + alpha * eta
    period = g.period
    k_lo = math.ceil((-math.pi - base) / period) - 1
    k_hi = math.floor((math.pi - base) / period) + 1

    phases = []
    for k in range(k_lo, k_hi + 1):
        phi = base + period * k
        if not (-math.pi <= phi < math.pi):
            continue
        c = math.cos(phi)
        on_interface = abs(c) < INTERFACE_GUARD
        sigma = 1 if (on_interface or c > 0) else -1
        phases.append(
            PolePhase(phi=phi, k=k, alpha=alpha, sigma=sigma, on_interface=on_interface)
        )

    phases.sort(key=lambda p: p.phi)
    return PolePhaseSet(eta=eta, alpha=alpha, rho=g.rho, phases=phases)


def interface_distance(eta: float, g: ConeGeometry) -> float:
    """Distance from eta to the excluded set {-pi, 0, pi} + 2*pi*rho*Z."""
    period = g.period
    best = math.inf
    for v in (-math.pi, 0.0, math.pi):
        r = (eta - v) % period
        best = min(best, r, period - r)
    return best


def is_on_interface(eta: float, g: ConeGeometry) -> bool:
    """True when a pole phase of either alpha sits on the interface."""
    return any(pole_phases(g, eta, alpha).on_interface for alpha in (1, -1))


def canonical_eta(eta: float, g: ConeGeometry) -> float:
    """Representative of eta in [-pi*rho, pi*rho), used for reporting only."""
    half = math.pi * g.rho
    return (eta + half) % g.period - half


def assemble_kernel(S: EvalResult, q: KernelQuery, g: ConeGeometry) -> EvalResult:
    """Kernel value prefactor(q, g) * S with the error estimate scaled alike."""
    pf = prefactor(q, g)
    return EvalResult(
        value=pf * S.value,
        abs_err=abs(pf) * S.abs_err,
        method=S.method,
        rigorous=S.rigorous,
    )


def time_reversed(K: EvalResult) -> EvalResult:
    """K(-t) from K(t) by complex conjugation (a convention, used for negative times)."""
    return EvalResult(
        value=K.value.conjugate(), abs_err=K.abs_err, method=K.method, rigorous=K.rigorous
    )
