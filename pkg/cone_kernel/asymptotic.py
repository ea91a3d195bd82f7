"""
Asymptotic evaluation of S(x, eta).

Small x:
    S = 1 + O(x^sigma), sigma = min(2, 1/rho), with an explicit majorant.

Large x, one cotangent summand S_alpha at a time. Near each saddle v = beta*i the loop
integral is written in the steepest-descent variable s, (x/2)(v - 1/v) = x(beta*i - s^2),
where the amplitude becomes

    A(s) = cot[(pi/2 + alpha*eta + i log w(s)) / 2rho] / q(s),
    q(s) = (s^2 - 2 beta i)^(1/2),  w(s) = beta*i - s^2 + s*q(s).

Every pole e^{i phi} of the cotangent sits at s_phi = sigma (beta*i - i sin phi)^(1/2)
with residue i*rho. Subtracting those poles leaves a regular part B whose even Taylor
coefficients give the diffractive x^{-(2k+1)/2} terms; the poles themselves give the
geometric front and its complementary-error-function transition.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache
from typing import Optional

import numpy as np
import structlog

from .exceptions import DomainException, GeometryException, ValidityException
from .kernel import interface_distance, is_on_interface, pole_phases, prefactor, reduce
from .models import (
    BCoeffs,
    ConeGeometry,
    EvalResult,
    ExpansionBreakdown,
    KernelBreakdown,
    KernelQuery,
    Method,
    PolePhaseSet,
    Sign,
)
from .quadrature import circle_angles
from .specfun import cot_cplx, erfc_cplx, gamma_pos, log_gamma_pos

logger = structlog.get_logger(__name__)

# Taylor coefficients past b_8 are refused
MAX_KMAX = 4
CAUCHY_NODES = 128
CAUCHY_RADIUS = 0.5
# Cauchy circles smaller than this cannot resolve B
MIN_CAUCHY_RADIUS = 1e-3
# Preliminary expansion needs eta at least this far from the interface
PRELIMINARY_MIN_DISTANCE = 0.2

_SIGNS: tuple[Sign, Sign] = (1, -1)


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise DomainException(f"{name}: non-finite argument {v!r}")


def _require_off_interface(name: str, eta: float, g: ConeGeometry) -> None:
    if is_on_interface(eta, g):
        raise ValidityException(f"{name}: eta={eta} lies on the interface for rho={g.rho}")


# ============================================
# Small x
# ============================================

def small_x_majorant(x: float, g: ConeGeometry) -> float:
    """x^2/(4 - x^2) + (2/Gamma(1/rho + 1)) * r/(1 - r) with r = (x/2)^(1/rho)."""
    if x == 0.0:
        return 0.0
    nu = 1.0 / g.rho
    r = math.exp(nu * math.log(0.5 * x))
    second = 2.0 * math.exp(-log_gamma_pos(nu + 1.0)) * r / (1.0 - r)
    return x * x / (4.0 - x * x) + second


def s_small_x(x: float, eta: float, g: ConeGeometry) -> EvalResult:
    """
    Leading small-x value S = 1 with the explicit majorant as abs_err.

    Raises:
        DomainException: If x is outside [0, 2)
    """
    _require_finite("s_small_x", x, eta)
    if not 0.0 <= x < 2.0:
        raise DomainException(f"s_small_x: need 0 <= x < 2, got {x}")
    return EvalResult(value=1.0, abs_err=small_x_majorant(x, g), method=Method.SMALL_X)


# ============================================
# Geometric front
# ============================================

def _in_open_window(phase_cos: float, on_interface: bool) -> bool:
    return phase_cos > 0.0 and not on_interface


def residue_terms(x: float, pps: PolePhaseSet, g: ConeGeometry) -> complex:
    """Sum of rho * exp(i x sin phi) over the pole phases strictly inside (-pi/2, pi/2)."""
    total = 0j
    for p in pps.phases:
        if _in_open_window(math.cos(p.phi), p.on_interface):
            total += g.rho * cmath.exp(1j * x * math.sin(p.phi))
    return total


def _erfc_pair(x: float, phi: float) -> complex:
    rx = math.sqrt(x)
    s = math.sin(phi)
    lower = erfc_cplx(cmath.exp(-0.25j * math.pi) * rx * math.sqrt(1.0 - s))
    upper = erfc_cplx(cmath.exp(0.25j * math.pi) * rx * math.sqrt(1.0 + s))
    return lower + upper


def _front_parts(
    x: float, pps: PolePhaseSet, g: ConeGeometry
) -> tuple[list[tuple[int, complex]], list[tuple[int, complex]]]:
    """(geometric, erfc) pole contributions to S_alpha, each labelled by k."""
    geometric: list[tuple[int, complex]] = []
    transition: list[tuple[int, complex]] = []
    for p in pps.phases:
        ray = g.rho * cmath.exp(1j * x * math.sin(p.phi))
        if p.sigma == 1:
            geometric.append((p.k, ray))
        transition.append((p.k, -0.5 * p.sigma * ray * _erfc_pair(x, p.phi)))
    return geometric, transition


def erfc_front(x: float, eta: float, g: ConeGeometry, alpha: Sign) -> complex:
    """
    Pole-originated part of S_alpha: the geometric front smoothed by complementary
    error functions across each shadow boundary.

    Raises:
        ValidityException: If a pole phase of this alpha is on the interface
    """
    _require_finite("erfc_front", x, eta)
    pps = pole_phases(g, eta, alpha)
    if pps.on_interface:
        raise ValidityException(f"erfc_front: eta={eta} lies on the interface for alpha={alpha}")
    geometric, transition = _front_parts(x, pps, g)
    return complex(sum(v for _, v in geometric) + sum(v for _, v in transition))


# ============================================
# Regular part and its Taylor coefficients
# ============================================

def _saddle_poles(pps: PolePhaseSet, beta: Sign) -> np.ndarray:
    """s_phi = sigma * exp(beta*i*pi/4) * (1 - beta sin phi)^(1/2) for every phase."""
    root = cmath.exp(0.25j * math.pi * beta)
    return np.array(
        [p.sigma * root * math.sqrt(1.0 - beta * math.sin(p.phi)) for p in pps.phases],
        dtype=complex,
    )


def _clipped_radius(poles: np.ndarray, radius: float) -> float:
    """Largest usable Cauchy radius: radius, capped at half the nearest removed pole."""
    if poles.size == 0:
        return radius
    return min(radius, 0.5 * float(np.min(np.abs(poles))))


def cauchy_radius(
    eta: float, g: ConeGeometry, alpha: Sign, beta: Sign, radius: float = CAUCHY_RADIUS
) -> float:
    """Radius of the circle b_taylor extracts on for one (alpha, beta) pair."""
    return _clipped_radius(_saddle_poles(pole_phases(g, eta, alpha), beta), radius)


def uniform_feasible(eta: float, g: ConeGeometry, radius: float = CAUCHY_RADIUS) -> bool:
    """
    True when the uniform expansion can be formed at eta: off the interface and
    every Cauchy circle at least MIN_CAUCHY_RADIUS.
    """
    if is_on_interface(eta, g):
        return False
    return all(
        cauchy_radius(eta, g, alpha, beta, radius) >= MIN_CAUCHY_RADIUS
        for alpha in _SIGNS
        for beta in _SIGNS
    )


def normalised_amplitude(
    s: np.ndarray, eta: float, rho: float, alpha: Sign, beta: Sign
) -> np.ndarray:
    """A(s) = cot[(pi/2 + alpha*eta + i log w)/2rho] / q with the saddle phase removed."""
    s = np.asarray(s, dtype=complex)
    q = np.sqrt(s * s - 2j * beta)
    w = 1j * beta - s * s + s * q
    return cot_cplx((0.5 * math.pi + alpha * eta + 1j * np.log(w)) / (2.0 * rho)) / q


def _pole_sum(s: np.ndarray, poles: np.ndarray, rho: float) -> np.ndarray:
    """Compensated sum of i*rho/(s - s_phi) over the poles."""
    if poles.size == 0:
        return np.zeros_like(s)
    terms = 1j * rho / (s[None, :] - poles[:, None])
    re = [math.fsum(col) for col in terms.real.T]
    im = [math.fsum(col) for col in terms.imag.T]
    return np.array(re) + 1j * np.array(im)


def regular_part(
    s: np.ndarray, eta: float, g: ConeGeometry, alpha: Sign, beta: Sign
) -> np.ndarray:
    """B(s) = A(s) minus its pole parts; analytic in a disc about s = 0."""
    s = np.asarray(s, dtype=complex)
    poles = _saddle_poles(pole_phases(g, eta, alpha), beta)
    return normalised_amplitude(s, eta, g.rho, alpha, beta) - _pole_sum(s, poles, g.rho)


def b0_closed_form(eta: float, g: ConeGeometry, alpha: Sign, beta: Sign) -> complex:
    """B(0) in closed form."""
    cot0 = complex(
        cot_cplx(np.array([((1 - beta) * 0.5 * math.pi + alpha * eta) / (2.0 * g.rho)]))[0]
    )
    head = cot0 * cmath.exp(0.25j * math.pi * beta) / math.sqrt(2.0)
    phases = pole_phases(g, eta, alpha).phases
    tail = math.fsum(p.sigma / math.sqrt(1.0 - beta * math.sin(p.phi)) for p in phases)
    return head + 1j * g.rho * cmath.exp(-0.25j * math.pi * beta) * tail


@lru_cache(maxsize=1024)
def _b_taylor_cached(
    eta: float, rho: float, alpha: Sign, beta: Sign, kmax: int, nodes: int, radius: float
) -> BCoeffs:
    g = ConeGeometry(rho=rho)
    pps = pole_phases(g, eta, alpha)
    poles = _saddle_poles(pps, beta)
    r0 = _clipped_radius(poles, radius)
    if r0 < MIN_CAUCHY_RADIUS:
        raise GeometryException(
            f"b_taylor: removed pole too close to the origin (radius {r0:.3g}, eta={eta})"
        )
    if r0 < radius:
        logger.info("cauchy_radius_shrunk", radius=r0, eta=eta, rho=rho, alpha=alpha, beta=beta)

    theta = circle_angles(nodes)
    s = r0 * np.exp(1j * theta)
    values = regular_part(s, eta, g, alpha, beta)
    coeffs = [b0_closed_form(eta, g, alpha, beta)]
    for k in range(1, kmax + 1):
        m = 2 * k
        coeffs.append(complex(np.mean(values * np.exp(-1j * m * theta))) / r0**m)
    return BCoeffs(alpha=alpha, beta=beta, kmax=kmax, coeffs=coeffs, radius=r0)


def b_taylor(
    eta: float,
    g: ConeGeometry,
    alpha: Sign,
    beta: Sign,
    kmax: int,
    nodes: int = CAUCHY_NODES,
    radius: float = CAUCHY_RADIUS,
) -> BCoeffs:
    """
    Even Taylor coefficients b_{2k}, k = 0..kmax, of the regular part B at s = 0.

    b_0 comes from the closed form; higher coefficients from a trapezoid-rule Cauchy
    integral on |s| = r0, where r0 is shrunk below half the distance to the nearest
    removed pole. Results are memoised since they do not depend on x.

    Raises:
        DomainException: If kmax is outside 0..4
        ValidityException: If eta lies on the interface
        GeometryException: If the Cauchy circle would have to shrink below 1e-3
    """
    if not 0 <= kmax <= MAX_KMAX:
        raise DomainException(f"b_taylor: kmax must be in 0..{MAX_KMAX}, got {kmax}")
    _require_finite("b_taylor", eta)
    _require_off_interface("b_taylor", eta, g)
    return _b_taylor_cached(eta, g.rho, alpha, beta, kmax, nodes, radius)


def cauchy_coefficient(
    eta: float,
    g: ConeGeometry,
    alpha: Sign,
    beta: Sign,
    m: int,
    nodes: int = CAUCHY_NODES,
    radius: float = CAUCHY_RADIUS,
) -> complex:
    """Taylor coefficient b_m of B by Cauchy extraction alone (m = 0 checks the closed form)."""
    _require_off_interface("cauchy_coefficient", eta, g)
    poles = _saddle_poles(pole_phases(g, eta, alpha), beta)
    r0 = _clipped_radius(poles, radius)
    theta = circle_angles(nodes)
    values = regular_part(r0 * np.exp(1j * theta), eta, g, alpha, beta)
    return complex(np.mean(values * np.exp(-1j * m * theta))) / r0**m


# ============================================
# Uniform large-x expansion
# ============================================

def _diffractive_terms(
    x: float, eta: float, g: ConeGeometry, alpha: Sign, kmax: int, nodes: int, radius: float
) -> list[tuple[int, complex]]:
    """Gamma(k + 1/2) * sum_beta (beta e^{x beta i}/2pi) b_{2k} * x^{-(2k+1)/2}, k = 0..kmax."""
    by_beta = {beta: b_taylor(eta, g, alpha, beta, kmax, nodes, radius) for beta in _SIGNS}
    terms = []
    for k in range(kmax + 1):
        weight = gamma_pos(k + 0.5) * x ** (-(2 * k + 1) / 2.0)
        acc = 0j
        for beta in _SIGNS:
            acc += beta * cmath.exp(1j * beta * x) / (2.0 * math.pi) * by_beta[beta].coeffs[k]
        terms.append((k, weight * acc))
    return terms


def _alpha_breakdown(
    x: float, eta: float, g: ConeGeometry, alpha: Sign, kmax: int, nodes: int, radius: float
) -> ExpansionBreakdown:
    pps = pole_phases(g, eta, alpha)
    geometric, transition = _front_parts(x, pps, g)
    diffractive = _diffractive_terms(x, eta, g, alpha, kmax, nodes, radius)
    return ExpansionBreakdown(
        alpha=alpha, geometric=geometric, erfc_front=transition, diffractive=diffractive
    )


def s_alpha_uniform(
    x: float,
    eta: float,
    g: ConeGeometry,
    alpha: Sign,
    kmax: int = 2,
    nodes: int = CAUCHY_NODES,
    radius: float = CAUCHY_RADIUS,
) -> complex:
    """Uniform large-x expansion of the single cotangent summand S_alpha."""
    _require_finite("s_alpha_uniform", x, eta)
    if x <= 0:
        raise DomainException(f"s_alpha_uniform: x must be positive, got {x}")
    _require_off_interface("s_alpha_uniform", eta, g)
    return _alpha_breakdown(x, eta, g, alpha, kmax, nodes, radius).total()


def s_uniform(
    x: float,
    eta: float,
    g: ConeGeometry,
    kmax: int = 2,
    nodes: int = CAUCHY_NODES,
    radius: float = CAUCHY_RADIUS,
) -> EvalResult:
    """
    Uniform large-x expansion of S with kmax diffractive corrections.

    abs_err is heuristic: the magnitude of the last retained diffractive term plus
    the first omitted one (or the last term over x once kmax = 4).

    Raises:
        DomainException: If x <= 0 or kmax is outside 0..4
        ValidityException: If eta lies on the interface
    """
    _require_finite("s_uniform", x, eta)
    if x <= 0:
        raise DomainException(f"s_uniform: x must be positive, got {x}")
    if not 0 <= kmax <= MAX_KMAX:
        raise DomainException(f"s_uniform: kmax must be in 0..{MAX_KMAX}, got {kmax}")
    _require_off_interface("s_uniform", eta, g)

    k_err = min(kmax + 1, MAX_KMAX)
    by_order = np.zeros(k_err + 1, dtype=complex)
    front = 0j
    for alpha in _SIGNS:
        pps = pole_phases(g, eta, alpha)
        geometric, transition = _front_parts(x, pps, g)
        front += sum(v for _, v in geometric) + sum(v for _, v in transition)
        for k, term in _diffractive_terms(x, eta, g, alpha, k_err, nodes, radius):
            by_order[k] += term

    value = front + complex(np.sum(by_order[: kmax + 1]))
    last = abs(by_order[kmax])
    omitted = abs(by_order[kmax + 1]) if kmax < MAX_KMAX else last / x
    return EvalResult(value=value, abs_err=last + omitted, method=Method.UNIFORM, rigorous=False)


# ============================================
# Preliminary (non-uniform) expansion
# ============================================

def preliminary_constant(eta: float, g: ConeGeometry) -> float:
    """Heuristic constant C of the C * x^{-3/2} error estimate."""
    acc = 0.0
    for alpha in _SIGNS:
        for p in pole_phases(g, eta, alpha).phases:
            for beta in _SIGNS:
                acc += (1.0 - beta * math.sin(p.phi)) ** -1.5
    return 1.0 + g.rho * acc


def s_preliminary(x: float, eta: float, g: ConeGeometry) -> EvalResult:
    """
    Leading non-uniform expansion: geometric front plus one cotangent x^{-1/2} term
    per saddle,

        sum_alpha { residue_terms + (8 pi x)^{-1/2} [cot(alpha*eta/2rho) e^{i(x + pi/4)}
                                                 - cot((alpha*eta + pi)/2rho) e^{-i(x + pi/4)}] }

    Raises:
        DomainException: If x <= 0
        ValidityException: If eta is within 0.2 of the interface
    """
    _require_finite("s_preliminary", x, eta)
    if x <= 0:
        raise DomainException(f"s_preliminary: x must be positive, got {x}")
    distance = interface_distance(eta, g)
    if distance < PRELIMINARY_MIN_DISTANCE:
        raise ValidityException(
            f"s_preliminary: eta={eta} is {distance:.3g} from the interface "
            f"(need >= {PRELIMINARY_MIN_DISTANCE})"
        )

    outgoing = cmath.exp(1j * (x + 0.25 * math.pi))
    scale = 1.0 / math.sqrt(8.0 * math.pi * x)
    total = 0j
    for alpha in _SIGNS:
        total += residue_terms(x, pole_phases(g, eta, alpha), g)
        args = np.array([alpha * eta, alpha * eta + math.pi]) / (2.0 * g.rho)
        c_plus, c_minus = cot_cplx(args)
        total += scale * (complex(c_plus) * outgoing - complex(c_minus) / outgoing)

    abs_err = preliminary_constant(eta, g) * x**-1.5
    return EvalResult(value=total, abs_err=abs_err, method=Method.PRELIMINARY, rigorous=False)


# ============================================
# Kernel-level breakdown and images
# ============================================

def kernel_breakdown(
    q: KernelQuery,
    g: ConeGeometry,
    kmax: int = 2,
    strict: bool = True,
    nodes: int = CAUCHY_NODES,
    radius: float = CAUCHY_RADIUS,
) -> KernelBreakdown:
    """
    Labelled geometric, erfc-transition and diffractive kernel terms per alpha.

    Every entry is already multiplied by the kernel prefactor, so the entries sum to
    the kernel; recombine() follows the assemble_kernel arithmetic path exactly.

    Args:
        q: Kernel query (t > 0)
        g: Cone geometry
        kmax: Number of diffractive corrections
        strict: Raise on the interface instead of returning invalid parts

    Raises:
        ValidityException: On the interface when strict
    """
    pf = prefactor(q, g)
    args = reduce(q, g)
    if args.x <= 0:
        raise DomainException(f"kernel_breakdown: x must be positive, got {args.x}")

    if is_on_interface(args.eta, g):
        if strict:
            raise ValidityException(
                f"kernel_breakdown: eta={args.eta} lies on the interface for rho={g.rho}"
            )
        logger.info("breakdown_on_interface", eta=args.eta, rho=g.rho)
        parts = [ExpansionBreakdown(alpha=alpha, valid=False) for alpha in _SIGNS]
        return KernelBreakdown(
            prefactor=pf, x=args.x, eta=args.eta, s_value=0j, abs_err=0.0, parts=parts
        )

    S = s_uniform(args.x, args.eta, g, kmax, nodes, radius)
    parts = []
    for alpha in _SIGNS:
        raw = _alpha_breakdown(args.x, args.eta, g, alpha, kmax, nodes, radius)
        parts.append(
            ExpansionBreakdown(
                alpha=alpha,
                geometric=[(j, pf * v) for j, v in raw.geometric],
                erfc_front=[(k, pf * v) for k, v in raw.erfc_front],
                diffractive=[(k, pf * v) for k, v in raw.diffractive],
            )
        )
    return KernelBreakdown(
        prefactor=pf, x=args.x, eta=args.eta, s_value=S.value, abs_err=S.abs_err, parts=parts
    )


def images_closed_form(q: KernelQuery, N: int) -> complex:
    """
    Method-of-images kernel for rho = 1/N:

        -(1/4 pi i t) sum_{j<N} exp[(r1^2 + r2^2 - 2 r1 r2 cos(theta1 - theta2 - 2 pi j/N)) / 4it]
    """
    if N < 1:
        raise DomainException(f"images_closed_form: N must be >= 1, got {N}")
    eta = q.theta1 - q.theta2
    total = 0j
    for j in range(N):
        d2 = q.r1**2 + q.r2**2 - 2.0 * q.r1 * q.r2 * math.cos(eta - 2.0 * math.pi * j / N)
        total += cmath.exp(d2 / (4j * q.t))
    return -total / (4j * math.pi * q.t)


def images_order(g: ConeGeometry) -> Optional[int]:
    """N when 1/rho is a positive integer N, else None."""
    n = round(1.0 / g.rho)
    if n >= 1 and abs(1.0 / g.rho - n) <= 1e-12 * n:
        return n
    return None


def s_images(x: float, eta: float, g: ConeGeometry) -> EvalResult:
    """
    S for rho = 1/N as a sum of N unit-modulus images, rho * sum_j exp(i x cos(eta - 2 pi rho j)).

    Raises:
        ValidityException: If 1/rho is not an integer
    """
    _require_finite("s_images", x, eta)
    N = images_order(g)
    if N is None:
        raise ValidityException(f"s_images: 1/rho is not an integer (rho={g.rho})")
    j = np.arange(N)
    value = g.rho * complex(np.sum(np.exp(1j * x * np.cos(eta - g.period * j))))
    rounding = 4.0 * N * float(np.finfo(float).eps) * (1.0 + x)
    return EvalResult(value=value, abs_err=rounding, method=Method.IMAGES)
