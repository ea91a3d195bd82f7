"""
Kernel Core Tests

Tests for:
1. Value models (ConeGeometry, KernelQuery, EvalResult validation)
2. Reduced variables and the kernel prefactor
3. Pole-phase enumeration and interface detection
4. Kernel assembly and the time-reversal convention
"""

from __future__ import annotations

import cmath
import math

import pytest
from pydantic import ValidationError

from cone_kernel.exceptions import DomainException
from cone_kernel.kernel import (
    assemble_kernel,
    canonical_eta,
    interface_distance,
    is_on_interface,
    pole_phases,
    prefactor,
    reduce,
    time_reversed,
)
from cone_kernel.models import ConeGeometry, ContourSpec, EvalResult, KernelQuery, Method

pytestmark = pytest.mark.unit


# ============================================
# Test 1: Models
# ============================================

def test_cone_geometry_validation():
    """rho must be positive and finite; period is 2 pi rho."""
    assert ConeGeometry(rho=0.5).period == pytest.approx(math.pi)
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValidationError):
            ConeGeometry(rho=bad)


def test_kernel_query_validation():
    """t and radii must be positive; angles must be finite."""
    KernelQuery(t=1.0, r1=1.0, r2=2.0, theta1=-7.0)
    with pytest.raises(ValidationError):
        KernelQuery(t=0.0, r1=1.0, r2=1.0)
    with pytest.raises(ValidationError):
        KernelQuery(t=1.0, r1=-1.0, r2=1.0)
    with pytest.raises(ValidationError):
        KernelQuery(t=1.0, r1=1.0, r2=1.0, theta2=math.nan)


def test_eval_result_rejects_non_finite():
    """Values and error estimates must be finite and errors non-negative."""
    with pytest.raises(ValidationError):
        EvalResult(value=complex(math.inf, 0.0), abs_err=0.0, method=Method.SERIES)
    with pytest.raises(ValidationError):
        EvalResult(value=1.0, abs_err=-1.0, method=Method.SERIES)
    assert EvalResult(value=1.0, abs_err=0.0, method=Method.SERIES).rigorous is True


def test_models_are_frozen_and_hashable():
    """Frozen configuration objects can key memoisation caches."""
    spec = ContourSpec()
    assert hash(spec) == hash(ContourSpec())
    with pytest.raises(ValidationError):
        spec.R = 2.0


def test_contour_spec_truncation_validation():
    """An explicit L must lie beyond the circle."""
    with pytest.raises(ValidationError):
        ContourSpec(R=1.5, L=1.2)


# ============================================
# Test 2: Reduced variables and prefactor
# ============================================

@pytest.mark.parametrize(
    "q, x, eta",
    [
        (KernelQuery(t=0.5, r1=1.0, r2=1.0, theta1=0.3, theta2=0.3), 1.0, 0.0),
        (KernelQuery(t=1.0, r1=2.0, r2=3.0, theta1=1.0, theta2=0.25), 3.0, 0.75),
        (KernelQuery(t=10.0, r1=math.sqrt(20.0), r2=math.sqrt(20.0), theta1=math.pi), 1.0, math.pi),
    ],
)
def test_reduce(q, x, eta):
    """x = r1 r2/(2t) and eta = theta1 - theta2, unreduced."""
    args = reduce(q, ConeGeometry(rho=1.0))
    assert args.x == pytest.approx(x, rel=1e-15)
    assert args.eta == pytest.approx(eta, abs=1e-15)


def test_reduce_keeps_eta_unreduced():
    """eta is not folded into a period."""
    q = KernelQuery(t=1.0, r1=1.0, r2=1.0, theta1=20.0, theta2=0.0)
    assert reduce(q, ConeGeometry(rho=0.3)).eta == 20.0


def test_prefactor_value():
    """(t, r1, r2, rho) = (1, 1, 1, 1) gives (i/4 pi) e^{-i/2}."""
    q = KernelQuery(t=1.0, r1=1.0, r2=1.0)
    expected = 1j / (4.0 * math.pi) * cmath.exp(-0.5j)
    assert abs(prefactor(q, ConeGeometry(rho=1.0)) - expected) <= 1e-16


def test_prefactor_small_radii_limit():
    """As r1, r2 -> 0 the prefactor tends to i/(4 pi)."""
    q = KernelQuery(t=1.0, r1=1e-9, r2=1e-9)
    assert abs(prefactor(q, ConeGeometry(rho=1.0)) - 1j / (4.0 * math.pi)) <= 1e-15


def test_prefactor_modulus():
    """|prefactor| = 1/(4 pi rho t) for any radii."""
    g = ConeGeometry(rho=0.5)
    for r1, r2 in [(0.3, 7.0), (5.0, 5.0), (12.0, 0.01)]:
        q = KernelQuery(t=2.0, r1=r1, r2=r2)
        assert abs(prefactor(q, g)) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-14)


# ============================================
# Test 3: Pole phases and the interface
# ============================================

def test_pole_phases_one_third_cone():
    """rho = 1/3, eta = 0, alpha = +1 gives {-5pi/6, -pi/6, pi/2}."""
    pps = pole_phases(ConeGeometry(rho=1.0 / 3.0), 0.0, 1)
    assert pps.angles == pytest.approx([-5 * math.pi / 6, -math.pi / 6, math.pi / 2], abs=1e-14)
    assert [p.k for p in pps.phases] == [-2, -1, 0]
    # pi/2 sits on the interface and is assigned sigma = +1
    assert pps.phases[-1].on_interface
    assert pps.phases[-1].sigma == 1
    assert pps.on_interface


def test_pole_phases_plane():
    """rho = 1, eta = pi/2, alpha = -1 gives the single phase 0."""
    pps = pole_phases(ConeGeometry(rho=1.0), math.pi / 2, -1)
    assert len(pps) == 1
    assert pps.angles[0] == pytest.approx(0.0, abs=1e-15)
    assert pps.phases[0].sigma == 1
    assert not pps.on_interface


def test_pole_phases_wide_cone():
    """rho = 2, eta = 0.3, alpha = +1 gives only pi/2 + 0.3."""
    pps = pole_phases(ConeGeometry(rho=2.0), 0.3, 1)
    assert pps.angles == pytest.approx([math.pi / 2 + 0.3])
    assert pps.phases[0].sigma == -1


@pytest.mark.parametrize("rho", [0.2, 1.0 / 3.0, 0.7, 1.0, 1.41421356, 2.5])
@pytest.mark.parametrize("eta", [-2.0, -0.4, 0.0, 0.9, 3.0, 11.0])
def test_pole_phase_invariants(rho, eta):
    """Phases lie in [-pi, pi), reconstruct from k, and the set is small and periodic."""
    g = ConeGeometry(rho=rho)
    for alpha in (1, -1):
        pps = pole_phases(g, eta, alpha)
        assert len(pps) <= math.ceil(1.0 / rho) + 1
        for p in pps.phases:
            assert -math.pi <= p.phi < math.pi
            assert p.phi == pytest.approx(math.pi / 2 + alpha * eta + g.period * p.k, abs=1e-12)
            assert p.sigma == (1 if p.on_interface or math.cos(p.phi) > 0 else -1)

        shifted = pole_phases(g, eta + g.period, alpha)
        assert shifted.angles == pytest.approx(pps.angles, abs=1e-12)

    mirrored = pole_phases(g, -eta, 1)
    assert mirrored.angles == pytest.approx(pole_phases(g, eta, -1).angles, abs=1e-12)


@pytest.mark.parametrize(
    "rho, eta, expected",
    [
        (1.0, 0.0, 0.0),
        (0.4, 0.0, 0.0),
        (1.0, math.pi / 2, math.pi / 2),
        (1.0 / 3.0, math.pi / 6, math.pi / 6),
    ],
)
def test_interface_distance(rho, eta, expected):
    """Distance to {-pi, 0, pi} + 2 pi rho Z."""
    assert interface_distance(eta, ConeGeometry(rho=rho)) == pytest.approx(expected, abs=1e-14)


def test_is_on_interface():
    """eta = 0 and eta = pi are interface points; generic eta is not."""
    g = ConeGeometry(rho=0.7)
    assert is_on_interface(0.0, g)
    assert is_on_interface(math.pi, g)
    assert is_on_interface(g.period, g)
    assert not is_on_interface(0.4, g)


def test_canonical_eta():
    """Representatives land in [-pi rho, pi rho)."""
    g = ConeGeometry(rho=0.5)
    assert canonical_eta(0.2 + 3 * g.period, g) == pytest.approx(0.2, abs=1e-13)
    assert canonical_eta(-0.6 * math.pi, g) == pytest.approx(0.4 * math.pi, abs=1e-13)
    for eta in (-10.0, -1.0, 0.0, 1.3, 9.0):
        assert -math.pi * g.rho <= canonical_eta(eta, g) < math.pi * g.rho


# ============================================
# Test 4: Kernel assembly
# ============================================

def test_assemble_kernel_identity():
    """S = 1 yields the prefactor itself, with abs_err scaled by |prefactor|."""
    g = ConeGeometry(rho=1.0)
    q = KernelQuery(t=1.0, r1=1.0, r2=2.0)
    K = assemble_kernel(EvalResult(value=1.0, abs_err=1e-10, method=Method.SERIES), q, g)
    assert K.value == prefactor(q, g)
    assert K.abs_err == pytest.approx(1e-10 / (4.0 * math.pi))
    assert K.method is Method.SERIES


def test_assemble_kernel_free_plane():
    """rho = 1 with S = e^{ix cos eta} is the free propagator."""
    g = ConeGeometry(rho=1.0)
    q = KernelQuery(t=1.0, r1=1.0, r2=2.0, theta1=math.pi / 3, theta2=0.0)
    args = reduce(q, g)
    value = cmath.exp(1j * args.x * math.cos(args.eta))
    S = EvalResult(value=value, abs_err=0.0, method=Method.SERIES)
    d2 = q.r1**2 + q.r2**2 - 2 * q.r1 * q.r2 * math.cos(args.eta)
    free = -cmath.exp(d2 / (4j * q.t)) / (4j * math.pi * q.t)
    assert abs(assemble_kernel(S, q, g).value - free) <= 1e-15


def test_assemble_kernel_zero_and_modulus():
    """S = 0 stays zero; |K| = |S|/(4 pi rho t)."""
    g = ConeGeometry(rho=0.8)
    q = KernelQuery(t=3.0, r1=1.0, r2=2.0)
    zero = assemble_kernel(EvalResult(value=0.0, abs_err=2.0, method=Method.CONTOUR), q, g)
    assert zero.value == 0
    assert zero.abs_err == pytest.approx(2.0 / (4.0 * math.pi * 0.8 * 3.0))
    K = assemble_kernel(EvalResult(value=0.3 - 0.4j, abs_err=0.0, method=Method.CONTOUR), q, g)
    assert abs(K.value) == pytest.approx(0.5 / (4.0 * math.pi * 0.8 * 3.0), rel=1e-14)


def test_time_reversed_conjugates():
    """K(-t) = conj K(t) and the metadata is kept."""
    K = EvalResult(value=0.2 + 0.7j, abs_err=1e-9, method=Method.UNIFORM, rigorous=False)
    back = time_reversed(K)
    assert back.value == 0.2 - 0.7j
    assert back.abs_err == K.abs_err
    assert back.rigorous is False


def test_prefactor_rejects_negative_time_via_model():
    """Negative t cannot even be represented in a KernelQuery."""
    with pytest.raises(ValidationError):
        KernelQuery(t=-1.0, r1=1.0, r2=1.0)


def test_prefactor_domain_error_on_bypassed_validation():
    """A query built without validation still cannot produce a prefactor for t <= 0."""
    q = KernelQuery.model_construct(t=-1.0, r1=1.0, r2=1.0, theta1=0.0, theta2=0.0)
    with pytest.raises(DomainException):
        prefactor(q, ConeGeometry(rho=1.0))
