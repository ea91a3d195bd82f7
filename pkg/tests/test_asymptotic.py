"""
Asymptotic Evaluation Tests

Tests for:
1. Small-x value and its explicit majorant
2. Geometric front: residue terms and the erfc transition
3. Taylor coefficients of the regular part (closed form, Cauchy extraction, memoisation)
4. Uniform and preliminary large-x expansions against closed forms and the series
5. Kernel-level breakdown and the method-of-images degeneration
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from scipy import special

from cone_kernel import asymptotic
from cone_kernel.asymptotic import (
    b0_closed_form,
    b_taylor,
    cauchy_coefficient,
    erfc_front,
    images_closed_form,
    images_order,
    kernel_breakdown,
    residue_terms,
    s_alpha_uniform,
    s_images,
    s_preliminary,
    s_small_x,
    s_uniform,
    small_x_majorant,
)
from cone_kernel.exceptions import DomainException, GeometryException, ValidityException
from cone_kernel.kernel import assemble_kernel, interface_distance, pole_phases, prefactor, reduce
from cone_kernel.models import ConeGeometry, KernelQuery, Method
from cone_kernel.series import s_series

pytestmark = pytest.mark.unit


def _query(x: float, eta: float) -> KernelQuery:
    """A query with t = 1 and r1 = r2 realising (x, eta)."""
    r = math.sqrt(2.0 * x)
    return KernelQuery(t=1.0, r1=r, r2=r, theta1=eta, theta2=0.0)


# ============================================
# Test 1: Small x
# ============================================

def test_small_x_at_origin(generic_cone):
    """x = 0 gives 1 with a vanishing majorant."""
    result = s_small_x(0.0, 0.3, generic_cone)
    assert result.value == 1.0
    assert result.abs_err == 0.0
    assert result.method is Method.SMALL_X


def test_small_x_majorant_value(plane):
    """x = 0.1, rho = 1: 0.01/3.99 + 2 * 0.1/(2 - 0.1)."""
    expected = 0.01 / 3.99 + 2.0 * 0.1 / 1.9
    assert small_x_majorant(0.1, plane) == pytest.approx(expected, rel=1e-14)
    assert s_small_x(0.1, 0.0, plane).abs_err == pytest.approx(expected, rel=1e-14)


def test_small_x_bound_is_honest():
    """|S(0.5, eta) - 1| <= abs_err for rho = 1/3 on 16 eta samples."""
    g = ConeGeometry(rho=1.0 / 3.0)
    bound = s_small_x(0.5, 0.0, g).abs_err
    for eta in np.linspace(-math.pi / 3, math.pi / 3, 16, endpoint=False):
        assert abs(s_series(0.5, eta, g).value - 1.0) <= bound


def test_small_x_domain(generic_cone):
    """x must lie in [0, 2)."""
    for bad in (2.0, 3.5, -0.1):
        with pytest.raises(DomainException):
            s_small_x(bad, 0.0, generic_cone)


# ============================================
# Test 2: Geometric front
# ============================================

def test_residue_terms_single_phase(plane):
    """rho = 1, eta = pi/2, alpha = -1: the phase 0 contributes exactly 1."""
    pps = pole_phases(plane, math.pi / 2, -1)
    for x in (0.5, 7.0, 100.0):
        assert abs(residue_terms(x, pps, plane) - 1.0) <= 1e-15


def test_residue_terms_open_window():
    """rho = 1/3, eta = 0, alpha = +1, x = 2: only -pi/6 is kept, pi/2 is on the boundary."""
    g = ConeGeometry(rho=1.0 / 3.0)
    value = residue_terms(2.0, pole_phases(g, 0.0, 1), g)
    assert abs(value - cmath.exp(-1j) / 3.0) <= 1e-15


def test_residue_terms_empty_window():
    """No phase with cos > 0 gives zero."""
    g = ConeGeometry(rho=2.0)
    assert residue_terms(3.0, pole_phases(g, 0.3, 1), g) == 0


def test_erfc_front_single_phase(plane):
    """One phase at 0: 1 - erfc(2 e^{-i pi/4})/2 - erfc(2 e^{i pi/4})/2 at x = 4."""
    expected = (
        1.0
        - 0.5 * special.erfc(2.0 * cmath.exp(-0.25j * math.pi))
        - 0.5 * special.erfc(2.0 * cmath.exp(0.25j * math.pi))
    )
    assert abs(erfc_front(4.0, math.pi / 2, plane, -1) - expected) <= 1e-12


def test_erfc_front_conjugation(generic_cone):
    """erfc_front(x, -eta, +1) equals erfc_front(x, eta, -1)."""
    for x in (3.0, 45.0):
        for eta in (0.4, 1.7):
            a = erfc_front(x, -eta, generic_cone, 1)
            b = erfc_front(x, eta, generic_cone, -1)
            assert abs(a - b) <= 1e-14


@pytest.mark.parametrize("rho", [0.7, 1.0, 1.6])
def test_erfc_front_close_to_residues(rho):
    """For x >= 10 the front differs from the residues by at most the erfc terms."""
    g = ConeGeometry(rho=rho)
    for x in (10.0, 60.0, 400.0):
        for alpha in (1, -1):
            pps = pole_phases(g, 1.0, alpha)
            largest = 0.0
            for p in pps.phases:
                for sign in (1, -1):
                    radial = math.sqrt(x * (1 - sign * math.sin(p.phi)))
                    z = cmath.exp(-0.25j * sign * math.pi) * radial
                    largest = max(largest, abs(special.erfc(z)))
            bound = len(pps) * rho * largest
            assert abs(erfc_front(x, 1.0, g, alpha) - residue_terms(x, pps, g)) <= bound + 1e-14


def test_erfc_front_on_interface(generic_cone):
    """The front is refused on the interface."""
    with pytest.raises(ValidityException):
        erfc_front(5.0, 0.0, generic_cone, 1)


# ============================================
# Test 3: Taylor coefficients
# ============================================

def test_b0_closed_form_matches_cauchy(generic_cone):
    """rho = 0.7, eta = 0.4, alpha = beta = +1: closed form against extraction."""
    closed = b0_closed_form(0.4, generic_cone, 1, 1)
    assert abs(closed - cauchy_coefficient(0.4, generic_cone, 1, 1, 0)) <= 1e-8


def test_b0_closed_form_random_samples():
    """Closed form against extraction on random off-interface points."""
    rng = np.random.default_rng(11)
    taken = 0
    while taken < 20:
        g = ConeGeometry(rho=float(rng.uniform(0.3, 2.5)))
        eta = float(rng.uniform(-math.pi * g.rho, math.pi * g.rho))
        if interface_distance(eta, g) < 0.1:
            continue
        alpha = int(rng.choice([1, -1]))
        beta = int(rng.choice([1, -1]))
        closed = b0_closed_form(eta, g, alpha, beta)
        assert abs(closed - cauchy_coefficient(eta, g, alpha, beta, 0)) <= 1e-8
        taken += 1


def test_b0_half_cone_cancellation(half_cone):
    """For rho = 1/2 the b_0 of both alphas cancel for each beta."""
    for beta in (1, -1):
        total = b0_closed_form(0.4, half_cone, 1, beta) + b0_closed_form(0.4, half_cone, -1, beta)
        assert abs(total) <= 1e-9


def test_b_taylor_coefficients(generic_cone):
    """b_taylor returns kmax + 1 finite coefficients, b_0 from the closed form."""
    coeffs = b_taylor(0.9, generic_cone, 1, -1, 3)
    assert len(coeffs.coeffs) == 4
    assert coeffs.coeffs[0] == b0_closed_form(0.9, generic_cone, 1, -1)
    assert coeffs.coeffs[2] == pytest.approx(cauchy_coefficient(0.9, generic_cone, 1, -1, 4))
    assert 0.0 < coeffs.radius <= 0.5


def test_b_taylor_is_memoised(generic_cone):
    """Repeated calls return the cached object."""
    first = b_taylor(1.3, generic_cone, -1, 1, 2)
    assert b_taylor(1.3, generic_cone, -1, 1, 2) is first


def test_b_taylor_shrinks_radius(generic_cone, mocker):
    """A removed pole near the origin shrinks the Cauchy circle and logs it."""
    asymptotic._b_taylor_cached.cache_clear()
    logger = mocker.patch("cone_kernel.asymptotic.logger")
    coeffs = b_taylor(0.123, generic_cone, 1, 1, 2)
    assert coeffs.radius < 0.5
    logger.info.assert_called_once()
    assert logger.info.call_args.args[0] == "cauchy_radius_shrunk"


def test_b_taylor_failures(generic_cone):
    """Bad kmax, the interface and a pole at the origin are all refused."""
    with pytest.raises(DomainException):
        b_taylor(0.5, generic_cone, 1, 1, 5)
    with pytest.raises(ValidityException):
        b_taylor(0.0, generic_cone, 1, 1, 2)
    with pytest.raises(GeometryException):
        b_taylor(1e-3, generic_cone, 1, 1, 2)


# ============================================
# Test 4: Large-x expansions
# ============================================

@pytest.mark.parametrize("eta", [0.4, 1.0, 2.3, -2.0])
def test_uniform_plane_is_jacobi_anger(plane, eta):
    """rho = 1, x = 100, kmax = 2 reproduces e^{ix cos eta}."""
    result = s_uniform(100.0, eta, plane, kmax=2)
    assert abs(result.value - cmath.exp(100j * math.cos(eta))) <= 1e-6
    assert result.method is Method.UNIFORM
    assert not result.rigorous


def test_uniform_is_alpha_sum(generic_cone):
    """s_uniform is the sum of the single-alpha expansions."""
    total = sum(s_alpha_uniform(80.0, 1.1, generic_cone, alpha, kmax=1) for alpha in (1, -1))
    assert abs(s_uniform(80.0, 1.1, generic_cone, kmax=1).value - total) <= 1e-13


def test_uniform_against_series():
    """rho = 0.75, eta = 1.0, x = 100: kmax = 2 agrees with the series to 1e-5."""
    g = ConeGeometry(rho=0.75)
    uniform = s_uniform(100.0, 1.0, g, kmax=2)
    series = s_series(100.0, 1.0, g)
    assert abs(uniform.value - series.value) <= 1e-5


def test_uniform_improves_with_kmax():
    """Adding diffractive corrections reduces the error at x = 60."""
    g = ConeGeometry(rho=1.2)
    exact = s_series(60.0, 0.6, g).value
    errors = [abs(s_uniform(60.0, 0.6, g, kmax=k).value - exact) for k in (0, 1, 2)]
    assert errors[2] < errors[0]
    assert errors[1] < errors[0]


def test_uniform_failures(generic_cone):
    """Interface, non-positive x and kmax beyond 4 are refused."""
    with pytest.raises(ValidityException):
        s_uniform(100.0, 0.0, generic_cone)
    with pytest.raises(DomainException):
        s_uniform(0.0, 1.0, generic_cone)
    with pytest.raises(DomainException):
        s_uniform(100.0, 1.0, generic_cone, kmax=5)


def test_preliminary_plane_cancellation(plane):
    """rho = 1: the cotangent terms cancel over alpha, leaving the free image."""
    result = s_preliminary(50.0, 1.0, plane)
    assert abs(result.value - cmath.exp(50j * math.cos(1.0))) <= 1e-12
    assert result.method is Method.PRELIMINARY


def test_preliminary_agrees_with_uniform(generic_cone):
    """The two expansions share their leading terms as x grows."""
    prelim = s_preliminary(1e4, 1.0, generic_cone).value
    uniform = s_uniform(1e4, 1.0, generic_cone, kmax=0).value
    assert abs(prelim - uniform) <= 1e-4


def test_preliminary_against_series():
    """rho = 2, eta = 1.0, x = 200: within the heuristic C x^{-3/2}."""
    g = ConeGeometry(rho=2.0)
    prelim = s_preliminary(200.0, 1.0, g)
    assert abs(prelim.value - s_series(200.0, 1.0, g).value) <= prelim.abs_err


def test_preliminary_refuses_near_interface(generic_cone):
    """eta within 0.2 of the interface is a validity error."""
    with pytest.raises(ValidityException):
        s_preliminary(100.0, 0.1, generic_cone)


# ============================================
# Test 5: Breakdown and images
# ============================================

def test_kernel_breakdown_recombines(generic_cone):
    """recombine() equals assemble_kernel(s_uniform) exactly; the entries sum to it."""
    q = KernelQuery(t=0.5, r1=6.0, r2=8.0, theta1=1.0, theta2=0.1)
    breakdown = kernel_breakdown(q, generic_cone, kmax=2)
    args = reduce(q, generic_cone)
    K = assemble_kernel(s_uniform(args.x, args.eta, generic_cone, kmax=2), q, generic_cone)
    assert breakdown.recombine() == K.value
    entries = sum(part.total() for part in breakdown.parts)
    assert abs(entries - K.value) <= 1e-13
    assert breakdown.valid


def test_kernel_breakdown_geometric_terms():
    """G_0 count matches the index set and every term has modulus |prefactor| * rho."""
    g = ConeGeometry(rho=0.3)
    eta = 0.5
    q = _query(60.0, eta)
    breakdown = kernel_breakdown(q, g, kmax=1)
    expected_count = 0
    for alpha in (1, -1):
        for j in range(-10, 11):
            if -math.pi < alpha * eta + g.period * j < 0:
                expected_count += 1
    terms = [v for part in breakdown.parts for _, v in part.geometric]
    assert len(terms) == expected_count
    pf = abs(prefactor(q, g))
    for v in terms:
        assert abs(v) == pytest.approx(pf * g.rho, rel=1e-13)


def test_kernel_breakdown_half_cone(half_cone):
    """rho = 1/2: no diffractive contribution and the front is the two-image kernel."""
    q = _query(75.0, 0.5)
    breakdown = kernel_breakdown(q, half_cone, kmax=2)
    diffractive = sum(v for part in breakdown.parts for _, v in part.diffractive)
    assert abs(diffractive) <= 1e-10
    front = sum(
        v for part in breakdown.parts for _, v in part.geometric + part.erfc_front
    )
    assert abs(front - images_closed_form(q, 2)) <= 1e-10


def test_kernel_breakdown_interface(generic_cone):
    """strict raises on the interface; non-strict returns invalid parts."""
    q = _query(60.0, 0.0)
    with pytest.raises(ValidityException):
        kernel_breakdown(q, generic_cone)
    loose = kernel_breakdown(q, generic_cone, strict=False)
    assert not loose.valid
    assert all(not part.valid for part in loose.parts)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_uniform_degenerates_to_images(N):
    """For rho = 1/N the uniform kernel matches the N-image closed form."""
    g = ConeGeometry(rho=1.0 / N)
    for x in (50.0, 120.0):
        q = _query(x, 0.5)
        K = assemble_kernel(s_uniform(x, 0.5, g, kmax=2), q, g)
        assert abs(K.value - images_closed_form(q, N)) <= 1e-6


def test_images_closed_form_single_image():
    """N = 1 is the free propagator."""
    q = KernelQuery(t=2.0, r1=1.0, r2=3.0, theta1=0.8, theta2=0.1)
    d2 = 1.0 + 9.0 - 6.0 * math.cos(0.7)
    expected = -cmath.exp(d2 / (4j * 2.0)) / (4j * math.pi * 2.0)
    assert abs(images_closed_form(q, 1) - expected) <= 1e-16


def test_images_closed_form_two_images():
    """N = 2, eta = pi/2, r1 = r2 = 1, t = 1: both images sit at distance^2 = 2."""
    q = KernelQuery(t=1.0, r1=1.0, r2=1.0, theta1=math.pi / 2)
    expected = -2.0 * cmath.exp(2.0 / 4j) / (4j * math.pi)
    assert abs(images_closed_form(q, 2) - expected) <= 1e-15


def test_s_images(half_cone):
    """The S-level images sum is cos(x cos eta) at rho = 1/2 and refuses other cones."""
    assert abs(s_images(3.0, 0.4, half_cone).value - math.cos(3.0 * math.cos(0.4))) <= 1e-15
    assert images_order(half_cone) == 2
    assert images_order(ConeGeometry(rho=0.7)) is None
    with pytest.raises(ValidityException):
        s_images(3.0, 0.4, ConeGeometry(rho=0.7))
    with pytest.raises(DomainException):
        images_closed_form(KernelQuery(t=1.0, r1=1.0, r2=1.0), 0)
