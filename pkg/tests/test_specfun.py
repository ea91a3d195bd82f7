"""
Special Function Tests

Tests for:
1. Gamma and log-gamma (classical values, scipy oracle)
2. Bessel J and I of real order (closed forms, scipy oracle, recurrence)
3. Complex erfc (reflection, conjugation, scipy oracle, asymptotic series)
4. Overflow-safe complex cotangent

scipy.special is only an oracle here; the library never imports it.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest
from scipy import special

from cone_kernel.exceptions import DomainException
from cone_kernel.models import SpecFunConfig
from cone_kernel.specfun import (
    bessel_i,
    bessel_i_scaled,
    bessel_j,
    cot_cplx,
    erfc_asymptotic,
    erfc_cplx,
    gamma_pos,
    log_gamma_pos,
)

pytestmark = pytest.mark.unit


# ============================================
# Test 1: Gamma
# ============================================

@pytest.mark.parametrize(
    "x, expected",
    [(0.5, math.sqrt(math.pi)), (1.5, math.sqrt(math.pi) / 2), (4.0, 6.0), (1.0, 1.0)],
)
def test_gamma_classical_values(x, expected):
    """Gamma at half-integers and integers."""
    assert gamma_pos(x) == pytest.approx(expected, rel=1e-13)


def test_gamma_against_scipy():
    """Gamma and log-gamma agree with scipy across several decades."""
    for x in np.geomspace(1e-3, 170.0, 40):
        assert gamma_pos(float(x)) == pytest.approx(special.gamma(x), rel=1e-12)
        assert log_gamma_pos(float(x)) == pytest.approx(special.gammaln(x), rel=1e-12, abs=1e-13)


def test_gamma_domain_errors():
    """Non-positive, non-finite and overflowing arguments are domain errors."""
    for bad in (0.0, -1.0, math.inf, math.nan, 200.0):
        with pytest.raises(DomainException):
            gamma_pos(bad)


def test_log_gamma_large_argument():
    """log_gamma_pos stays finite where Gamma itself would overflow."""
    assert log_gamma_pos(1000.0) == pytest.approx(special.gammaln(1000.0), rel=1e-13)


# ============================================
# Test 2: Bessel J
# ============================================

def test_bessel_j_at_origin():
    """J_0(0) = 1 and J_nu(0) = 0 for nu > 0."""
    assert bessel_j(0.0, 0.0) == 1.0
    assert bessel_j(0.7, 0.0) == 0.0


def test_bessel_j_half_integer_closed_form():
    """J_{1/2}(pi/2) = 2/pi."""
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2.0 / math.pi, rel=1e-12)


def test_bessel_j_integer_value():
    """J_1(1) against its tabulated value."""
    assert bessel_j(1.0, 1.0) == pytest.approx(0.44005058574493355, rel=1e-12)


@pytest.mark.parametrize("nu", [0.0, 0.3, 1.0, 1.5, 2.0 / 0.7, 7.25, 20.0, 45.5])
@pytest.mark.parametrize("x", [0.05, 1.0, 7.5, 12.0, 18.0, 33.0, 60.0])
def test_bessel_j_against_scipy(nu, x):
    """J_nu(x) across the series and integral regimes."""
    expected = special.jv(nu, x)
    assert bessel_j(nu, x) == pytest.approx(expected, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize(
    "nu, x", [(30.5, 20.0), (60.5, 25.0), (80.2, 30.0), (100.3, 40.0), (45.5, 13.0)]
)
def test_bessel_j_order_above_argument(nu, x):
    """Orders well above x > 12 keep full relative accuracy on tiny values."""
    expected = special.jv(nu, x)
    assert expected > 0.0
    assert bessel_j(nu, x) == pytest.approx(expected, rel=1e-9)



def test_bessel_j_recurrence():
    """J_{nu-1} + J_{nu+1} = (2 nu/x) J_nu for random real orders."""
    rng = np.random.default_rng(7)
    for _ in range(100):
        nu = float(rng.uniform(1.0, 20.0))
        x = float(rng.uniform(0.5, 30.0))
        jm = bessel_j(nu - 1.0, x)
        j0 = bessel_j(nu, x)
        jp = bessel_j(nu + 1.0, x)
        assert abs(jm + jp - 2.0 * nu / x * j0) <= 1e-9 * max(1.0, abs(j0))


def test_bessel_j_domain_errors():
    """Negative order, negative argument and NaN are rejected."""
    with pytest.raises(DomainException):
        bessel_j(-0.5, 1.0)
    with pytest.raises(DomainException):
        bessel_j(1.0, -1.0)
    with pytest.raises(DomainException):
        bessel_j(math.nan, 1.0)


# ============================================
# Test 3: Bessel I
# ============================================

def test_bessel_i_closed_forms():
    """I_0(0) = 1 and I_{1/2}(1) = sqrt(2/pi) sinh 1."""
    assert bessel_i(0.0, 0.0) == 1.0
    expected = math.sqrt(2.0 / math.pi) * math.sinh(1.0)
    assert bessel_i(0.5, 1.0) == pytest.approx(expected, rel=1e-12)


def test_bessel_i_tabulated():
    """I_2(0.5) against its power-series value."""
    assert bessel_i(2.0, 0.5) == pytest.approx(special.iv(2.0, 0.5), rel=1e-12)
    # the four-term series sums to 0.0319061; 0.0319053 is a common misprint
    assert bessel_i(2.0, 0.5) == pytest.approx(0.03190615, rel=1e-6)


@pytest.mark.parametrize("nu", [0.0, 0.4, 1.0, 2.5, 12.0, 40.0])
@pytest.mark.parametrize("x", [0.1, 2.0, 25.0, 45.0, 120.0])
def test_bessel_i_scaled_against_scipy(nu, x):
    """exp(-x) I_nu(x) matches scipy's ive."""
    assert bessel_i_scaled(nu, x) == pytest.approx(special.ive(nu, x), rel=1e-10, abs=1e-300)


@pytest.mark.parametrize(
    "nu, x", [(30.5, 35.0), (45.0, 40.0), (60.5, 40.0), (120.3, 60.0), (0.0, 500.0)]
)
def test_bessel_i_scaled_large_argument(nu, x):
    """Large x with orders on either side of x, where the heat kernel lives."""
    assert bessel_i_scaled(nu, x) == pytest.approx(special.ive(nu, x), rel=1e-10)



def test_bessel_i_overflow_is_domain_error():
    """Unscaled I overflows past x ~ 710 and says so."""
    with pytest.raises(DomainException):
        bessel_i(0.0, 800.0)
    assert math.isfinite(bessel_i_scaled(0.0, 800.0))


def test_bessel_i_matches_j_on_imaginary_axis():
    """I_n(x) = i^{-n} J_n(ix) for integer n, using the scipy complex J as oracle."""
    for n in (0, 1, 2, 3):
        for x in (0.3, 1.7, 4.0):
            via_j = (1j) ** (-n) * special.jv(n, 1j * x)
            assert bessel_i(float(n), x) == pytest.approx(via_j.real, rel=1e-10)


# ============================================
# Test 4: Complex erfc
# ============================================

def test_erfc_real_values():
    """erfc(0) = 1 and erfc(-1) = 2 - erfc(1)."""
    assert erfc_cplx(0.0) == pytest.approx(1.0, abs=1e-15)
    assert erfc_cplx(-1.0) == pytest.approx(1.8427007929497148, rel=1e-13)


@pytest.mark.parametrize(
    "z",
    [1 + 1j, 0.5 - 0.2j, 2.0 * cmath.exp(0.25j * math.pi), 3.5 * cmath.exp(-0.25j * math.pi),
     -1.2 + 0.7j, 6.0 + 6.0j, 0.1j, 1.4 + 3.0j],
)
def test_erfc_against_scipy(z):
    """Complex erfc across both evaluation branches and the reflected half-plane."""
    expected = complex(special.erfc(z))
    got = erfc_cplx(z)
    assert abs(got - expected) <= 1e-12 * max(1.0, abs(expected))


def test_erfc_reflection_and_conjugation():
    """erfc(z) + erfc(-z) = 2 and erfc(conj z) = conj erfc(z) on the 45 degree rays."""
    for r in np.linspace(0.25, 4.0, 16):
        for angle in (0.25, -0.25, 0.75, -0.75):
            z = complex(r * math.cos(angle * math.pi), r * math.sin(angle * math.pi))
            assert abs(erfc_cplx(z) + erfc_cplx(-z) - 2.0) <= 1e-12
            assert abs(erfc_cplx(z.conjugate()) - erfc_cplx(z).conjugate()) <= 1e-12


def test_erfc_asymptotic_remainder():
    """On the 45 degree ray the one-term remainder is about the first omitted term."""
    for s in np.linspace(5.0, 12.0, 8):
        z = cmath.exp(0.25j * math.pi) * s
        lead = erfc_asymptotic(z, terms=1)
        assert abs(erfc_cplx(z) - lead) <= 1.1 * abs(lead) / (2.0 * abs(z) ** 2)
        assert abs(erfc_cplx(z) - erfc_asymptotic(z, terms=4)) < abs(erfc_cplx(z) - lead)


def test_erfc_respects_looser_config():
    """A looser configuration still lands within its own tolerance."""
    cfg = SpecFunConfig(rel_tol=1e-6)
    assert abs(erfc_cplx(1 + 1j, cfg) - complex(special.erfc(1 + 1j))) <= 1e-6


def test_erfc_domain_errors():
    """Non-finite input and a zero argument for the asymptotic series."""
    with pytest.raises(DomainException):
        erfc_cplx(complex(math.nan, 0.0))
    with pytest.raises(DomainException):
        erfc_asymptotic(0j)


# ============================================
# Test 5: Cotangent
# ============================================

def test_cot_matches_definition():
    """cot = cos/sin for moderate complex arguments."""
    z = np.array([0.3 + 0.2j, -1.1 + 0.05j, 2.0 - 0.7j, 0.7 - 3.0j])
    expected = np.cos(z) / np.sin(z)
    assert np.allclose(cot_cplx(z), expected, rtol=1e-13, atol=0)


def test_cot_large_imaginary_part():
    """cot tends to -i in the upper half-plane and +i in the lower, without overflow."""
    z = np.array([0.4 + 800.0j, 0.4 - 800.0j])
    out = cot_cplx(z)
    assert np.all(np.isfinite(out))
    assert out[0] == pytest.approx(-1j, abs=1e-15)
    assert out[1] == pytest.approx(1j, abs=1e-15)
