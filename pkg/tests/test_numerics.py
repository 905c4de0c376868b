import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from extsrc.errors import DomainError, EvaluationError, PrecisionError
from extsrc.numerics import (ScaledComplex, ScaledReal, airy, airy_array, airy_kernel, cauchy_plus,
                             gauss_legendre, integrate, normalize_vector)


# ScaledReal -----------------------------------------------------------------

@given(st.floats(allow_nan=False, allow_infinity=False))
def test_scaled_real_round_trip(x):
    s = ScaledReal.from_float(x)
    assert s.to_float() == x
    if x != 0:
        assert 1.0 <= s.mantissa < 2.0


def test_scaled_real_beyond_double_range():
    big = ScaledReal.from_log(1000.0)
    prod = big * big
    assert prod.log_abs() == pytest.approx(2000.0, rel=1e-14)
    assert (prod / big).log_abs() == pytest.approx(1000.0, rel=1e-14)
    assert big.to_float() == math.inf
    assert ScaledReal.from_log(-1000.0).to_float() == 0.0


@settings(max_examples=200)
@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_scaled_real_arithmetic_matches_floats(x, y):
    a, b = ScaledReal.from_float(x), ScaledReal.from_float(y)
    assert (a + b).to_float() == pytest.approx(x + y, abs=1e-9 * (abs(x) + abs(y)) + 1e-300)
    assert (a - b).to_float() == pytest.approx(x - y, abs=1e-9 * (abs(x) + abs(y)) + 1e-300)
    assert (a * b).to_float() == pytest.approx(x * y, rel=1e-15)
    if y != 0:
        assert (a / b).to_float() == pytest.approx(x / y, rel=1e-15)


def test_scaled_real_invariants():
    with pytest.raises(ValueError):
        ScaledReal(1, 2.5, 0)
    assert ScaledReal.zero().to_float() == 0.0
    assert (-ScaledReal.from_float(3.0)).to_float() == -3.0
    assert ScaledReal.from_parts(-0.5, math.log(4.0)).to_float() == pytest.approx(-2.0)


def test_scaled_complex():
    z = ScaledComplex.from_parts(3 + 4j, 2.0)
    assert abs(z.mantissa) == pytest.approx(1.0)
    assert z.to_complex() == pytest.approx((3 + 4j) * math.exp(2.0))
    assert (z * z).to_complex() == pytest.approx(((3 + 4j) * math.exp(2.0)) ** 2)
    assert z.real.to_float() == pytest.approx(3 * math.exp(2.0))


# normalize_vector -----------------------------------------------------------

def test_normalize_examples():
    u, ls, deg = normalize_vector([1.0, 0.0, 0.0])
    assert list(u) == [1.0, 0.0, 0.0] and ls == 0.0 and not deg
    u, ls, deg = normalize_vector([math.exp(100), math.exp(99), 0.0])
    assert ls == pytest.approx(100.0, rel=1e-15)
    assert u == pytest.approx([1.0, math.exp(-1), 0.0], rel=1e-14)
    u, ls, deg = normalize_vector([0.0, 0.0, 0.0])
    assert deg and not np.any(u)


def test_normalize_round_trip_wide_range():
    rng = np.random.default_rng(3)
    for _ in range(100):
        v = rng.normal(size=5) * 2.0 ** rng.integers(-300, 300, size=5)
        u, ls, _ = normalize_vector(v)
        assert np.max(np.abs(u)) == 1.0
        # exp(log m) carries |log m| * eps of rounding
        assert np.exp(ls) * u == pytest.approx(v, rel=4e-16 * (1 + abs(ls)))


# quadrature -----------------------------------------------------------------

def test_integrate_examples():
    assert integrate(lambda x: np.ones_like(x), gauss_legendre(0, 1)) == pytest.approx(1.0, abs=1e-15)
    assert integrate(lambda x: x * x, gauss_legendre(-1, 1)) == pytest.approx(2 / 3, rel=1e-14)
    val = integrate(lambda x: np.exp(-x * x), gauss_legendre(-8, 8, 24, 8))
    assert abs(val - math.sqrt(math.pi)) <= 1e-12


def test_integrate_polynomials_to_design_degree():
    rng = np.random.default_rng(5)
    for _ in range(20):
        lo = rng.uniform(-3, 0)
        hi = lo + rng.uniform(0.5, 4)
        rule = gauss_legendre(lo, hi, 10, int(rng.integers(1, 5)))
        coef = rng.normal(size=rule.degree + 1)
        p = np.polynomial.Polynomial(coef)
        exact = p.integ()(hi) - p.integ()(lo)
        assert integrate(p, rule) == pytest.approx(exact, rel=1e-13, abs=1e-13)


def test_integrate_reports_bad_node():
    with pytest.raises(EvaluationError, match="node"):
        integrate(lambda x: np.where(x == 0, np.inf, x), gauss_legendre(-1, 1, 3))


# cauchy_plus ----------------------------------------------------------------

def test_cauchy_zero_function():
    assert cauchy_plus(lambda s: np.zeros_like(s), 0.3, 10.0) == 0


def test_cauchy_symmetric_gaussian():
    x = 0.7
    val = cauchy_plus(lambda s: np.exp(-(s - x) ** 2), x, 10.0, center=x)
    assert val == pytest.approx(0.5, abs=1e-12)


def test_cauchy_against_closed_form():
    # PV integral of exp(-s^2)/(s - x) = -pi * 2/sqrt(pi) * dawsn(x) * sqrt(pi) = -2 sqrt(pi) D(x)
    x = 0.4
    val = cauchy_plus(lambda s: np.exp(-s * s), x, 10.0)
    pv = -2 * math.sqrt(math.pi) * special.dawsn(x)
    assert val == pytest.approx(pv / (2j * math.pi) + 0.5 * math.exp(-x * x), abs=1e-12)


def test_cauchy_linearity_and_refinement():
    rng = np.random.default_rng(8)
    for _ in range(5):
        c1, c2, al, be = rng.normal(size=4)
        f = lambda s: np.exp(-(s - c1) ** 2)
        g = lambda s: s * np.exp(-((s - c2) ** 2) / 2)
        x = 0.3
        lhs = cauchy_plus(lambda s: al * f(s) + be * g(s), x, 14.0)
        rhs = al * cauchy_plus(f, x, 14.0) + be * cauchy_plus(g, x, 14.0)
        assert lhs == pytest.approx(rhs, abs=1e-13)
        fine = cauchy_plus(f, x, 28.0, panels=32)
        assert abs(fine - cauchy_plus(f, x, 14.0)) <= 1e-10


def test_cauchy_cutoff_too_small():
    with pytest.raises(PrecisionError):
        cauchy_plus(lambda s: np.exp(-s * s), 0.1, 2.0)


# Airy -----------------------------------------------------------------------

def test_airy_at_zero():
    with mp.workdps(30):
        ref = float(mp.mpf(3) ** (-mp.mpf(2) / 3) / mp.gamma(mp.mpf(2) / 3))
    assert airy(0.0).ai == pytest.approx(ref, abs=1e-15)
    assert ref == pytest.approx(0.355028053887817, abs=1e-15)


@pytest.mark.parametrize("x", np.linspace(-100, 100, 81).tolist() + [-6.01, -5.99, 5.99, 6.01])
def test_airy_against_scipy(x):
    ai, aip, _, _ = special.airy(x)
    v = airy(x)
    assert abs(v.ai - ai) <= 1e-10
    assert abs(v.ai_prime - aip) <= 1e-10 * max(1.0, abs(x) ** 0.25)


def test_airy_asymptotic_prefactor():
    # the ratio to the leading term is 1 - 5/(72 zeta) + O(zeta^-2), zeta = (2/3) x^(3/2)
    prev = 1.0
    for x in (20.0, 40.0, 80.0):
        zeta = 2 / 3 * x ** 1.5
        ratio = airy(x).ai * 2 * math.sqrt(math.pi) * x ** 0.25 * math.exp(zeta)
        assert ratio == pytest.approx(1 - 5 / (72 * zeta), abs=2 / zeta ** 2)
        assert abs(ratio - 1) < prev
        prev = abs(ratio - 1)
    assert prev < 1e-3


@pytest.mark.parametrize("x", [-5.0, -1.0, 0.0, 1.0, 5.0])
def test_airy_ode_residual(x):
    h = 1e-5
    dd = (airy(x + h).ai_prime - airy(x - h).ai_prime) / (2 * h)
    assert abs(dd - x * airy(x).ai) / (1 + abs(airy(x).ai)) <= 1e-8
    fd = (airy(x + h).ai - airy(x - h).ai) / (2 * h)
    assert fd == pytest.approx(airy(x).ai_prime, abs=1e-8)


def test_airy_positive_decreasing():
    xs = np.linspace(0, 20, 201)
    ai, _ = airy_array(xs)
    assert np.all(ai > 0) and np.all(np.diff(ai) < 0)


def test_airy_domain():
    with pytest.raises(DomainError):
        airy(100.5)


def test_airy_kernel_diagonal_and_symmetry():
    u, v = 0.3, -1.2
    assert airy_kernel(u, v) == pytest.approx(airy_kernel(v, u), rel=1e-12)
    a = airy(u)
    assert airy_kernel(u, u) == pytest.approx(a.ai_prime ** 2 - u * a.ai ** 2, rel=1e-12)
    assert airy_kernel(u, u + 1e-6) == pytest.approx(airy_kernel(u, u), rel=1e-5)
