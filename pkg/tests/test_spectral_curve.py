import math

import mpmath as mp
import numpy as np
import pytest

from extsrc.acceptance import lambda_inequality_margins, lambda_jump_errors
from extsrc.errors import BranchPointError, DomainError, UnsupportedRegimeError
from extsrc.spectral_curve import (band_mass, h_rescale, lambda_at, lambda_values, make_curve, rho,
                                   rho_cdf, track_branches, xi_at, xi_boundary_richardson, xi_values,
                                   z_of_xi)


def closed_form(a):
    """Branch points evaluated in 40-digit arithmetic."""
    with mp.workdps(40):
        a = mp.mpf(a)
        s = mp.sqrt(1 + 8 * a * a)
        p = mp.sqrt(mp.mpf(1) / 2 + a * a - s / 2)
        q = mp.sqrt(mp.mpf(1) / 2 + a * a + s / 2)
        z = lambda x: (x ** 3 - (a * a - 1) * x) / (x * x - a * a)
        return float(p), float(q), float(z(q)), float(z(p))


# construction ---------------------------------------------------------------

@pytest.mark.parametrize("a", [1.1, 1.5, 2.0, 3.0, 10.0])
def test_branch_points_closed_form(a):
    c = make_curve(a)
    p, q, z1, z2 = closed_form(a)
    assert (c.p, c.q, c.z1, c.z2) == pytest.approx((p, q, z1, z2), rel=1e-14)
    for x in (c.p, c.q):
        assert abs(x ** 4 - (1 + 2 * a * a) * x ** 2 + (a * a - 1) * a * a) <= 1e-12 * (1 + x ** 4)
    assert float(z_of_xi(a, c.q)) == pytest.approx(c.z1, abs=1e-12)
    assert float(z_of_xi(a, c.p)) == pytest.approx(c.z2, abs=1e-12)
    assert 0 < c.p < c.q and 0 < c.z2 < c.z1


def test_a3_closed_form():
    c = make_curve(3.0)
    q = math.sqrt(9.5 + math.sqrt(73) / 2)
    assert c.q == pytest.approx(q, rel=1e-14)
    assert c.z1 == pytest.approx(q * (math.sqrt(73) + 3) / (math.sqrt(73) + 1), rel=1e-14)
    assert c.z1 == pytest.approx(4.4887, abs=1e-4)


def test_a2_values(curve):
    assert curve.p == pytest.approx(1.2758207855067207, abs=1e-12)
    assert curve.q == pytest.approx(2.715194527703128, abs=1e-12)
    assert curve.z1 == pytest.approx(3.5203451860921735, abs=1e-12)
    assert curve.z2 == pytest.approx(0.7380174596563811, abs=1e-12)


def test_edge_constants_from_second_derivative(curve):
    a = curve.a
    with mp.workdps(30):
        z = lambda x: (x ** 3 - (a * a - 1) * x) / (x * x - a * a)
        r1 = float(mp.sqrt(2 / mp.diff(z, curve.q, 2)))
        r2 = float(mp.sqrt(2 / abs(mp.diff(z, curve.p, 2))))
    assert curve.rho1 == pytest.approx(r1, rel=1e-12)
    assert curve.rho2 == pytest.approx(r2, rel=1e-12)


@pytest.mark.parametrize("a", [1.0, 0.5, 1.0 + 1e-9])
def test_subcritical_rejected(a):
    with pytest.raises(UnsupportedRegimeError, match="critical"):
        make_curve(a)


# branches -------------------------------------------------------------------

def test_xi_at_infinity(curve):
    z = 1e6
    t = xi_at(curve, z)
    assert t.xi1.real == pytest.approx(z - 1 / z, abs=1e-9)
    assert t.xi2.real == pytest.approx(2 + 1 / (2 * z), abs=1e-11)
    assert t.xi3.real == pytest.approx(-2 + 1 / (2 * z), abs=1e-11)


def test_xi_at_origin(curve):
    t = xi_at(curve, 0.0)
    assert (t.xi1, t.xi2, t.xi3) == pytest.approx((0, math.sqrt(3), -math.sqrt(3)), abs=1e-14)
    # continuation from infinity agrees just above the origin
    tracked = track_branches(curve, np.array([1e-9j]))[:, 0]
    assert tracked == pytest.approx([0, math.sqrt(3), -math.sqrt(3)], abs=1e-8)


def test_root_identities(curve):
    rng = np.random.default_rng(1)
    z = rng.normal(size=1000) * 3 + 1j * rng.normal(size=1000) * 3
    x1, x2, x3 = xi_values(curve, z)
    a2 = curve.a ** 2
    scale = 1 + np.abs(z)
    assert np.max(np.abs(x1 + x2 + x3 - z) / scale) <= 1e-12
    assert np.max(np.abs(x1 * x2 + x1 * x3 + x2 * x3 + (a2 - 1)) / scale ** 2) <= 1e-12
    assert np.max(np.abs(x1 * x2 * x3 + z * a2) / scale ** 3) <= 1e-12


def test_conjugate_symmetry(curve):
    z = np.array([0.3 + 0.4j, 2.5 + 0.01j, -3.0 + 2j, 5 + 0.1j])
    assert np.conj(xi_values(curve, np.conj(z))) == pytest.approx(xi_values(curve, z), abs=1e-12)


def test_axis_labels_agree_with_continuation(curve):
    x = np.array([-5.0, -3.0, -2.0, -1.0, -0.3, 0.2, 1.0, 2.0, 3.3, 4.0, 6.0])
    for side in (1, -1):
        on_axis = xi_values(curve, x, side)
        assert xi_boundary_richardson(curve, x, side) == pytest.approx(on_axis, abs=1e-9)


def test_cut_needs_side(curve):
    with pytest.raises(DomainError):
        xi_values(curve, np.array(2.0))


def test_branch_point_proximity(curve):
    with pytest.raises(BranchPointError):
        xi_at(curve, curve.z1 + 1e-13, "+")


# density --------------------------------------------------------------------

def test_band_masses(curve):
    assert band_mass(curve, curve.z2, curve.z1) == pytest.approx(0.5, abs=1e-8)
    assert band_mass(curve, -curve.z1, -curve.z2) == pytest.approx(0.5, abs=1e-8)
    assert rho_cdf(curve, curve.z1 + 1) == pytest.approx(1.0, abs=1e-8)


def test_rho_two_sided_formula(curve):
    x = 0.5 * (curve.z1 + curve.z2)
    plus = xi_at(curve, x, "+").xi2
    minus = xi_at(curve, x, "-").xi2
    assert rho(curve, x) > 0
    assert rho(curve, x) == pytest.approx(abs(minus - plus) / (2 * math.pi), rel=1e-12)


def test_rho_support_and_parity(curve):
    assert rho(curve, curve.z1 + 0.5) == 0
    assert rho(curve, 0.0) == 0
    x = np.linspace(0, curve.z1 + 1, 301)
    assert rho(curve, -x) == pytest.approx(rho(curve, x), abs=1e-14)


def test_rho_edge_laws(curve):
    for d in (1e-6, 1e-8):
        assert rho(curve, curve.z1 - d) * math.pi / math.sqrt(d) == pytest.approx(curve.rho1, rel=1e-2)
        assert rho(curve, curve.z2 + d) * math.pi / math.sqrt(d) == pytest.approx(curve.rho2, rel=1e-2)


def test_rho_matches_independent_quadrature(curve):
    from scipy import integrate
    val, _ = integrate.quad(lambda x: rho(curve, x), curve.z2, curve.z1, limit=200)
    assert val == pytest.approx(0.5, abs=1e-7)


# lambda ---------------------------------------------------------------------

def test_lambda_anchors(curve):
    assert abs(lambda_at(curve, 1, curve.z1 + 1e-11)) <= 1e-8
    assert abs(lambda_at(curve, 2, curve.z1 + 1e-11)) <= 1e-8
    assert lambda_at(curve, 3, -curve.z2 + 1e-11) == pytest.approx(
        lambda_at(curve, 1, -curve.z2 + 1e-11, "+"), abs=1e-8)


def test_lambda_constant_at_infinity(curve):
    z = 1e3
    assert lambda_at(curve, 1, z).real - (z * z / 2 - math.log(z)) == pytest.approx(curve.l1, abs=1e-5)


def test_lambda_jump_at_origin(curve):
    d = lambda_at(curve, 1, 0.0, "+") - lambda_at(curve, 1, 0.0, "-")
    assert d == pytest.approx(-1j * math.pi, abs=1e-12)


def test_jump_table():
    assert max(lambda_jump_errors(2.0).values()) <= 1e-8


def test_orderings():
    assert min(lambda_inequality_margins(2.0, m=5).values()) > 0


def test_lambda_derivative_is_xi(curve):
    z = 1.7 + 0.6j
    h = 1e-5
    d = (lambda_at(curve, 2, z + h) - lambda_at(curve, 2, z - h)) / (2 * h)
    assert d == pytest.approx(xi_at(curve, z).xi2, abs=1e-8)


def test_lambda_off_axis_continuity(curve):
    x = 2.4
    on = lambda_values(curve, 1, np.array([x]), 1)[0]
    off = lambda_values(curve, 1, np.array([x + 1e-7j]))[0]
    assert off == pytest.approx(on, abs=1e-6)


# h --------------------------------------------------------------------------

def test_h_continuity_at_z1(curve):
    d = 1e-9
    assert h_rescale(curve, curve.z1 - d) == pytest.approx(h_rescale(curve, curve.z1 + d), abs=1e-8)
    assert h_rescale(curve, curve.z1 + d) == pytest.approx(-curve.z1 ** 2 / 4, abs=1e-8)


def test_h_real_and_derivative(curve):
    x = np.linspace(curve.z2 + 0.1, curve.z1 - 0.1, 9)
    h = h_rescale(curve, x)
    assert np.all(np.isfinite(h)) and h.dtype.kind == "f"
    eps = 1e-5
    fd = (h_rescale(curve, x + eps) - h_rescale(curve, x - eps)) / (2 * eps)
    xi1 = xi_values(curve, x, 1)[0]
    assert fd == pytest.approx(-x / 2 + xi1.real, abs=1e-7)


def test_h_domain(curve):
    with pytest.raises(DomainError):
        h_rescale(curve, 0.0)
    with pytest.raises(DomainError):
        h_rescale(curve, -curve.z1 - 1)
    ext = h_rescale(curve, np.array([-0.4, 0.4, -4.0, 4.0]), extend=True)
    assert ext[0] == pytest.approx(ext[1], abs=1e-10)
    assert ext[2] == pytest.approx(ext[3], abs=1e-10)
    assert h_rescale(curve, curve.z2 - 1e-9, extend=True) == pytest.approx(
        h_rescale(curve, curve.z2 + 1e-9), abs=1e-7)
