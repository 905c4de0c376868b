import math

import numpy as np
import pytest
from scipy import integrate

from extsrc.errors import DomainError
from extsrc.multiple_hermite import (EnsembleParams, coefficient_identities, det_scaled, eval_P, h_constant,
                                     moment, moment_quadrature, monic_coefficients, ode_residual, psi_plus,
                                     transfer_check, transfer_matrices, y_plus)

A = 2.0


def P(n1, n2, z, N=3.0, a=A):
    v = eval_P(EnsembleParams(a, n1, n2, N), z)
    return v.to_complex() if isinstance(z, complex) else v.to_float()


def direct_moment(params, k, j):
    """Adaptive quadrature of P x^j w_k, an oracle independent of the exact rule."""
    sign = 1 if k == 1 else -1
    c = sign * params.a
    f = lambda x: P(params.n1, params.n2, x, params.N, params.a) * x ** j * math.exp(
        -params.N * (0.5 * (x - c) ** 2))
    val, _ = integrate.quad(f, c - 12, c + 12, limit=200, epsabs=1e-14, epsrel=1e-12)
    return val * math.exp(params.N * params.a ** 2 / 2)


# params ---------------------------------------------------------------------

def test_params_validation():
    assert EnsembleParams(2.0, 3, 1).N == 4.0
    assert EnsembleParams.theorem(2.0, 8).theorem_mode
    assert not EnsembleParams(2.0, 3, 1).theorem_mode
    with pytest.raises(DomainError):
        EnsembleParams.theorem(2.0, 7)
    with pytest.raises(DomainError):
        EnsembleParams(2.0, -1, 0)


def test_transfer_matrix_entries():
    tm = transfer_matrices(EnsembleParams(A, 2, 1, 4.0))
    z = 0.7
    assert tm.U(z).real == pytest.approx(np.array([[z - A, -0.5, -0.25], [1, 0, 0], [1, 0, -2 * A]]))
    assert tm.U_tilde(z).real == pytest.approx(np.array([[z + A, -0.5, -0.25], [1, 2 * A, 0], [1, 0, 0]]))
    assert tm.A_mat(z).real == pytest.approx(np.array([[-z, 0.5, 0.25], [-1, -A, 0], [-1, 0, A]]))


# polynomials ----------------------------------------------------------------

def test_low_degree():
    for z in (-1.3, 0.0, 2.5):
        assert P(0, 0, z) == 1.0
        assert P(1, 0, z) == pytest.approx(z - A, abs=1e-14)
        assert P(0, 1, z) == pytest.approx(z + A, abs=1e-14)


def test_p10_orthogonality_by_quadrature():
    params = EnsembleParams(A, 1, 0, 3.0)
    assert abs(direct_moment(params, 1, 0)) <= 1e-10 * direct_moment(EnsembleParams(A, 0, 0, 3.0), 1, 0)


def test_recurrence_scalar_consequences():
    N = 3.0
    for z in (-2.0, -0.5, 0.3, 1.7, 3.1):
        lhs = P(2, 1, z, N)
        rhs = (z - A) * P(1, 1, z, N) - P(0, 1, z, N) / N - P(1, 0, z, N) / N
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
        assert P(2, 0, z, N) == pytest.approx(P(1, 1, z, N) - 2 * A * P(1, 0, z, N), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n1,n2", [(3, 2), (4, 4), (7, 5)])
def test_parity_symmetry(n1, n2):
    rng = np.random.default_rng(n1 * 10 + n2)
    for z in rng.normal(size=5) * 2 + 1j * rng.normal(size=5):
        z = complex(z)
        assert P(n1, n2, -z) == pytest.approx((-1) ** (n1 + n2) * P(n2, n1, z), rel=1e-11)


@pytest.mark.parametrize("n1,n2", [(2, 2), (5, 3), (8, 8)])
def test_monic(n1, n2):
    z = 1e3
    m = eval_P(EnsembleParams(A, n1, n2, 5.0), z)
    assert math.exp(m.log_abs() - (n1 + n2) * math.log(z)) == pytest.approx(1.0, abs=0.05)
    assert m.sign == 1
    coef = monic_coefficients(EnsembleParams(A, n1, n2, 5.0)) if n1 + n2 <= 12 else None
    if coef is not None:
        for x in (-1.1, 0.4, 2.2):
            assert np.polyval(coef, x) == pytest.approx(P(n1, n2, x, 5.0), rel=1e-9, abs=1e-9)


def test_large_values_representable():
    v = eval_P(EnsembleParams.theorem(3.0, 64), 1e6)
    assert v.log_abs() == pytest.approx(64 * math.log(1e6), rel=1e-6)


# moments and h --------------------------------------------------------------

def test_h_closed_forms():
    N = 3.0
    g = math.sqrt(2 * math.pi / N) * math.exp(N * A * A / 2)
    assert h_constant(EnsembleParams(A, 0, 0, N), 1).to_float() == pytest.approx(g, rel=1e-13)
    assert h_constant(EnsembleParams(A, 1, 0, N), 1).to_float() == pytest.approx(g / N, rel=1e-13)
    assert h_constant(EnsembleParams(A, 0, 0, N), 2).to_float() == pytest.approx(g, rel=1e-13)


def test_h_large_scale():
    h = h_constant(EnsembleParams.theorem(3.0, 64), 1)
    assert h.sign == 1 and math.isfinite(h.log_abs()) and h.log_abs() > 200


@pytest.mark.parametrize("n1,n2", [(1, 1), (2, 3), (4, 2)])
def test_moment_against_adaptive_quadrature(n1, n2):
    p = EnsembleParams(A, n1, n2, 4.0)
    for k in (1, 2):
        nk = n1 if k == 1 else n2
        assert moment(p, k, nk).to_float() == pytest.approx(direct_moment(p, k, nk), rel=1e-8)


@pytest.mark.parametrize("n1,n2", [(1, 1), (3, 3), (4, 5)])
def test_moment_double_rule_agrees(n1, n2):
    p = EnsembleParams(A, n1, n2)
    for k in (1, 2):
        nk = n1 if k == 1 else n2
        assert moment_quadrature(p, k, nk).to_float() == pytest.approx(moment(p, k, nk).to_float(), rel=1e-8)


@pytest.mark.parametrize("n1,n2", [(n1, n2) for n1 in range(0, 9, 2) for n2 in range(0, 9, 3)] + [(8, 8)])
def test_orthogonality(n1, n2):
    p = EnsembleParams(A, n1, n2)
    for k, nk in ((1, n1), (2, n2)):
        h = abs(h_constant(p, k).to_float())
        assert h > 0
        for j in range(nk):
            assert abs(moment(p, k, j).to_float()) <= 1e-8 * h


def test_coefficient_identities():
    for n1, n2 in ((1, 1), (2, 2), (3, 2), (2, 4)):
        ids = coefficient_identities(EnsembleParams(A, n1, n2))
        assert ids["b"] == pytest.approx(A, abs=1e-7)
        assert ids["b_tilde"] == pytest.approx(-A, abs=1e-7)
        assert ids["e"] == pytest.approx(-2 * A, abs=1e-7)
        assert ids["e_tilde"] == pytest.approx(2 * A, abs=1e-7)
        assert ids["c"] == pytest.approx(n1 / (n1 + n2), abs=1e-7)
        assert ids["d"] == pytest.approx(n2 / (n1 + n2), abs=1e-7)


# Psi and Y ------------------------------------------------------------------

def test_psi_first_column():
    p = EnsembleParams(A, 2, 2)
    x = 0.8
    psi = psi_plus(p, x)
    col = psi.to_array()[:, 0]
    w = math.exp(-p.N * x * x / 2)
    assert col[0] == pytest.approx(P(2, 2, x, p.N) * w, rel=1e-13)
    assert col[1] == pytest.approx(P(1, 2, x, p.N) * w, rel=1e-13)
    assert col[2] == pytest.approx(P(2, 1, x, p.N) * w, rel=1e-13)


def test_psi_needs_both_indices():
    with pytest.raises(DomainError):
        psi_plus(EnsembleParams(A, 2, 0), 0.5)


@pytest.mark.parametrize("x", [0.0, 1.0, 0.7380174596563811 + 0.1])
def test_det_y_example(x):
    p = EnsembleParams(A, 2, 2)
    assert det_scaled(y_plus(p, psi_plus(p, x))).to_complex() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("n1,n2", [(1, 1), (3, 2), (5, 5), (8, 8)])
def test_det_y_grid(n1, n2):
    p = EnsembleParams(A, n1, n2)
    for x in (-2.5, -0.4, 0.9, 2.1, 3.6):
        assert det_scaled(y_plus(p, psi_plus(p, x))).to_complex() == pytest.approx(1.0, abs=1e-6)


def test_ode_residual_example():
    assert ode_residual(EnsembleParams(A, 1, 1), 1.0, 1e-3) <= 1e-5


def test_ode_residual_order():
    p = EnsembleParams(A, 2, 2)
    r1 = ode_residual(p, 0.6, 2e-3)
    r2 = ode_residual(p, 0.6, 1e-3)
    assert r1 / r2 == pytest.approx(4.0, rel=0.2)
    with pytest.raises(DomainError):
        ode_residual(p, 0.6, 1e-1)


def test_transfer_examples():
    assert transfer_check(EnsembleParams(A, 1, 1), 0.5) <= 1e-7
    assert transfer_check(EnsembleParams(A, 3, 2), -1.2) <= 1e-7
