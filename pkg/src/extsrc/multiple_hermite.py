"""Multiple Hermite polynomials and the matrices Psi, Y built from them.

The weights are  w1(x) = exp(-N(x^2/2 - a x)),  w2(x) = exp(-N(x^2/2 + a x)).
P_{n1,n2} is the monic polynomial of degree n1 + n2 orthogonal to x^j w1 for
j < n1 and to x^j w2 for j < n2.

Polynomial values are propagated along the staircase (0,0) -> (1,0) -> (1,1)
-> ... by the 3x3 transfer matrices acting on (P_{n1,n2}, P_{n1-1,n2},
P_{n1,n2-1}).  The Cauchy-transform columns of Psi are recessive and are
always obtained by direct quadrature at the requested index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import mpmath as mp
import numpy as np

from . import _mp
from .errors import DomainError, PrecisionError
from .numerics import ScaledComplex, ScaledReal, cauchy_plus, gauss_legendre

__all__ = [
    "EnsembleParams",
    "TransferMatrices",
    "transfer_matrices",
    "eval_P",
    "eval_P_scaled",
    "poly_state",
    "h_constant",
    "moment",
    "moment_mp",
    "moment_quadrature",
    "PsiMatrix",
    "psi_plus",
    "y_plus",
    "det_scaled",
    "ode_residual",
    "transfer_check",
    "monic_coefficients",
    "coefficient_identities",
]


@dataclass(frozen=True)
class EnsembleParams:
    """Ensemble parameters (a, n1, n2, N); ``N`` defaults to n = n1 + n2."""

    a: float
    n1: int
    n2: int
    N: float | None = None

    def __post_init__(self):
        if self.n1 < 0 or self.n2 < 0:
            raise DomainError("n1 and n2 must be nonnegative")
        if self.N is None:
            object.__setattr__(self, "N", float(max(self.n1 + self.n2, 1)))
        if not self.N > 0:
            raise DomainError("N must be positive")

    @classmethod
    def theorem(cls, a: float, n: int) -> "EnsembleParams":
        """Parameters of the main theorems: n even, n1 = n2 = n/2, N = n."""
        if n <= 0 or n % 2:
            raise DomainError("theorem mode needs a positive even n")
        return cls(float(a), n // 2, n // 2, float(n))

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def theorem_mode(self) -> bool:
        return self.n1 == self.n2 and self.N == self.n and self.n % 2 == 0 and self.n > 0

    def shifted(self, d1: int, d2: int) -> "EnsembleParams":
        """Same weights (a, N) at index (n1 + d1, n2 + d2)."""
        return EnsembleParams(self.a, self.n1 + d1, self.n2 + d2, self.N)


# ---------------------------------------------------------------------------
# Transfer matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransferMatrices:
    """U (n1 -> n1+1), U_tilde (n2 -> n2+1) and the ODE coefficient A at index (n1, n2)."""

    params: EnsembleParams

    def U(self, z):
        p = self.params
        c, d = p.n1 / p.N, p.n2 / p.N
        return np.array([[z - p.a, -c, -d], [1, 0, 0], [1, 0, -2 * p.a]], dtype=complex)

    def U_tilde(self, z):
        p = self.params
        c, d = p.n1 / p.N, p.n2 / p.N
        return np.array([[z + p.a, -c, -d], [1, 2 * p.a, 0], [1, 0, 0]], dtype=complex)

    def A_mat(self, z):
        p = self.params
        return np.array([[-z, p.n1 / p.N, p.n2 / p.N], [-1, -p.a, 0], [-1, 0, p.a]],
                        dtype=complex)


def transfer_matrices(params: EnsembleParams) -> TransferMatrices:
    return TransferMatrices(params)


def _staircase(n1: int, n2: int):
    """Sequence of steps (1 for n1, 2 for n2) from (0,0) to (n1,n2), alternating."""
    steps = []
    i = j = 0
    while i < n1 or j < n2:
        if i < n1 and (i <= j or j >= n2):
            steps.append(1)
            i += 1
        else:
            steps.append(2)
            j += 1
    return steps


def poly_state(params: EnsembleParams, z):
    """(P_{n1,n2}, P_{n1-1,n2}, P_{n1,n2-1}) at z as (unit, log_scale).

    Returns ``unit`` of shape (3,) + z.shape with max-norm one per point and
    ``log_scale`` of shape z.shape, value = unit * exp(log_scale).  Entries with
    a negative index are zero.
    """
    z = np.asarray(z)
    dtype = complex if np.iscomplexobj(z) else float
    a, N = params.a, params.N
    v = np.zeros((3,) + z.shape, dtype=dtype)
    v[0] = 1.0
    log_scale = np.zeros(z.shape)
    i = j = 0
    for step in _staircase(params.n1, params.n2):
        c, d = i / N, j / N
        p0, p1, p2 = v
        if step == 1:
            new = (z - a) * p0 - c * p1 - d * p2
            third = p0 - 2 * a * p2 if j > 0 else np.zeros_like(p0)
            v = np.stack([new, p0, third])
            i += 1
        else:
            new = (z + a) * p0 - c * p1 - d * p2
            second = p0 + 2 * a * p1 if i > 0 else np.zeros_like(p0)
            v = np.stack([new, second, p0])
            j += 1
        m = np.max(np.abs(v), axis=0)
        m = np.where(m > 0, m, 1.0)
        v = v / m
        log_scale = log_scale + np.log(m)
    return v, log_scale


def eval_P_scaled(params: EnsembleParams, z):
    """P_{n1,n2}(z) as (mantissa, log_scale) arrays, value = mantissa * exp(log_scale)."""
    v, ls = poly_state(params, z)
    return v[0], ls


def eval_P(params: EnsembleParams, z):
    """Monic multiple Hermite polynomial P_{n1,n2}(z).

    Returns a :class:`ScaledReal` for real ``z`` and a :class:`ScaledComplex`
    otherwise, so values beyond the double range are representable.
    """
    if isinstance(z, complex) and z.imag != 0:
        m, ls = eval_P_scaled(params, np.asarray(z))
        return ScaledComplex.from_parts(complex(m), float(ls))
    m, ls = eval_P_scaled(params, np.asarray(float(np.real(z))))
    return ScaledReal.from_parts(float(m), float(ls))


# ---------------------------------------------------------------------------
# Integrals against the weights
# ---------------------------------------------------------------------------

def _window(params: EnsembleParams, k: int, power: int = 0):
    """Quadrature window (center, half-width) for P x^power w_k.

    Starts from max(8, sqrt(72/N)) around the weight's center and widens until
    the integrand at both ends is below 1e-15 of its peak, since the polynomial
    factor shifts mass outward at small N.
    """
    center = params.a if k == 1 else -params.a
    half = max(8.0, math.sqrt(2.0 * 36.0 / params.N))
    for _ in range(12):
        s = np.linspace(center - half, center + half, 801)
        vals, _ = _scaled_integrand(params, k, s, power)
        peak = np.max(np.abs(vals))
        if max(abs(vals[0]), abs(vals[-1])) <= 1e-15 * peak:
            return center, half
        half *= 1.25
    raise PrecisionError("no quadrature window contains the weighted integrand")


def _log_weight(params: EnsembleParams, k: int, s):
    sign = 1.0 if k == 1 else -1.0
    return -params.N * (0.5 * s * s - sign * params.a * s)


def _scaled_integrand(params: EnsembleParams, k: int, s, power: int):
    """P(s) s^power w_k(s) as (mantissa, common log scale)."""
    m, ls = eval_P_scaled(params, s)
    sign = np.sign(s) ** power
    logs = ls + _log_weight(params, k, s) + power * np.log(np.where(s == 0, 1.0, np.abs(s)))
    if power > 0:
        m = np.where(s == 0, 0.0, m * sign)
    g = np.max(logs)
    return m * np.exp(logs - g), g


def scaled_from_mp(x) -> ScaledReal:
    """Exact conversion of an mpmath real to a ScaledReal (mantissa rounded to double)."""
    if x == 0:
        return ScaledReal.zero()
    m, e = mp.frexp(abs(x))
    return ScaledReal(1 if x > 0 else -1, 2.0 * float(m), int(e) - 1)


def moment_mp(params: EnsembleParams, k: int, j: int):
    """The integral of P_{n1,n2}(x) x^j w_k(x) as an mpmath number (exact quadrature)."""
    n = params.n
    dps = _mp.working_dps(n + j)
    m = (n + j) // 2 + 1
    with mp.workdps(dps):
        a, N = mp.mpf(params.a), mp.mpf(params.N)
        nodes, weights = _mp.weight_nodes(a, N, k, m, dps)
        total = mp.fsum(w * _mp.poly_state(params.n1, params.n2, a, N, s)[0] * s ** j
                        for s, w in zip(nodes, weights))
        return +total


def moment(params: EnsembleParams, k: int, j: int) -> ScaledReal:
    """The integral of P_{n1,n2}(x) x^j w_k(x) over the real line.

    Evaluated by Gauss-Hermite quadrature in extended precision, which is exact
    for the polynomial integrand; see :func:`moment_quadrature` for the
    double-precision window rule.
    """
    return scaled_from_mp(moment_mp(params, k, j))


def moment_quadrature(params: EnsembleParams, k: int, j: int, order: int = 24,
                      panels: int = 24) -> ScaledReal:
    """Double-precision Gauss-Legendre version of :func:`moment` on a Gaussian window.

    Accurate when the integrand does not cancel strongly (balanced indices);
    kept as an independent cross-check of the exact rule.
    """
    center, half = _window(params, k, j)
    rule = gauss_legendre(center - half, center + half, order, panels)
    vals, g = _scaled_integrand(params, k, rule.nodes, j)
    total = math.fsum(rule.weights * vals)
    return ScaledReal.from_parts(total, g)


def h_constant(params: EnsembleParams, k: int) -> ScaledReal:
    """h^{(k)}_{n1,n2}: the first non-vanishing moment of P_{n1,n2} against w_k."""
    if k not in (1, 2):
        raise DomainError("k must be 1 or 2")
    return moment(params, k, params.n1 if k == 1 else params.n2)


# ---------------------------------------------------------------------------
# Psi and Y on the real line
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiMatrix:
    """3x3 matrix with entries mantissa[i, j] * exp(log_scale[i, j]).

    Rows correspond to the indices (n1, n2), (n1-1, n2), (n1, n2-1); rows with a
    negative index are zero.  ``at_x`` is the evaluation point.
    """

    mantissa: np.ndarray
    log_scale: np.ndarray
    at_x: complex
    index: tuple

    def entry(self, i: int, j: int) -> ScaledComplex:
        return ScaledComplex.from_parts(self.mantissa[i, j], self.log_scale[i, j])

    def to_array(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.mantissa * np.exp(self.log_scale)

    def column_scaled(self, j: int, ref: float | None = None):
        """Column j as plain complex numbers relative to exp(ref)."""
        if ref is None:
            ref = float(np.max(np.where(self.mantissa[:, j] != 0, self.log_scale[:, j], -np.inf)))
        return self.mantissa[:, j] * np.exp(self.log_scale[:, j] - ref), ref


def _cauchy_entry(params: EnsembleParams, k: int, x: complex):
    """C(P w_k)(x) (upper boundary value on the axis) as (mantissa, log scale)."""
    center, half = _window(params, k)
    lo_hi = (center - half, center + half)
    probe = gauss_legendre(*lo_hi, 24, 24).nodes
    _, g = _scaled_integrand(params, k, probe, 0)

    def f(s):
        m, ls = eval_P_scaled(params, s)
        return m * np.exp(ls + _log_weight(params, k, s) - g)

    if np.imag(x) == 0:
        xr = float(np.real(x))
        if lo_hi[0] < xr < lo_hi[1]:
            val = cauchy_plus(f, xr, half, center=center, order=24, panels=24)
        else:
            val = _cauchy_direct(f, complex(xr), lo_hi)
    else:
        val = _cauchy_direct(f, complex(x), lo_hi)
    return val, g


def _cauchy_direct(f, z: complex, lo_hi):
    rule = gauss_legendre(*lo_hi, 24, 24)
    vals = f(rule.nodes)
    return np.sum(rule.weights * vals / (rule.nodes - z)) / (2j * math.pi)


def psi_plus(params: EnsembleParams, x) -> PsiMatrix:
    """Psi_{n1,n2}(x), the upper boundary value for real x.

    Column 1 holds the polynomials times exp(-N x^2/2); columns 2 and 3 hold the
    Cauchy transforms of P w1, P w2 times exp(-N a x), exp(+N a x).  Complex x
    gives the value off the axis.
    """
    if params.n1 < 1 or params.n2 < 1:
        raise DomainError("psi_plus needs n1, n2 >= 1")
    x = complex(x)
    a, N = params.a, params.N
    mant = np.zeros((3, 3), dtype=complex)
    logs = np.zeros((3, 3))
    rows = [params, params.shifted(-1, 0), params.shifted(0, -1)]
    for i, rp in enumerate(rows):
        zarg = np.asarray(x) if x.imag else np.asarray(x.real)
        m, ls = eval_P_scaled(rp, zarg)
        mant[i, 0] = complex(m)
        logs[i, 0] = float(ls) + (-0.5 * N * x * x).real
        mant[i, 0] *= np.exp(1j * (-0.5 * N * x * x).imag)
        for j, k in ((1, 1), (2, 2)):
            val, g = _cauchy_entry(rp, k, x)
            expo = -N * a * x if k == 1 else N * a * x
            mant[i, j] = val * np.exp(1j * expo.imag)
            logs[i, j] = g + expo.real
    r = np.abs(mant)
    nz = r > 0
    logs = np.where(nz, logs + np.log(np.where(nz, r, 1.0)), 0.0)
    mant = np.where(nz, mant / np.where(nz, r, 1.0), 0.0)
    return PsiMatrix(mant, logs, x, (params.n1, params.n2, params.N))


def y_plus(params: EnsembleParams, psi: PsiMatrix) -> PsiMatrix:
    """Y = diag(1, c1, c2) Psi diag(e^{N x^2/2}, e^{N a x}, e^{-N a x}), same scaled storage.

    c1 = -2 pi i / h^{(1)}_{n1-1,n2},  c2 = -2 pi i / h^{(2)}_{n1,n2-1}.
    """
    x = psi.at_x
    a, N = params.a, params.N
    h1 = h_constant(params.shifted(-1, 0), 1)
    h2 = h_constant(params.shifted(0, -1), 2)
    row_log = np.array([0.0, math.log(2 * math.pi) - h1.log_abs(), math.log(2 * math.pi) - h2.log_abs()])
    row_ph = np.array([1.0, -1j * h1.sign, -1j * h2.sign])
    col_expo = np.array([0.5 * N * x * x, N * a * x, -N * a * x])
    mant = psi.mantissa * row_ph[:, None] * np.exp(1j * col_expo.imag)[None, :]
    logs = psi.log_scale + row_log[:, None] + col_expo.real[None, :]
    return PsiMatrix(mant, logs, x, psi.index)


def det_scaled(m: PsiMatrix) -> ScaledComplex:
    """Determinant of a scaled 3x3 matrix by the permutation expansion in log space."""
    terms = []
    for perm in permutations(range(3)):
        sign = _perm_sign(perm)
        mant = sign * np.prod([m.mantissa[i, perm[i]] for i in range(3)])
        lg = sum(m.log_scale[i, perm[i]] for i in range(3))
        if mant != 0:
            terms.append((mant, lg))
    if not terms:
        return ScaledComplex(0j, 0.0)
    g = max(t[1] for t in terms)
    total = sum(t[0] * math.exp(t[1] - g) for t in terms)
    return ScaledComplex.from_parts(total, g)


def _perm_sign(perm) -> int:
    sign = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Structure checks
# ---------------------------------------------------------------------------

def _column_relative_error(lhs: PsiMatrix, rhs_mant: np.ndarray, rhs_log: np.ndarray) -> float:
    """max over columns of max_i |lhs - rhs| / max_i |rhs| with a per-column scale."""
    worst = 0.0
    for j in range(3):
        ref = float(np.max(np.where(rhs_mant[:, j] != 0, rhs_log[:, j], -np.inf)))
        if not math.isfinite(ref):
            continue
        r = rhs_mant[:, j] * np.exp(rhs_log[:, j] - ref)
        l = lhs.mantissa[:, j] * np.exp(lhs.log_scale[:, j] - ref)
        worst = max(worst, float(np.max(np.abs(l - r)) / np.max(np.abs(r))))
    return worst


def ode_residual(params: EnsembleParams, x: float, step: float) -> float:
    """Relative residual of Psi' = N A Psi with a centered difference of width ``step``."""
    if not 1e-6 <= step <= 1e-2:
        raise DomainError("step must lie in [1e-6, 1e-2]")
    psi0 = psi_plus(params, x)
    psi_p = psi_plus(params, x + step)
    psi_m = psi_plus(params, x - step)
    A = transfer_matrices(params).A_mat(x)
    worst = 0.0
    for j in range(3):
        c0, ref = psi0.column_scaled(j)
        cp, _ = psi_p.column_scaled(j, ref)
        cm, _ = psi_m.column_scaled(j, ref)
        deriv = (cp - cm) / (2 * step)
        rhs = params.N * (A @ c0)
        worst = max(worst, float(np.max(np.abs(deriv - rhs)) / np.max(np.abs(rhs))))
    return worst


def _apply(matrix: np.ndarray, psi: PsiMatrix):
    """matrix @ psi in scaled storage (column-wise common scale)."""
    mant = np.zeros((3, 3), dtype=complex)
    logs = np.zeros((3, 3))
    for j in range(3):
        col, ref = psi.column_scaled(j)
        mant[:, j] = matrix @ col
        logs[:, j] = ref
    return mant, logs


def transfer_check(params: EnsembleParams, z) -> float:
    """Max column-relative discrepancy of Psi_{n1+1,n2} = U Psi and Psi_{n1,n2+1} = U~ Psi."""
    tm = transfer_matrices(params)
    psi = psi_plus(params, z)
    up = psi_plus(params.shifted(1, 0), z)
    right = psi_plus(params.shifted(0, 1), z)
    m1, l1 = _apply(tm.U(complex(z)), psi)
    m2, l2 = _apply(tm.U_tilde(complex(z)), psi)
    return max(_column_relative_error(up, m1, l1), _column_relative_error(right, m2, l2))


# ---------------------------------------------------------------------------
# Coefficients from moments (independent of the recurrences)
# ---------------------------------------------------------------------------

def _gaussian_moments(mu: float, N: float, count: int):
    """E[(mu + Z/sqrt(N))^m], m < count, in mpmath precision."""
    sig2 = mp.mpf(1) / N
    out = []
    for m in range(count):
        s = mp.mpf(0)
        for r in range(0, m + 1, 2):
            s += mp.binomial(m, r) * mp.mpf(mu) ** (m - r) * sig2 ** (r // 2) * mp.fac2(r - 1)
        out.append(s)
    return out


def monic_coefficients(params: EnsembleParams, dps: int = 50) -> np.ndarray:
    """Coefficients of P_{n1,n2} (highest degree first), from the orthogonality conditions.

    Solves the linear moment system in extended precision; limited to n <= 12.
    """
    n = params.n
    if n > 12:
        raise DomainError("coefficients are exposed for n <= 12 only")
    if n == 0:
        return np.array([1.0])
    with mp.workdps(dps):
        N = mp.mpf(params.N)
        m1 = _gaussian_moments(mp.mpf(params.a), N, 2 * n + 1)
        m2 = _gaussian_moments(-mp.mpf(params.a), N, 2 * n + 1)
        rows, rhs = [], []
        for mom, nk in ((m1, params.n1), (m2, params.n2)):
            for j in range(nk):
                rows.append([mom[j + i] for i in range(n)])
                rhs.append(-mom[j + n])
        sol = mp.lu_solve(mp.matrix(rows), mp.matrix(rhs))
        coef = [1.0] + [float(sol[i]) for i in range(n - 1, -1, -1)]
    return np.array(coef)


def coefficient_identities(params: EnsembleParams) -> dict:
    """Recurrence coefficients b, b~, c, d, e, e~ at (n1, n2) from their defining ratios.

    c, d, e, e~ are h-ratios; b and b~ come from subleading coefficients of
    moment-solved polynomials, P_{n1+1,n2} = (z - b) P_{n1,n2} + lower terms.
    Requires n1, n2 >= 1 and n + 1 <= 12.
    """
    p = params
    if p.n1 < 1 or p.n2 < 1:
        raise DomainError("coefficient identities need n1, n2 >= 1")
    ratio = lambda u, v: (u / v).to_float()
    c = ratio(h_constant(p, 1), h_constant(p.shifted(-1, 0), 1))
    d = ratio(h_constant(p, 2), h_constant(p.shifted(0, -1), 2))
    e = ratio(h_constant(p.shifted(1, -1), 2), h_constant(p.shifted(0, -1), 2))
    e_t = ratio(h_constant(p.shifted(-1, 1), 1), h_constant(p.shifted(-1, 0), 1))
    s0 = monic_coefficients(p)[1]
    b = s0 - monic_coefficients(p.shifted(1, 0))[1]
    b_t = s0 - monic_coefficients(p.shifted(0, 1))[1]
    return {"b": b, "b_tilde": b_t, "c": c, "d": d, "e": e, "e_tilde": e_t}
