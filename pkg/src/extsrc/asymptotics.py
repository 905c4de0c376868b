"""Large-n formulas for P_n in the outer, band and edge regimes.

All approximations are for the theorem scaling n1 = n2 = n/2, N = n and are
stated for P_n(z) exp(-n z^2 / 2).  The building blocks are

* the model solution M(z), whose (j, k) entry is M_j(xi_k(z)) with

      M_1(xi) = (xi^2 - a^2) / R(xi),   M_{2,3}(xi) = -i (xi +- a) / (sqrt(2) R(xi)),
      R(xi)   = sqrt((xi^2 - p^2)(xi^2 - q^2)),

  the root continued from the branch on which M(z) -> I at infinity;
* lambda(z) = lambda1(z) - l1 = z^2/2 - log z + O(z^-2);
* the edge map beta(z) = [(3/4)(lambda1 - lambda2)]^(2/3) near z1.

Errors of the oscillatory regimes are measured against amplitude envelopes so
that zeros of P_n do not produce meaningless relative errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchPointError, DomainError, EvaluationError
from .multiple_hermite import EnsembleParams, eval_P_scaled
from .numerics import ScaledComplex, airy_array
from .spectral_curve import (CurveData, _side_code, lambda_values, rho_cdf, track_branches,
                             xi_values)

__all__ = [
    "ModelSolution",
    "model_M",
    "model_values",
    "band_jump",
    "beta_map",
    "lambda_outer",
    "outer_P_approx",
    "band_P_approx",
    "band_amplitude_phase",
    "band_phase_from_density",
    "edge_P_approx",
    "edge_coefficients",
    "zeros_of_P",
    "zeros_ks_distance",
    "RegimeReport",
    "regime_report",
    "overlap_check",
    "default_points",
]

BRANCH_GUARD = 1e-8
RICHARDSON_EPS = (1e-6, 5e-7)
SERIES_RADIUS = 200.0
_SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# Model solution
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModelSolution:
    """The 3x3 model matrix at one point; ``entries[j, k] = M_{j+1}(xi_{k+1}(z))``."""

    z: complex
    side: str
    entries: np.ndarray
    curve: CurveData = field(repr=False)

    def __getitem__(self, idx):
        return self.entries[idx]


def _model_from(curve: CurveData, xi: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Entries (3, 3, ...) from labelled roots and continued square roots (3, ...)."""
    a = curve.a
    return np.stack([(xi * xi - a * a) / r,
                     -1j * (xi + a) / (_SQRT2 * r),
                     -1j * (xi - a) / (_SQRT2 * r)])


def _sqrt_on_axis(curve: CurveData, x: np.ndarray, side: int):
    """Exact roots on the axis with the square-root sign taken from nearby tracking."""
    sd = side if side != 0 else 1
    xi = xi_values(curve, x, sd)
    r = np.sqrt((xi * xi - curve.p ** 2) * (xi * xi - curve.q ** 2) + 0j)
    e1, e2 = RICHARDSON_EPS
    _, r1 = track_branches(curve, x + 1j * sd * e1, with_sqrt=True)
    _, r2 = track_branches(curve, x + 1j * sd * e2, with_sqrt=True)
    ref = (e1 * r2 - e2 * r1) / (e1 - e2)
    r = np.where(np.abs(r - ref) <= np.abs(r + ref), r, -r)
    return xi, r


def _guard(curve: CurveData, z) -> None:
    d = np.min(np.abs(np.asarray(z, dtype=complex)[..., None] - curve.branch_points), axis=-1)
    if np.any(d < BRANCH_GUARD):
        raise BranchPointError("model solution requested within 1e-8 of a branch point")


def model_values(curve: CurveData, z, side: str | int | None = None):
    """Vectorized model data: (entries (3, 3) + z.shape, xi (3,) + z.shape, R (3,) + z.shape).

    Off-axis points are continued from infinity.  Real points use the exact
    roots, with the sign of each square root fixed by Richardson extrapolation
    of the continued values from the requested side (default '+').
    """
    z = np.asarray(z)
    _guard(curve, z)
    s = _side_code(side)
    if np.iscomplexobj(z) and np.any(z.imag != 0):
        if np.any(z.imag == 0):
            raise DomainError("mix of real and complex points: evaluate them separately")
        xi, r = track_branches(curve, z, with_sqrt=True)
    else:
        xi, r = _sqrt_on_axis(curve, np.asarray(np.real(z), dtype=float), s)
    return _model_from(curve, xi, r), xi, r


def model_M(curve: CurveData, z: complex, side: str | int | None = None) -> ModelSolution:
    """The model solution M(z); ``side`` selects the boundary value on a band."""
    z = complex(z)
    arg = np.asarray(z) if z.imag else np.asarray(z.real)
    m, _, _ = model_values(curve, arg, side)
    label = "off-axis" if z.imag else ("-" if _side_code(side) < 0 else "+")
    return ModelSolution(z, label, np.asarray(m, dtype=complex), curve)


def band_jump(curve: CurveData, x: float) -> np.ndarray:
    """Jump matrix of the model problem on the open bands."""
    if curve.z2 < x < curve.z1:
        return np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 1]], dtype=complex)
    if -curve.z1 < x < -curve.z2:
        return np.array([[0, 0, 1], [0, 1, 0], [-1, 0, 0]], dtype=complex)
    raise DomainError("x is not inside a band")


# ---------------------------------------------------------------------------
# lambda and the edge map
# ---------------------------------------------------------------------------

def lambda_outer(curve: CurveData, z, side: str | int | None = None) -> np.ndarray:
    """lambda(z) = lambda1(z) - l1 (vectorized).

    Real points left of z1 default to the '+' boundary value; the two sides
    differ by multiples of i*pi, which exp(-n lambda) does not see for even n.
    Far from the origin the expansion z^2/2 - log z + ... is used.
    """
    z = np.asarray(z)
    a = curve.a
    s = _side_code(side)
    cplx = np.iscomplexobj(z) and np.any(z.imag != 0)
    out = np.empty(z.shape, dtype=complex)
    far = np.abs(z) >= SERIES_RADIUS
    if np.any(far):
        w = z[far].astype(complex)
        g5 = 1.0 - (a * a + 1) * (a * a + 3)
        out[far] = w * w / 2 - np.log(w) + (a * a + 1) / (2 * w * w) - g5 / (4 * w ** 4)
    near = ~far
    if np.any(near):
        zn = z[near]
        if not cplx:
            zn = np.real(zn)
            sd = s if s != 0 else (1 if np.any(zn < curve.z1) else 0)
        else:
            sd = s if s != 0 else 1
        out[near] = lambda_values(curve, 1, zn, sd) - curve.l1
    return out


def _check_disk(curve: CurveData, z) -> None:
    if np.any(np.abs(np.asarray(z) - curve.z1) > curve.r_edge * (1 + 1e-12)):
        raise DomainError("beta is defined on the disk |z - z1| <= 0.2 (z1 - z2)")


def _beta_from(z, lam_diff, z1):
    d = np.asarray(z - z1, dtype=complex)
    tiny = np.abs(d) < 1e-300
    safe = np.where(tiny, 1.0, d)
    ratio = 0.75 * lam_diff / safe ** 1.5
    return np.where(tiny, 0.0, safe * ratio ** (2.0 / 3.0))


def beta_map(curve: CurveData, z) -> complex:
    """Conformal edge map beta(z) = [(3/4)(lambda1 - lambda2)]^(2/3) on D(z1, r).

    Written as (z - z1) [(3/4)(lambda1 - lambda2) / (z - z1)^(3/2)]^(2/3) with
    principal powers, which selects the branch that is real on the axis.
    """
    zc = complex(z)
    _check_disk(curve, zc)
    if zc == curve.z1:
        return 0j
    if zc.imag == 0:
        x = np.asarray(zc.real)
        l1 = lambda_values(curve, 1, x, 1)
        l2 = lambda_values(curve, 2, x, 1)
    else:
        w = np.asarray(zc)
        l1 = lambda_values(curve, 1, w)
        l2 = lambda_values(curve, 2, w)
    return complex(_beta_from(zc, l1 - l2, curve.z1)[()])


# ---------------------------------------------------------------------------
# Regime approximations of P_n(z) exp(-n z^2 / 2)
# ---------------------------------------------------------------------------

def _check_even(n: int) -> None:
    if n < 2 or n % 2:
        raise DomainError("n must be an even integer >= 2")


def _in_band(curve: CurveData, x) -> np.ndarray:
    ax = np.abs(np.asarray(x))
    return (ax > curve.z2) & (ax < curve.z1)


def _near_edge(curve: CurveData, z) -> np.ndarray:
    d = np.abs(np.asarray(z)[..., None] - curve.branch_points)
    return np.any(d < curve.r_edge, axis=-1)


def outer_P_approx(curve: CurveData, n: int, z) -> ScaledComplex:
    """M11(z) exp(-n lambda(z)), the leading term away from lenses and edge disks.

    Valid off the bands (on the real axis) and outside the edge disks; points
    with nonzero imaginary part are assumed to lie outside the lenses.
    """
    _check_even(n)
    zc = complex(z)
    if zc.imag == 0 and _in_band(curve, zc.real):
        raise DomainError("outer formula needs z outside the lenses (off the bands)")
    if _near_edge(curve, zc):
        raise DomainError("outer formula needs z outside the edge disks")
    arg = np.asarray(zc) if zc.imag else np.asarray(zc.real)
    m, _, _ = model_values(curve, arg, "+")
    lam = complex(lambda_outer(curve, arg)[()])
    phase = np.exp(-1j * n * lam.imag)
    return ScaledComplex.from_parts(complex(m[0, 0]) * phase, -n * lam.real)


def band_amplitude_phase(curve: CurveData, x):
    """(A, phi, Im lambda1+, Re lambda1+ - l1) on the bands, vectorized."""
    x = np.asarray(x, dtype=float)
    if not np.all(_in_band(curve, x)):
        raise DomainError("x must lie inside a band")
    m, _, _ = model_values(curve, x, "+")
    m11 = m[0, 0]
    lam = lambda_values(curve, 1, x, 1) - curve.l1
    return 2 * np.abs(m11), np.angle(m11), lam.imag, lam.real


def _band_domain(curve: CurveData, x) -> None:
    ax = np.abs(np.asarray(x))
    r = curve.r_edge
    if np.any((ax < curve.z2 + r) | (ax > curve.z1 - r)):
        raise DomainError("band formula needs z2 + r <= |x| <= z1 - r")


def band_P_approx(curve: CurveData, n: int, x, log_scale: bool = False,
                  check_domain: bool = True):
    """A(x) cos(n Im lambda1+(x) - phi(x)) exp(-n Re lambda1+(x) + n l1).

    With ``log_scale`` returns (oscillating factor, log of the envelope
    exp(-n Re lambda1+ + n l1)) so large n stays representable.
    ``check_domain=False`` admits any band point (used for overlap checks
    inside the edge disks).
    """
    _check_even(n)
    if check_domain:
        _band_domain(curve, x)
    amp, phi, im_l, re_l = band_amplitude_phase(curve, x)
    osc = amp * np.cos(n * im_l - phi)
    if log_scale:
        return osc, -n * re_l
    return osc * np.exp(-n * re_l)


def band_phase_from_density(curve: CurveData, x) -> np.ndarray:
    """pi times the signed integral of rho from z1 to x (right band) or -z1 to x mirrored."""
    x = np.asarray(x, dtype=float)
    return -math.pi * (rho_cdf(curve, np.full(x.shape, curve.z1)) - rho_cdf(curve, x))


def _edge_raw(curve: CurveData, x: np.ndarray):
    """(B, C, beta, alpha - l1) at real x in D(z1, r), x != z1."""
    side = 1
    m, _, _ = model_values(curve, x, side)
    l1v = lambda_values(curve, 1, x, side)
    l2v = lambda_values(curve, 2, x, side)
    beta = _beta_from(x, l1v - l2v, curve.z1).real
    # upper side of the band: arg beta = pi
    q = np.where(beta >= 0, np.abs(beta) ** 0.25, np.abs(beta) ** 0.25 * np.exp(0.25j * math.pi))
    m11, m12 = m[0, 0], m[0, 1]
    b = q * (m11 - 1j * m12)
    c = (m11 * -1 - 1j * m12) / q
    alpha = 0.5 * (l1v + l2v) - curve.l1
    return b, c, beta, alpha


EDGE_JITTER = 1e-6


def edge_coefficients(curve: CurveData, x):
    """B(x), C(x), beta(x) and alpha(x) - l1 at real x in D(z1, r), vectorized.

    B and C are analytic at z1, but the formulas are 0/0 there; within 1e-6 of
    z1 they are interpolated linearly from z1 -+ 1e-6.  Imaginary parts,
    which vanish on the axis, are dropped.
    """
    x0 = np.asarray(x, dtype=float)
    x = np.atleast_1d(x0)
    _check_disk(curve, x)
    close = np.abs(x - curve.z1) < EDGE_JITTER
    pts = np.where(close, curve.z1 + EDGE_JITTER, x)
    b, c, beta, alpha = _edge_raw(curve, pts)
    if np.any(close):
        lo = np.array([curve.z1 - EDGE_JITTER])
        hi = np.array([curve.z1 + EDGE_JITTER])
        bl, cl, btl, al = _edge_raw(curve, lo)
        bh, ch, bth, ah = _edge_raw(curve, hi)
        t = (x[close] - lo[0]) / (2 * EDGE_JITTER)
        b[close] = bl[0] + t * (bh[0] - bl[0])
        c[close] = cl[0] + t * (ch[0] - cl[0])
        beta[close] = btl[0] + t * (bth[0] - btl[0])
        alpha[close] = al[0] + t * (ah[0] - al[0])
    out = [v.real.reshape(x0.shape) for v in (b, c, beta, alpha)]
    return tuple(o if o.ndim else float(o) for o in out)


def _mirror_edge(curve: CurveData, x):
    x = np.asarray(x, dtype=float)
    tol = curve.r_edge * (1 + 1e-12)
    right = np.abs(x - curve.z1) <= tol
    left = np.abs(x + curve.z1) <= tol
    if not np.all(right | left):
        raise DomainError("edge formula needs |x - z1| <= r or |x + z1| <= r")
    return np.where(right, x, -x)


def edge_P_approx(curve: CurveData, n: int, x, log_scale: bool = False):
    """sqrt(pi) [n^(1/6) B Ai(n^(2/3) beta) + n^(-1/6) C Ai'(n^(2/3) beta)] exp(-n alpha + n l1).

    Points near -z1 are mapped to z1 by the parity P_n(-x) = P_n(x) (n even).
    """
    _check_even(n)
    xm = _mirror_edge(curve, x)
    b, c, beta, alpha = edge_coefficients(curve, xm)
    ai, aip = airy_array(n ** (2.0 / 3.0) * np.asarray(beta))
    val = math.sqrt(math.pi) * (n ** (1 / 6) * b * ai + n ** (-1 / 6) * c * aip)
    if log_scale:
        return val, -n * np.asarray(alpha)
    return val * np.exp(-n * np.asarray(alpha))


def _airy_envelope(t):
    ai, aip = airy_array(t)
    return np.sqrt(ai * ai + aip * aip / (1.0 + np.abs(t)))


# ---------------------------------------------------------------------------
# Zeros of P_n
# ---------------------------------------------------------------------------

ZERO_TOL = 1e-10
MAX_ZERO_N = 48


def _sign_p(params: EnsembleParams, x: np.ndarray) -> np.ndarray:
    return np.sign(eval_P_scaled(params, x)[0])


def _bracket_zeros(params: EnsembleParams, lo: float, hi: float, points: int) -> np.ndarray:
    grid = np.linspace(lo, hi, points)
    sg = _sign_p(params, grid)
    exact = grid[sg == 0]
    idx = np.nonzero(sg[:-1] * sg[1:] < 0)[0]
    a, b = grid[idx], grid[idx + 1]
    sa = sg[idx]
    while a.size and np.max(b - a) > ZERO_TOL:
        mid = 0.5 * (a + b)
        sm = _sign_p(params, mid)
        left = sm * sa > 0
        a = np.where(left, mid, a)
        b = np.where(left, b, mid)
        hit = sm == 0
        a = np.where(hit, mid, a)
        b = np.where(hit, mid, b)
    return np.sort(np.concatenate([exact, 0.5 * (a + b)]))


def zeros_of_P(curve: CurveData, n: int, points_per_zero: int = 40) -> np.ndarray:
    """All real zeros of P_n (theorem scaling) by a sign scan and bisection to 1e-10.

    The scan covers [-z1 - 0.5, z1 + 0.5]; if fewer than n sign changes are
    found, the grid is refined eightfold and the search repeated once.
    """
    _check_even(n)
    if n > MAX_ZERO_N:
        raise DomainError(f"zeros_of_P supports n <= {MAX_ZERO_N}")
    params = EnsembleParams.theorem(curve.a, n)
    lo, hi = -curve.z1 - 0.5, curve.z1 + 0.5
    points = points_per_zero * n + 1
    for attempt in range(2):
        z = _bracket_zeros(params, lo, hi, points)
        if z.size == n:
            return z
        points = 8 * points
    raise EvaluationError(f"found {z.size} sign changes of P_{n}, expected {n}: "
                          "search resolution insufficient")


def zeros_ks_distance(curve: CurveData, zeros) -> float:
    """Kolmogorov-Smirnov distance between the zero ECDF and the integrated density."""
    z = np.sort(np.asarray(zeros, dtype=float))
    m = z.size
    F = rho_cdf(curve, z)
    i = np.arange(1, m + 1)
    return float(max(np.max(i / m - F), np.max(F - (i - 1) / m)))


# ---------------------------------------------------------------------------
# Regime reports
# ---------------------------------------------------------------------------

def _exact_scaled(n: int, a: float, x: np.ndarray):
    m, ls = eval_P_scaled(EnsembleParams.theorem(a, n), x)
    return m, ls - 0.5 * n * x * x


def _regime_errors(curve: CurveData, regime: str, n: int, x: np.ndarray):
    """(exact, approx, rel_error) on the common scale exp(log envelope)."""
    m, ls = _exact_scaled(n, curve.a, x)
    if regime == "outer":
        vals = [outer_P_approx(curve, n, float(xi)) for xi in x]
        lenv = np.array([v.log_scale for v in vals])
        approx = np.array([v.mantissa for v in vals]).real
        env = np.abs(approx)
    elif regime == "band":
        approx, lenv = band_P_approx(curve, n, x, log_scale=True)
        env = band_amplitude_phase(curve, x)[0]
    elif regime == "edge":
        approx, lenv = edge_P_approx(curve, n, x, log_scale=True)
        b, _, beta, _ = edge_coefficients(curve, _mirror_edge(curve, x))
        t = n ** (2.0 / 3.0) * np.atleast_1d(beta)
        env = math.sqrt(math.pi) * n ** (1 / 6) * np.abs(b) * _airy_envelope(t)
    else:
        raise DomainError("regime must be outer, band or edge")
    exact = m * np.exp(ls - lenv)
    return exact, approx, np.abs(exact - approx) / env, lenv


def default_points(curve: CurveData, regime: str) -> np.ndarray:
    """Fixed evaluation points used by the acceptance checks."""
    z1, z2, r = curve.z1, curve.z2, curve.r_edge
    if regime == "outer":
        return np.array([z1 + 2.0, z1 + 1.0, z1 + 2 * r, -(z1 + 2.0)])
    if regime == "band":
        mid = 0.5 * (z1 + z2)
        return np.array([z2 + r, mid - 0.25 * (z1 - z2 - 2 * r), mid,
                         mid + 0.25 * (z1 - z2 - 2 * r), z1 - r, -mid])
    if regime == "edge":
        return np.array([z1 - r, z1 - r / 2, z1, z1 + r / 2, z1 + r, -z1])
    raise DomainError("regime must be outer, band or edge")


@dataclass
class RegimeReport:
    """Envelope-relative errors of one regime formula at fixed points and several n.

    ``errors[i, j]`` belongs to ``n_values[i]`` and ``points[j]``; ``exact`` and
    ``approx`` are on the common scale exp(``log_envelope``).
    """

    regime: str
    points: np.ndarray
    n_values: list
    errors: np.ndarray
    exact: np.ndarray
    approx: np.ndarray
    log_envelope: np.ndarray

    def max_errors(self) -> np.ndarray:
        return np.max(self.errors, axis=1)

    def rows(self):
        """Records with the CSV columns regime, n, point, exact, approx, rel_error."""
        for i, n in enumerate(self.n_values):
            for j, x in enumerate(self.points):
                yield {"regime": self.regime, "n": n, "point": float(x),
                       "exact": float(self.exact[i, j]), "approx": float(self.approx[i, j]),
                       "rel_error": float(self.errors[i, j])}


def regime_report(curve: CurveData, regime: str, n_values=(16, 24, 32), points=None) -> RegimeReport:
    """Compare one regime formula with exact P_n exp(-n x^2/2) on real points."""
    pts = default_points(curve, regime) if points is None else np.asarray(points, dtype=float)
    rows = [_regime_errors(curve, regime, int(n), pts) for n in n_values]
    exact, approx, err, lenv = (np.array([r[k] for r in rows]) for k in range(4))
    if not np.all(np.isfinite(err)):
        raise EvaluationError(f"non-finite error in the {regime} report")
    return RegimeReport(regime, pts, [int(n) for n in n_values], err, exact, approx, lenv)


def _overlap_values(curve: CurveData, n: int, other: str, x: np.ndarray):
    """(exact, edge approx, other approx) on the scale of the edge envelope."""
    ap_e, len_e = edge_P_approx(curve, n, x, log_scale=True)
    b, _, beta, _ = edge_coefficients(curve, x)
    ref = len_e + np.log(math.sqrt(math.pi) * n ** (1 / 6) * np.abs(b)
                         * _airy_envelope(n ** (2 / 3) * beta))
    if other == "band":
        ap_o, len_o = band_P_approx(curve, n, x, log_scale=True, check_domain=False)
    else:
        vals = [_outer_unchecked(curve, n, float(v)) for v in x]
        ap_o = np.array([v.mantissa.real for v in vals])
        len_o = np.array([v.log_scale for v in vals])
    m, ls = _exact_scaled(n, curve.a, x)
    return m * np.exp(ls - ref), ap_e * np.exp(len_e - ref), ap_o * np.exp(len_o - ref)


def overlap_check(curve: CurveData, n: int = 32, trend_ns=(16, 24, 32)) -> dict:
    """Agreement of the edge formula with the band and outer formulas near z1.

    Band/edge are compared at z1 - 3r/4 and z1 - r, outer/edge at z1 + 3r/4
    and z1 + r (r the edge-disk radius), relative to the edge envelope.  Each
    formula's error trend is C/n with C = max over ``trend_ns`` of m * error(m)
    against exact P_m at the same points; the budget at n is the sum of the
    two trends.
    """
    r = curve.r_edge
    out = {}
    for other, pts in (("band", [curve.z1 - 0.75 * r, curve.z1 - r]),
                       ("outer", [curve.z1 + 0.75 * r, curve.z1 + r])):
        x = np.array(pts)
        c_e = np.zeros(x.shape)
        c_o = np.zeros(x.shape)
        for m in trend_ns:
            ex, ap_e, ap_o = _overlap_values(curve, m, other, x)
            c_e = np.maximum(c_e, m * np.abs(ap_e - ex))
            c_o = np.maximum(c_o, m * np.abs(ap_o - ex))
        _, ap_e, ap_o = _overlap_values(curve, n, other, x)
        out[f"{other}_edge"] = {"points": x.tolist(),
                                "difference": np.abs(ap_e - ap_o).tolist(),
                                "budget": ((c_e + c_o) / n).tolist()}
    return out


def _outer_unchecked(curve: CurveData, n: int, x: float) -> ScaledComplex:
    m, _, _ = model_values(curve, np.asarray(x), "+")
    lam = complex(lambda_outer(curve, np.asarray(x))[()])
    return ScaledComplex.from_parts(complex(m[0, 0]) * np.exp(-1j * n * lam.imag), -n * lam.real)
