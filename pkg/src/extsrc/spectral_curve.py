"""Pastur's cubic, its three labelled branches, the density and the lambda-functions.

The cubic  xi^3 - z xi^2 - (a^2 - 1) xi + z a^2 = 0  has three roots for every z.
They are labelled by their behaviour at infinity,

    xi1 ~ z - 1/z,   xi2 ~ a + 1/(2z),   xi3 ~ -a + 1/(2z),

and continued analytically.  xi1 has cuts on both bands [-z1, -z2] and
[z2, z1], xi2 on the right band only and xi3 on the left band only.

On the real axis the labels are fixed by simple ordering rules (checked
against continuation in the test-suite); off the axis they are obtained by
tracking the roots down a vertical path from height 1e6.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BranchPointError, DomainError, UnsupportedRegimeError

__all__ = [
    "CurveData",
    "BranchTriple",
    "make_curve",
    "xi_at",
    "xi_values",
    "xi_boundary_richardson",
    "track_branches",
    "z_of_xi",
    "rho",
    "rho_cdf",
    "band_mass",
    "lambda_at",
    "lambda_values",
    "h_rescale",
]

TRACK_HEIGHT = 1e6
BRANCH_TOL = 1e-12
_PERMS = np.array(list(itertools.permutations(range(3))))


@dataclass(frozen=True)
class BranchTriple:
    xi1: complex
    xi2: complex
    xi3: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.xi1, self.xi2, self.xi3], dtype=complex)


@dataclass(frozen=True, eq=False)
class CurveData:
    """Branch points, edge constants and lambda-constants of the curve for one ``a``.

    ``l3`` is complex: lambda3 is real up to the constant imaginary part -pi/2
    on (-z2, inf) once anchored at the lower-band boundary value of lambda1.
    """

    a: float
    p: float
    q: float
    z1: float
    z2: float
    rho1: float
    rho2: float
    l1: float = field(default=math.nan)
    l2: float = field(default=math.nan)
    l3: complex = field(default=complex(math.nan))
    anchors: dict = field(default_factory=dict, repr=False)

    @property
    def r_edge(self) -> float:
        """Radius of the edge disks, 0.2 (z1 - z2)."""
        return 0.2 * (self.z1 - self.z2)

    @cached_property
    def branch_points(self) -> np.ndarray:
        return np.array([-self.z1, -self.z2, self.z2, self.z1])

    def as_dict(self) -> dict:
        return {"a": self.a, "p": self.p, "q": self.q, "z1": self.z1, "z2": self.z2,
                "rho1": self.rho1, "rho2": self.rho2}


# ---------------------------------------------------------------------------
# Roots of the cubic
# ---------------------------------------------------------------------------

def z_of_xi(a: float, xi):
    """Inverse map z(xi) = (xi^3 - (a^2 - 1) xi) / (xi^2 - a^2)."""
    xi = np.asarray(xi)
    return (xi ** 3 - (a * a - 1.0) * xi) / (xi * xi - a * a)


def _cubic_roots(a: float, z) -> np.ndarray:
    """All three roots at each z, shape z.shape + (3,), unlabelled."""
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    comp = np.zeros((flat.size, 3, 3), dtype=complex)
    comp[:, 0, 0] = flat
    comp[:, 0, 1] = a * a - 1.0
    comp[:, 0, 2] = -flat * a * a
    comp[:, 1, 0] = 1.0
    comp[:, 2, 1] = 1.0
    r = np.linalg.eigvals(comp)
    zz = flat[:, None]
    for _ in range(3):
        f = ((r - zz) * r - (a * a - 1.0)) * r + zz * a * a
        fp = (3.0 * r - 2.0 * zz) * r - (a * a - 1.0)
        ok = np.abs(fp) > 1e-8 * (1.0 + np.abs(r) ** 2)
        step = np.where(ok, f / np.where(ok, fp, 1.0), 0.0)
        r = r - step
    return r.reshape(z.shape + (3,))


def _check_branch_distance(curve: CurveData, x) -> None:
    d = np.min(np.abs(np.asarray(x)[..., None] - curve.branch_points), axis=-1)
    if np.any(d < BRANCH_TOL):
        raise BranchPointError("point lies within 1e-12 of a branch point")


def _xi_real(curve: CurveData, x, side: int) -> np.ndarray:
    """Labelled roots for real x; shape (3,) + x.shape.  ``side`` is +1, -1 or 0."""
    x0 = np.asarray(x, dtype=float)
    x = np.atleast_1d(x0)
    _check_branch_distance(curve, x)
    z1, z2 = curve.z1, curve.z2
    right = (x > z2) & (x < z1)
    left = (x > -z1) & (x < -z2)
    if side == 0 and np.any(right | left):
        raise DomainError("real point on a cut: request the + or - boundary side")
    r = _cubic_roots(curve.a, x)
    out = np.empty((3,) + x.shape, dtype=complex)

    three_real = ~(right | left)
    if np.any(three_real):
        rr = np.sort(r[three_real].real, axis=-1)
        xs = x[three_real]
        lo, mid, hi = rr[..., 0], rr[..., 1], rr[..., 2]
        outer_r = xs >= z1
        outer_l = xs <= -z1
        xi1 = np.where(outer_r, hi, np.where(outer_l, lo, mid))
        xi2 = np.where(outer_r, mid, hi)
        xi3 = np.where(outer_l, mid, lo)
        out[0][three_real] = xi1
        out[1][three_real] = xi2
        out[2][three_real] = xi3

    for mask, partner in ((right, 1), (left, 2)):
        if not np.any(mask):
            continue
        rr = r[mask]
        order = np.argsort(rr.imag, axis=-1)
        lower = np.take_along_axis(rr, order[..., :1], -1)[..., 0]
        real = np.take_along_axis(rr, order[..., 1:2], -1)[..., 0].real + 0j
        upper = np.take_along_axis(rr, order[..., 2:], -1)[..., 0]
        xi1 = upper if side > 0 else lower
        other = lower if side > 0 else upper
        out[0][mask] = xi1
        out[partner][mask] = other
        out[3 - partner][mask] = real
    return out.reshape((3,) + x0.shape)


def _match(prev: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """Reorder ``roots`` (B,3) to sit closest to the labelled ``prev`` (B,3)."""
    cand = roots[:, _PERMS]  # (B,6,3)
    cost = np.sum(np.abs(cand - prev[:, None, :]), axis=-1)
    best = np.argmin(cost, axis=1)
    return cand[np.arange(len(best)), best]


def _r_values(curve: CurveData, xi: np.ndarray) -> np.ndarray:
    return np.sqrt((xi * xi - curve.p ** 2) * (xi * xi - curve.q ** 2) + 0j)


def track_branches(curve: CurveData, z, with_sqrt: bool = False):
    """Labelled roots at off-axis points by continuation from height 1e6.

    For every z the path runs vertically from Re z + i*sign(Im z)*1e6 down to z
    in geometric steps, so the step shrinks with the distance to the axis (and
    hence to every branch point).  At each step the fresh roots are matched to
    the previous labelled ones.

    With ``with_sqrt`` also returns R_k = sqrt((xi_k^2 - p^2)(xi_k^2 - q^2))
    continued along the same path, starting from the branch on which the model
    functions M_k(xi_k) tend to 1.
    """
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    if np.any(zf.imag == 0):
        raise DomainError("track_branches needs points off the real axis")
    a = curve.a
    t_end = np.abs(zf.imag)
    sgn = np.sign(zf.imag)
    t_start = np.maximum(TRACK_HEIGHT, t_end)
    ratio = 1.1
    steps = int(np.ceil(np.max(np.log(t_start / t_end)) / math.log(ratio))) + 1
    w = zf.real + 1j * sgn * t_start
    guess = np.stack([w - 1.0 / w, a + 0.5 / w, -a + 0.5 / w], axis=-1)
    cur = _match(guess, _cubic_roots(a, w))
    if with_sqrt:
        s2 = np.sqrt(2.0)
        target = np.stack([cur[:, 0] ** 2 - a * a,
                           -1j * (cur[:, 1] + a) / s2,
                           -1j * (cur[:, 2] - a) / s2], axis=-1)
        rv = _r_values(curve, cur)
        rv = np.where(np.abs(rv - target) <= np.abs(rv + target), rv, -rv)
    logs = np.log(t_start / t_end)
    for j in range(1, steps + 1):
        t = t_start * np.exp(-logs * min(j / steps, 1.0))
        w = zf.real + 1j * sgn * t
        cur = _match(cur, _cubic_roots(a, w))
        if with_sqrt:
            new = _r_values(curve, cur)
            rv = np.where(np.abs(new - rv) <= np.abs(new + rv), new, -new)
    xi = np.moveaxis(cur, -1, 0).reshape((3,) + shape)
    if with_sqrt:
        return xi, np.moveaxis(rv, -1, 0).reshape((3,) + shape)
    return xi


def xi_values(curve: CurveData, z, side: str | int | None = None) -> np.ndarray:
    """Vectorized labelled roots, shape (3,) + z.shape.

    Real points on a cut need ``side`` ('+' or '-'); it is ignored elsewhere.
    """
    z = np.asarray(z)
    s = _side_code(side)
    if np.iscomplexobj(z) and np.any(z.imag != 0):
        out = np.empty((3,) + z.shape, dtype=complex)
        off = z.imag != 0
        out[:, off] = track_branches(curve, z[off])
        if np.any(~off):
            out[:, ~off] = _xi_real(curve, z[~off].real, s)
        return out
    return _xi_real(curve, np.real(z), s)


def xi_at(curve: CurveData, z: complex, side: str | int | None = None) -> BranchTriple:
    """The three labelled inverses at a single point."""
    z = complex(z)
    v = xi_values(curve, np.asarray(z) if z.imag else np.asarray(z.real), side)
    return BranchTriple(complex(v[0]), complex(v[1]), complex(v[2]))


def xi_boundary_richardson(curve: CurveData, x, side: str | int,
                           eps: tuple = (1e-6, 5e-7)) -> np.ndarray:
    """Boundary values on the real axis from tracked values at x + i*s*eps.

    Linear Richardson extrapolation of the two offsets to eps = 0.
    """
    s = _side_code(side)
    if s == 0:
        raise DomainError("side must be '+' or '-'")
    x = np.asarray(x, dtype=float)
    e1, e2 = eps
    v1 = track_branches(curve, x + 1j * s * e1)
    v2 = track_branches(curve, x + 1j * s * e2)
    return (e1 * v2 - e2 * v1) / (e1 - e2)


def _side_code(side) -> int:
    if side in (None, 0, "off-axis", "off", ""):
        return 0
    if side in ("+", 1, "plus"):
        return 1
    if side in ("-", -1, "minus"):
        return -1
    raise DomainError(f"unknown side {side!r}")


# ---------------------------------------------------------------------------
# Integration helpers
# ---------------------------------------------------------------------------

_GL_T, _GL_W = np.polynomial.legendre.leggauss(32)


def _composite(panels: int):
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * _GL_T[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return t, w


_U4, _W4 = _composite(4)


def _segment_integral(fn, lo, hi, kind: str) -> np.ndarray:
    """Integral of ``fn`` over [lo, hi] (arrays, real), endpoint-singularity aware.

    ``kind`` selects the substitution absorbing square-root endpoint behaviour:
    'both' uses s = lo + (hi - lo) sin^2(theta); 'lo'/'hi' use a quadratic
    map clustering nodes at that endpoint; 'none' is plain Gauss-Legendre.
    The result is the signed integral from lo to hi.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    u, w = _U4, _W4
    L = (hi - lo)[..., None]
    if kind == "both":
        th = 0.5 * math.pi * u
        s = lo[..., None] + L * np.sin(th) ** 2
        jac = L * np.sin(2 * th) * 0.5 * math.pi
    elif kind == "lo":
        s = lo[..., None] + L * u ** 2
        jac = L * 2 * u
    elif kind == "hi":
        s = hi[..., None] - L * u ** 2
        jac = L * 2 * u
    else:
        s = lo[..., None] + L * u
        jac = L * np.ones_like(u)
    vals = fn(s)
    return np.sum(vals * jac * w, axis=-1)


def _xi_fn(curve: CurveData, k: int, side: int):
    def f(s):
        out = np.zeros(s.shape, dtype=complex)
        # nodes of zero-length segments collapse onto an endpoint; avoid branch points
        safe = np.min(np.abs(s[..., None] - curve.branch_points), axis=-1) > BRANCH_TOL
        if np.any(safe):
            out[safe] = _xi_real(curve, s[safe], side)[k - 1]
        if np.any(~safe):
            out[~safe] = _branch_point_value(curve, s[~safe])
        return out
    return f


def _branch_point_value(curve: CurveData, s):
    # at +-z1 the merging roots equal +-q, at +-z2 they equal +-p; only the
    # merging sheets ever integrate onto a branch point
    s = np.asarray(s)
    near = lambda c: np.abs(s - c) <= BRANCH_TOL
    return np.select([near(curve.z1), near(curve.z2), near(-curve.z2), near(-curve.z1)],
                     [curve.q, curve.p, -curve.p, -curve.q], default=np.nan) + 0j


# ---------------------------------------------------------------------------
# Curve construction
# ---------------------------------------------------------------------------

def make_curve(a: float) -> CurveData:
    """Branch points, edge constants and lambda-constants for the parameter ``a``."""
    a = float(a)
    if not a > 1.0 + 1e-8:
        raise UnsupportedRegimeError(
            "a <= 1 is outside the supported regime: the value a = 1 is critical and "
            "only the case a > 1 (two separate bands) is implemented")
    s = math.sqrt(1.0 + 8.0 * a * a)
    p = math.sqrt(0.5 + a * a - 0.5 * s)
    q = math.sqrt(0.5 + a * a + 0.5 * s)
    z1 = q * (s + 3.0) / (s + 1.0)
    z2 = p * (s - 3.0) / (s - 1.0)

    def zpp(xi):
        # z'(xi) = (xi^2 - p^2)(xi^2 - q^2)/(xi^2 - a^2)^2 vanishes at p, q
        return 2.0 * xi * (xi * xi - p * p + xi * xi - q * q) / (xi * xi - a * a) ** 2

    rho1 = math.sqrt(2.0 / zpp(q))
    rho2 = math.sqrt(2.0 / abs(zpp(p)))
    base = CurveData(a, p, q, z1, z2, rho1, rho2)
    return _with_constants(base)


def _with_constants(c: CurveData) -> CurveData:
    a, z1, z2 = c.a, c.z1, c.z2
    f1p = _xi_fn(c, 1, 1)
    # lambda1(+) at z2: integral of xi1+ from z1 to z2
    l1p_z2 = -_segment_integral(f1p, np.array(z2), np.array(z1), "both")[()]
    gap = _segment_integral(_xi_fn(c, 1, 0), np.array(-z2), np.array(z2), "both")[()]
    l1p_mz2 = l1p_z2 - gap
    l1p_mz1 = l1p_mz2 + _segment_integral(f1p, np.array(-z2), np.array(-z1), "both")[()]
    l2p_z2 = -_segment_integral(_xi_fn(c, 2, 1), np.array(z2), np.array(z1), "both")[()]
    l3_mz2 = l1p_mz2
    l3p_mz1 = l3_mz2 + _segment_integral(_xi_fn(c, 3, 1), np.array(-z2), np.array(-z1), "both")[()]
    anchors = {
        "l1p_z2": complex(l1p_z2), "l1p_mz2": complex(l1p_mz2), "l1p_mz1": complex(l1p_mz1),
        "l2p_z2": complex(l2p_z2), "l3_mz2": complex(l3_mz2), "l3p_mz1": complex(l3p_mz1),
    }
    c = CurveData(c.a, c.p, c.q, c.z1, c.z2, c.rho1, c.rho2, anchors=anchors)

    # constants at infinity from a finite integral plus series tails
    X = 200.0
    e2 = (4 * a * a + 1) / (8 * a)
    e3 = (a * a + 1) / 2
    e4 = (2 * a * a * e3 + 3 * a * e2 + 0.125 - e2 * e2) / (2 * a)
    g5 = 1.0 - (a * a + 1) * (a * a + 3)
    lam1_X = _lambda_real(c, 1, np.array(X), 0)[()].real
    tail1 = -(a * a + 1) / (2 * X ** 2) + g5 / (4 * X ** 4)
    l1 = lam1_X - X * X / 2 + math.log(X) + tail1
    lam2_X = _lambda_real(c, 2, np.array(X), 0)[()].real
    tail2 = e2 / X + e3 / (2 * X ** 2) + e4 / (3 * X ** 3)
    l2 = lam2_X - a * X - 0.5 * math.log(X) + tail2
    lam3_X = complex(_lambda_real(c, 3, np.array(X), 0)[()])
    tail3 = -e2 / X + e3 / (2 * X ** 2) - e4 / (3 * X ** 3)
    l3 = lam3_X + a * X - 0.5 * math.log(X) + tail3
    return CurveData(c.a, c.p, c.q, c.z1, c.z2, c.rho1, c.rho2, float(l1), float(l2),
                     complex(l3), anchors)


# ---------------------------------------------------------------------------
# Density
# ---------------------------------------------------------------------------

def rho(curve: CurveData, x):
    """Limiting density Im xi1+(x)/pi on the bands, 0 elsewhere."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    inside = (ax > curve.z2) & (ax < curve.z1)
    out = np.zeros(x.shape)
    if np.any(inside):
        out[inside] = _xi_real(curve, x[inside], 1)[0].imag / math.pi
    return out if out.ndim else float(out)


def band_mass(curve: CurveData, lo, hi):
    """Integral of rho over [lo, hi], where [lo, hi] lies inside one band."""
    f = lambda s: _xi_fn(curve, 1, 1)(s).imag / math.pi
    return _segment_integral(f, np.asarray(lo, float), np.asarray(hi, float), "both")


def rho_cdf(curve: CurveData, x):
    """Mass of rho on (-inf, x]."""
    x = np.asarray(x, dtype=float)
    z1, z2 = curve.z1, curve.z2
    lx = np.clip(x, -z1, -z2)
    rx = np.clip(x, z2, z1)
    out = band_mass(curve, np.full(x.shape, -z1), lx) + band_mass(curve, np.full(x.shape, z2), rx)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# lambda-functions
# ---------------------------------------------------------------------------

def _lambda_real(curve: CurveData, k: int, x, side: int) -> np.ndarray:
    """lambda_k at real points (boundary value ``side`` on its cuts)."""
    x = np.asarray(x, dtype=float)
    z1, z2 = curve.z1, curve.z2
    A = curve.anchors
    out = np.empty(x.shape, dtype=complex)
    sd = side if side != 0 else 1

    def fill(mask, base, start, kind):
        if np.any(mask):
            xs = x[mask]
            out[mask] = base + _segment_integral(_xi_fn(curve, k, sd),
                                                 np.full(xs.shape, start), xs, kind)

    conj = (lambda v: v) if sd > 0 else np.conj
    if k == 1:
        needs_side = (np.abs(x) < z1)
        if side == 0 and np.any(needs_side):
            raise DomainError("lambda1 is discontinuous on (-inf, z1): give a side")
        fill(x >= z1, 0.0, z1, "lo")
        fill((x > z2) & (x < z1), 0.0, z1, "both")
        fill(np.abs(x) <= z2, conj(A["l1p_z2"]), z2, "both")
        fill((x > -z1) & (x < -z2), conj(A["l1p_mz2"]), -z2, "both")
        m = x <= -z1
        if np.any(m):
            if side == 0:
                raise DomainError("lambda1 is discontinuous on (-inf, z1): give a side")
            fill(m, conj(A["l1p_mz1"]), -z1, "lo")
    elif k == 2:
        if side == 0 and np.any(x < z1):
            raise DomainError("lambda2 is discontinuous on (-inf, z1): give a side")
        fill(x >= z1, 0.0, z1, "lo")
        fill((x > z2) & (x < z1), 0.0, z1, "both")
        fill(x <= z2, conj(A["l2p_z2"]), z2, "lo")
    elif k == 3:
        if side == 0 and np.any(x < -z2):
            raise DomainError("lambda3 is discontinuous on (-inf, -z2): give a side")
        fill(x >= -z2, A["l3_mz2"], -z2, "lo")
        fill((x > -z1) & (x < -z2), A["l3_mz2"], -z2, "both")
        if np.any(x <= -z1):
            base = A["l3p_mz1"] if sd > 0 else _l3_minus_mz1(curve)
            fill(x <= -z1, base, -z1, "lo")
    else:
        raise DomainError("k must be 1, 2 or 3")
    return out


def _l3_minus_mz1(curve: CurveData) -> complex:
    A = curve.anchors
    return A["l3_mz2"] + complex(_segment_integral(_xi_fn(curve, 3, -1), np.array(-curve.z2),
                                                   np.array(-curve.z1), "both")[()])


def lambda_values(curve: CurveData, k: int, z, side: str | int | None = None) -> np.ndarray:
    """Vectorized lambda_k.

    Real points use the piecewise real-line integrals; off-axis points add the
    integral of xi_k up a vertical segment from the boundary value at Re z on
    the same side of the axis.
    """
    z = np.asarray(z)
    s = _side_code(side)
    if not (np.iscomplexobj(z) and np.any(z.imag != 0)):
        return _lambda_real(curve, k, np.real(z), s)
    out = np.empty(z.shape, dtype=complex)
    off = z.imag != 0
    if np.any(~off):
        out[~off] = _lambda_real(curve, k, z[~off].real, s)
    zo = z[off]
    x0 = zo.real
    out_off = np.empty(zo.shape, dtype=complex)
    u, w = _composite(4)
    for sg in (1, -1):
        m = np.sign(zo.imag) == sg
        if not np.any(m):
            continue
        foot = _lambda_real(curve, k, x0[m], sg)
        height = zo[m].imag
        nodes = x0[m][:, None] + 1j * height[:, None] * u[None, :] ** 2
        vals = track_branches(curve, nodes)[k - 1]
        jac = 2j * height[:, None] * u[None, :]
        out_off[m] = foot + np.sum(vals * jac * w, axis=-1)
    out[off] = out_off
    return out


def lambda_at(curve: CurveData, k: int, z: complex, side: str | int | None = None) -> complex:
    """lambda_k(z) = integral of xi_k with the normalizing constants of the curve."""
    z = complex(z)
    arg = np.asarray(z) if z.imag else np.asarray(z.real)
    return complex(lambda_values(curve, k, arg, side)[()])


# ---------------------------------------------------------------------------
# Rescaling function h
# ---------------------------------------------------------------------------

def h_rescale(curve: CurveData, x, extend: bool = False):
    """Kernel rescaling function h.

    On the bands h = -x^2/4 + Re lambda1+(x); on (z1, inf) h = -x^2/4 +
    (lambda1 + lambda2)/2.  Elsewhere h is refused unless ``extend`` is set, in
    which case the half-sum of the two sheets meeting at the nearest edge is
    used: Re(lambda1+ + lambda2+)/2 on (0, z2] and Re(lambda1+ + lambda3+)/2 on
    the negative axis outside the left band.
    """
    x0 = np.asarray(x, dtype=float)
    x = np.atleast_1d(x0)
    z1, z2 = curve.z1, curve.z2
    ax = np.abs(x)
    band = (ax >= z2) & (ax <= z1)
    right_out = x > z1
    other = ~(band | right_out)
    if np.any(other) and not extend:
        raise DomainError("h is defined on the bands and on (z1, inf) only")
    out = -0.25 * x * x
    if np.any(band):
        out[band] += _lambda_real(curve, 1, x[band], 1).real
    if np.any(right_out):
        xs = x[right_out]
        out[right_out] += 0.5 * (_lambda_real(curve, 1, xs, 0) + _lambda_real(curve, 2, xs, 0)).real
    pos_gap = other & (x > 0)
    if np.any(pos_gap):
        xs = x[pos_gap]
        out[pos_gap] += 0.5 * (_lambda_real(curve, 1, xs, 1) + _lambda_real(curve, 2, xs, 1)).real
    neg = other & (x <= 0)
    if np.any(neg):
        xs = x[neg]
        out[neg] += 0.5 * (_lambda_real(curve, 1, xs, 1) + _lambda_real(curve, 3, xs, 1)).real
    return out.reshape(x0.shape) if x0.ndim else float(out[0])
