"""Finite-n correlation kernel of the ensemble and its sine/Airy limits.

With p(x) = (P_{n1,n2}, P_{n1-1,n2}, P_{n1,n2-1})(x) and Y normalized to
det Y = 1, the rows 2 and 3 of Y(y)^{-1} are cofactors of Y(y).  Combining
the Cauchy-transform parts of those cofactors with p(x) leaves nonsingular
polynomial divided differences, and the kernel becomes

    K_n(x, y) = exp(-N(x^2 + y^2)/4) V(y) . p(x) / (x - y),

    V(y) = [exp(-N a y) I_1(y) - exp(N a y) I_2(y)] / (h1 h2),
    I_k(y) = int w_k(s) (p(y) x p(s)) / (s - y) ds,

with h1 = h^{(1)}_{n1-1,n2}, h2 = h^{(2)}_{n1,n2-1} and "x" the vector cross
product.  I_k has a polynomial integrand times a Gaussian and is evaluated
exactly by Gauss-Hermite quadrature in extended precision; the working
precision grows with n because the sums cancel to relative size ~ e^{-n}.

On the diagonal V(x) . p(x) = 0 and l'Hopital with the exact derivative
p' = N (A + x I) p from the differential equation gives
K_n(x, x) = exp(-N x^2 / 2) V(x) . p'(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import mpmath as mp
import numpy as np

from . import _mp
from .errors import DomainError, ShrinkGridError, UseDiagonalError
from .multiple_hermite import EnsembleParams
from .numerics import airy_kernel
from .spectral_curve import CurveData, h_rescale, make_curve, rho

__all__ = [
    "MAX_N",
    "KernelEngine",
    "engine",
    "kernel",
    "kernel_diag",
    "kernel_diag_fd",
    "rescaled_kernel",
    "kernel_matrix",
    "contraction",
    "KernelGrid",
    "default_grid",
    "sine_limit_report",
    "airy_limit_report",
    "edge_points",
]

MAX_N = 64
DIAG_TOL = 1e-8


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


class KernelEngine:
    """Precomputed quadrature data for one theorem-mode parameter set.

    Instances hold mpmath numbers and switch the mpmath working precision
    while evaluating; use one engine per thread.
    """

    def __init__(self, params: EnsembleParams):
        if not params.theorem_mode:
            raise DomainError("the kernel is implemented in theorem mode (n1 = n2 = n/2, N = n)")
        if params.n > MAX_N:
            raise DomainError(f"n is capped at {MAX_N}")
        self.params = params
        self.dps = _mp.working_dps(params.n)
        n = params.n
        with mp.workdps(self.dps):
            self.a = mp.mpf(params.a)
            self.N = mp.mpf(params.N)
            m = n + 2
            self.nodes = []
            for k in (1, 2):
                s, w = _mp.weight_nodes(self.a, self.N, k, m, self.dps)
                ps = [self._state(si) for si in s]
                self.nodes.append((s, w, ps))
            s1, w1, p1 = self.nodes[0]
            s2, w2, p2 = self.nodes[1]
            n1, n2 = params.n1, params.n2
            self.h1 = mp.fsum(w * p[1] * si ** (n1 - 1) for si, w, p in zip(s1, w1, p1))
            self.h2 = mp.fsum(w * p[2] * si ** (n2 - 1) for si, w, p in zip(s2, w2, p2))
            self.coincide = mp.mpf(10) ** (-self.dps // 3)

    def _state(self, z):
        return _mp.poly_state(self.params.n1, self.params.n2, self.a, self.N, z)

    def _dstate(self, z, p):
        N, a = self.N, self.a
        return [N * (p[1] + p[2]) / 2, N * ((z - a) * p[1] - p[0]), N * ((z + a) * p[2] - p[0])]

    def vector(self, y):
        """V(y) as three mpmath numbers (requires the engine precision)."""
        y = mp.mpf(y)
        py = self._state(y)
        dpy = None
        acc = []
        for s, w, ps in self.nodes:
            tot = [mp.mpf(0)] * 3
            for si, wi, p in zip(s, w, ps):
                d = si - y
                if abs(d) < self.coincide:
                    # removable singularity: the divided difference tends to p(y) x p'(y)
                    dpy = dpy or self._dstate(y, py)
                    c = _cross(py, dpy)
                    tot = [tot[k] + wi * c[k] for k in range(3)]
                else:
                    c = _cross(py, p)
                    tot = [tot[k] + c[k] * wi / d for k in range(3)]
            acc.append(tot)
        e = mp.exp(self.N * self.a * y)
        hh = self.h1 * self.h2
        return [(acc[0][k] / e - acc[1][k] * e) / hh for k in range(3)]

    def values(self, xs, ys, hx=None, hy=None):
        """Matrix K(x_i, y_j) as floats.

        With ``hx``, ``hy`` (values of h at xs, ys) the entries are multiplied by
        exp(n (hx_i - hy_j)) inside the extended-precision evaluation.
        """
        xs = [float(x) for x in xs]
        ys = [float(y) for y in ys]
        out = np.empty((len(xs), len(ys)))
        with mp.workdps(self.dps):
            N = self.N
            px = {x: self._state(mp.mpf(x)) for x in xs}
            vy = {y: self.vector(y) for y in ys}
            for i, x in enumerate(xs):
                for j, y in enumerate(ys):
                    xm, ym = mp.mpf(x), mp.mpf(y)
                    v = vy[y]
                    if x == y:
                        dp = self._dstate(xm, px[x])
                        body = mp.exp(-N * xm * xm / 2) * mp.fsum(v[k] * dp[k] for k in range(3))
                    else:
                        if abs(x - y) < DIAG_TOL:
                            raise UseDiagonalError("|x - y| below 1e-8: use kernel_diag")
                        pre = mp.exp(-N * (xm * xm + ym * ym) / 4)
                        body = pre * mp.fsum(v[k] * px[x][k] for k in range(3)) / (xm - ym)
                    if hx is not None:
                        body *= mp.exp(self.params.n * (mp.mpf(hx[i]) - mp.mpf(hy[j])))
                    out[i, j] = float(body)
        return out

    def contraction(self, x, y):
        """(V(y) . p(x), |V(y)| |p(x)|): the numerator before division by x - y."""
        with mp.workdps(self.dps):
            v = self.vector(y)
            p = self._state(mp.mpf(x))
            num = mp.fsum(v[k] * p[k] for k in range(3))
            scale = mp.sqrt(mp.fsum(t * t for t in v)) * mp.sqrt(mp.fsum(t * t for t in p))
            return float(num / scale), float(scale)


@lru_cache(maxsize=32)
def engine(params: EnsembleParams) -> KernelEngine:
    """Cached :class:`KernelEngine` for ``params``."""
    return KernelEngine(params)


def kernel(params: EnsembleParams, x: float, y: float) -> float:
    """K_n(x, y) for |x - y| >= 1e-8."""
    if abs(x - y) < DIAG_TOL:
        raise UseDiagonalError("|x - y| below 1e-8: use kernel_diag")
    return float(engine(params).values([x], [y])[0, 0])


def kernel_diag(params: EnsembleParams, x: float) -> float:
    """K_n(x, x), the one-point intensity, via the exact derivative of p."""
    return float(engine(params).values([x], [x])[0, 0])


def kernel_diag_fd(params: EnsembleParams, x: float, step: float = 1e-4) -> float:
    """K_n(x, x) from symmetric off-diagonal values, Richardson-extrapolated in ``step``."""
    eng = engine(params)

    def sym(h):
        m = eng.values([x - h, x + h], [x + h, x - h])
        return 0.5 * (m[0, 0] + m[1, 1])

    return (4.0 * sym(step / 2) - sym(step)) / 3.0


def contraction(params: EnsembleParams, x: float, y: float):
    return engine(params).contraction(x, y)


def rescaled_kernel(params: EnsembleParams, x: float, y: float, curve: CurveData | None = None) -> float:
    """exp(n (h(x) - h(y))) K_n(x, y); the diagonal equals kernel_diag."""
    curve = curve or make_curve(params.a)
    hx, hy = h_rescale(curve, np.array([x, y], dtype=float))
    if x != y and abs(x - y) < DIAG_TOL:
        raise UseDiagonalError("|x - y| below 1e-8: use kernel_diag")
    return float(engine(params).values([x], [y], [hx], [hy])[0, 0])


def kernel_matrix(params: EnsembleParams, xs, ys, curve: CurveData | None = None,
                  rescaled: bool = False, extend: bool = False) -> np.ndarray:
    """K_n (or the rescaled kernel) on the product grid xs x ys.

    ``extend`` admits points outside the bands and (z1, inf) for the rescaled
    kernel, using the edge extension of h (see :func:`h_rescale`).
    """
    if not rescaled:
        return engine(params).values(xs, ys)
    curve = curve or make_curve(params.a)
    hx = h_rescale(curve, np.asarray(xs, dtype=float), extend=extend)
    hy = h_rescale(curve, np.asarray(ys, dtype=float), extend=extend)
    return engine(params).values(xs, ys, np.atleast_1d(hx), np.atleast_1d(hy))


# ---------------------------------------------------------------------------
# Limit reports
# ---------------------------------------------------------------------------

@dataclass
class KernelGrid:
    """Rescaled-kernel values on a (u, v) lattice with their limits."""

    params: EnsembleParams
    u: np.ndarray
    v: np.ndarray
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    limit_values: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def abs_error(self) -> np.ndarray:
        return np.abs(self.values - self.limit_values)

    @property
    def max_error(self) -> float:
        return float(np.max(self.abs_error))

    def rows(self):
        """Flat records with the CSV columns x, y, u, v, value, limit_value, abs_error."""
        err = self.abs_error
        for i in range(len(self.u)):
            for j in range(len(self.v)):
                yield {"x": self.x[i], "y": self.y[j], "u": self.u[i], "v": self.v[j],
                       "value": self.values[i, j], "limit_value": self.limit_values[i, j],
                       "abs_error": err[i, j]}


def default_grid(lo: float, hi: float, m: int = 13) -> np.ndarray:
    """The m equispaced lattice coordinates on [lo, hi] (used for both u and v)."""
    return np.linspace(lo, hi, m)


def _sinc(d):
    return np.where(d == 0, 1.0, np.sin(np.pi * d) / np.where(d == 0, 1.0, np.pi * d))


def sine_limit_report(params: EnsembleParams, x0: float, grid=None,
                      curve: CurveData | None = None) -> KernelGrid:
    """Compare (1/(n rho)) K^_n(x0 + u/(n rho), x0 + v/(n rho)) with the sine kernel."""
    curve = curve or make_curve(params.a)
    u = np.asarray(default_grid(-3.0, 3.0) if grid is None else grid, dtype=float)
    n = params.n
    r0 = rho(curve, x0)
    if not r0 > 0:
        raise DomainError("x0 must lie strictly inside a band")
    scale = n * r0
    x = x0 + u / scale
    ax = np.abs(x)
    if np.any((ax <= curve.z2) | (ax >= curve.z1)):
        raise ShrinkGridError("scaled sine-test grid leaves the band; shrink the grid")
    vals = kernel_matrix(params, x, x, curve, rescaled=True) / scale
    limit = _sinc(u[:, None] - u[None, :])
    return KernelGrid(params, u, u.copy(), x, x.copy(), vals, limit,
                      {"test": "sine", "x0": float(x0), "rho_x0": float(r0), "scale": float(scale)})


def edge_points(curve: CurveData, edge: str, n: int, u):
    """Physical points for the Airy test: z1 + u s1, z2 - u s2 and their mirrors."""
    u = np.asarray(u, dtype=float)
    s1 = (curve.rho1 * n) ** (-2.0 / 3.0)
    s2 = (curve.rho2 * n) ** (-2.0 / 3.0)
    table = {"z1": (curve.z1, s1), "-z1": (-curve.z1, -s1),
             "z2": (curve.z2, -s2), "-z2": (-curve.z2, s2)}
    if edge not in table:
        raise DomainError("edge must be one of z1, z2, -z1, -z2")
    e, s = table[edge]
    return e + u * s, abs(s)


def airy_limit_report(params: EnsembleParams, edge: str = "z1", grid=None,
                      curve: CurveData | None = None) -> KernelGrid:
    """Compare the edge-scaled rescaled kernel with the Airy kernel.

    Orientation: x = z1 + u/(rho1 n)^{2/3} at the outer edge and
    x = z2 - u/(rho2 n)^{2/3} at the inner edge, mirrored at -z1, -z2, so u > 0
    always points away from the band.
    """
    curve = curve or make_curve(params.a)
    u = np.asarray(default_grid(-4.0, 2.0) if grid is None else grid, dtype=float)
    n = params.n
    x, s = edge_points(curve, edge, n, u)
    if np.any(np.abs(x) < 1e-9):
        raise ShrinkGridError("scaled Airy-test grid reaches the origin; shrink the grid")
    vals = kernel_matrix(params, x, x, curve, rescaled=True, extend=True) * s
    limit = np.array([[airy_kernel(ui, vj) for vj in u] for ui in u])
    return KernelGrid(params, u, u.copy(), x, x.copy(), vals, limit,
                      {"test": "airy", "edge": edge, "scale": float(1.0 / s)})
