"""Acceptance checks shared by the test-suite and ``extsrc verify``.

Each ``criterion_k`` returns a :class:`CriterionResult` carrying the measured
quantities next to their thresholds.  ``quick`` shrinks index ranges and
sample counts for fast smoke runs; the thresholds never change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from . import ensemble_sim as sim
from .finite_kernel import airy_limit_report, kernel_diag, kernel_matrix, sine_limit_report
from .multiple_hermite import (EnsembleParams, det_scaled, h_constant, moment_mp, ode_residual,
                               psi_plus, transfer_check, y_plus)
from .spectral_curve import (band_mass, lambda_values, make_curve, rho, z_of_xi)

__all__ = ["CriterionResult", "CRITERIA", "run_all", "format_table"]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    threshold: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] criterion {self.number:2d} {self.title}: {shown} (need {self.threshold})"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


# ---------------------------------------------------------------------------
# 1. Branch points
# ---------------------------------------------------------------------------

def _newton_critical_points(a: float) -> tuple:
    """Positive zeros of z'(xi) from the quotient rule, by safeguarded Newton.

    The numerator of z'(xi) is positive at 0, negative at a and positive for
    large xi, which brackets the two positive critical points.
    """
    P = np.polynomial.Polynomial([0.0, -(a * a - 1.0), 0.0, 1.0])
    Q = np.polynomial.Polynomial([-a * a, 0.0, 1.0])
    g = P.deriv() * Q - P * Q.deriv()
    dg = g.deriv()
    roots = []
    for lo, hi in ((0.0, a), (a, 2.0 * a + 2.0)):
        x = 0.5 * (lo + hi)
        for _ in range(100):
            step = g(x) / dg(x)
            nxt = x - step
            if not lo < nxt < hi:
                nxt = 0.5 * (lo + hi)
            if np.sign(g(nxt)) == np.sign(g(lo)):
                lo = nxt
            else:
                hi = nxt
            if abs(nxt - x) < 1e-15 * max(1.0, abs(x)):
                x = nxt
                break
            x = nxt
        roots.append(x)
    return tuple(roots)


def criterion_1(quick: bool = False, a: float = 2.0) -> CriterionResult:
    worst = 0.0
    for av in (1.5, 2.0, 3.0):
        c = make_curve(av)
        p, q = _newton_critical_points(av)
        z1, z2 = float(z_of_xi(av, q)), float(z_of_xi(av, p))
        worst = max(worst, abs(p - c.p), abs(q - c.q), abs(z1 - c.z1), abs(z2 - c.z2))
    return CriterionResult(1, "branch points vs Newton", worst <= 1e-10,
                           {"max_diff": worst}, "<= 1e-10")


# ---------------------------------------------------------------------------
# 2. Density
# ---------------------------------------------------------------------------

def criterion_2(quick: bool = False, a: float = 2.0) -> CriterionResult:
    c = make_curve(a)
    masses = [float(band_mass(c, -c.z1, -c.z2)), float(band_mass(c, c.z2, c.z1))]
    d = np.logspace(-8, -5, 7)
    slope = float(np.polyfit(np.log(d), np.log(rho(c, c.z1 - d)), 1)[0])
    edge = float(rho(c, c.z1 - 1e-8) * math.pi / math.sqrt(1e-8))
    rel = abs(edge / c.rho1 - 1)
    ok = max(abs(m - 0.5) for m in masses) <= 1e-8 and abs(slope - 0.5) <= 0.02 and rel <= 0.01
    return CriterionResult(2, "density mass and edge law", ok,
                           {"masses": masses, "exponent": slope, "rho1_rel": rel},
                           "mass 0.5 +- 1e-8, exponent 0.5 +- 0.02, rho1 within 1%")


# ---------------------------------------------------------------------------
# 3. lambda jumps and inequalities
# ---------------------------------------------------------------------------

def lambda_jump_errors(a: float = 2.0, m: int = 7) -> dict:
    """Deviations of the six boundary-value relations of the lambda-functions."""
    c = make_curve(a)
    z1, z2 = c.z1, c.z2
    L = lambda k, x, s: lambda_values(c, k, x, s)
    t = (np.arange(m) + 0.5) / m
    gap = -z2 + 2 * z2 * t
    left_out = -z1 - 3.0 * t
    below_z2 = z2 - 0.01 - 5.0 * t
    band_r = z2 + (z1 - z2) * t
    band_l = -band_r
    ipi = 1j * math.pi
    return {
        "l1_gap": float(np.max(np.abs(L(1, gap, 1) - L(1, gap, -1) + ipi))),
        "l1_left": float(np.max(np.abs(L(1, left_out, 1) - L(1, left_out, -1) + 2 * ipi))),
        "l2_left": float(np.max(np.abs(L(2, below_z2, 1) - L(2, below_z2, -1) - ipi))),
        "l1_l2_band": float(max(np.max(np.abs(L(1, band_r, 1) - L(2, band_r, -1))),
                                np.max(np.abs(L(1, band_r, -1) - L(2, band_r, 1))))),
        "l1_l3_band": float(max(np.max(np.abs(L(1, band_l, 1) - L(3, band_l, -1))),
                                np.max(np.abs(L(1, band_l, -1) - ipi - L(3, band_l, 1))))),
        "l3_left": float(np.max(np.abs(L(3, left_out, 1) - L(3, left_out, -1) - ipi))),
    }


def lambda_inequality_margins(a: float = 2.0, m: int = 9, eps: float = 0.05) -> dict:
    """Smallest margins of the real-part orderings (positive means satisfied)."""
    c = make_curve(a)
    z1, z2 = c.z1, c.z2
    L = lambda k, x, s=None: lambda_values(c, k, x, s)
    # real axis minus the relevant band, away from the edges where equality holds
    off_r = np.concatenate([np.linspace(-z1 - 2, z2 - 0.05, m), np.linspace(z1 + 0.05, z1 + 2, m)])
    off_l = -off_r
    prop_a = float(np.min(L(1, off_r, -1).real - L(2, off_r, 1).real))
    prop_b = float(np.min(L(1, off_l, -1).real - L(3, off_l, 1).real))
    t = (np.arange(m) + 0.5) / m
    band = z2 + 0.1 + (z1 - z2 - 0.2) * t
    lens = []
    for sg in (1, -1):
        zr = band + 1j * sg * eps
        l1, l2, l3 = (L(k, zr).real for k in (1, 2, 3))
        lens.append(min(np.min(l1 - l3), np.min(l2 - l1)))
        zl = -band + 1j * sg * eps
        l1, l2, l3 = (L(k, zl).real for k in (1, 2, 3))
        lens.append(min(np.min(l1 - l2), np.min(l3 - l1)))
    return {"ordering_2_1": prop_a, "ordering_3_1": prop_b, "lens": float(min(lens))}


def criterion_3(quick: bool = False, a: float = 2.0) -> CriterionResult:
    jumps = lambda_jump_errors(a, m=4 if quick else 7)
    margins = lambda_inequality_margins(a, m=5 if quick else 9)
    worst = max(jumps.values())
    ok = worst <= 1e-8 and min(margins.values()) > 0
    return CriterionResult(3, "lambda jumps and orderings", ok,
                           {"max_jump_error": worst, "min_margin": min(margins.values())},
                           "jumps <= 1e-8, margins > 0")


# ---------------------------------------------------------------------------
# 4. Orthogonality
# ---------------------------------------------------------------------------

def criterion_4(quick: bool = False, a: float = 2.0) -> CriterionResult:
    n_max = 8 if quick else 16
    worst_orth = 0.0
    worst_ratio = 0.0
    for n in range(1, n_max + 1):
        for n1 in range(n + 1):
            p = EnsembleParams(a, n1, n - n1)
            for k, nk in ((1, n1), (2, n - n1)):
                if nk == 0:
                    continue
                h = abs(moment_mp(p, k, nk))
                for j in range(nk):
                    worst_orth = max(worst_orth, float(abs(moment_mp(p, k, j)) / h))
            if n1 >= 1:
                cval = (h_constant(p, 1) / h_constant(p.shifted(-1, 0), 1)).to_float()
                worst_ratio = max(worst_ratio, abs(cval - n1 / p.N))
            if n - n1 >= 1:
                dval = (h_constant(p, 2) / h_constant(p.shifted(0, -1), 2)).to_float()
                worst_ratio = max(worst_ratio, abs(dval - (n - n1) / p.N))
    ok = worst_orth <= 1e-8 and worst_ratio <= 1e-8
    return CriterionResult(4, "orthogonality and h-ratios", ok,
                           {"n_max": n_max, "moment_ratio": worst_orth, "h_ratio_error": worst_ratio},
                           "<= 1e-8")


# ---------------------------------------------------------------------------
# 5. det Y, ODE, transfer
# ---------------------------------------------------------------------------

DET_POINTS = (-2.5, -1.0, 0.3, 1.2, 2.9)


def criterion_5(quick: bool = False, a: float = 2.0) -> CriterionResult:
    top = 4 if quick else 8
    det_err = 0.0
    for n1 in range(1, top + 1):
        for n2 in range(1, top + 1):
            p = EnsembleParams(a, n1, n2)
            for x in DET_POINTS:
                det_err = max(det_err, abs(det_scaled(y_plus(p, psi_plus(p, x))).to_complex() - 1))
    ratios = []
    for n1, n2, x in ((2, 2, 0.7), (4, 3, -1.3), (3, 5, 2.2)):
        p = EnsembleParams(a, n1, n2)
        ratios.append(ode_residual(p, x, 1e-2) / ode_residual(p, x, 5e-3))
    transfer = max(transfer_check(EnsembleParams(a, n1, n2), z)
                   for n1, n2 in ((1, 1), (2, 1), (1, 3), (3, 3))
                   for z in (-1.7, 0.4, 2.6))
    ok = det_err <= 1e-6 and all(abs(r - 4) <= 0.8 for r in ratios) and transfer <= 1e-7
    return CriterionResult(5, "det Y, ODE order, transfer", ok,
                           {"det_error": det_err, "ode_ratios": ratios, "transfer": transfer},
                           "det <= 1e-6, ratio 4 +- 20%, transfer <= 1e-7")


# ---------------------------------------------------------------------------
# 6-7. Kernel
# ---------------------------------------------------------------------------

def kernel_trace(params: EnsembleParams, panels: int = 48, order: int = 16) -> float:
    """(1/n) times the integral of K_n(x, x) over a window holding all the mass."""
    half = params.a + 2.0 + 12.0 / math.sqrt(params.N)
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(-half, half, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * math.fsum(wi * kernel_diag(params, float(x)) for x, wi in zip(xs, w))
    return total / params.n


def reproducing_error(params: EnsembleParams, pts=((0.3, -1.1), (2.2, 1.7), (-2.4, 0.9))) -> float:
    """Max relative deviation of the integral of K(x, s) K(s, y) ds from K(x, y)."""
    half = params.a + 2.0 + 12.0 / math.sqrt(params.N)
    t, w = np.polynomial.legendre.leggauss(24)
    edges = np.linspace(-half, half, 41)
    s = np.concatenate([0.5 * (hi - lo) * t + 0.5 * (hi + lo) for lo, hi in zip(edges[:-1], edges[1:])])
    ws = np.concatenate([0.5 * (hi - lo) * w for lo, hi in zip(edges[:-1], edges[1:])])
    worst = 0.0
    for x, y in pts:
        left = kernel_matrix(params, [x], s)[0]
        right = kernel_matrix(params, s, [y])[:, 0]
        direct = kernel_matrix(params, [x], [y])[0, 0]
        worst = max(worst, abs(np.sum(ws * left * right) - direct) / abs(direct))
    return worst


def criterion_6(quick: bool = False, a: float = 2.0) -> CriterionResult:
    traces = [kernel_trace(EnsembleParams.theorem(a, n)) for n in (4, 8, 16)]
    repro = reproducing_error(EnsembleParams.theorem(a, 4))
    gaps = [kernel_diag(EnsembleParams.theorem(a, n), 0.0) / n for n in (8, 16, 32)]
    s1 = (math.log(gaps[1]) - math.log(gaps[0])) / 8
    s2 = (math.log(gaps[2]) - math.log(gaps[1])) / 16
    log_linear = s1 < 0 and s2 < 0 and abs(s2 / s1 - 1) <= 0.2
    ok = max(abs(t - 1) for t in traces) <= 1e-6 and repro <= 1e-5 and log_linear
    return CriterionResult(6, "kernel trace, reproduction, gap decay", ok,
                           {"trace_error": max(abs(t - 1) for t in traces), "reproducing": repro,
                            "gap_values": gaps, "slope_ratio": s2 / s1},
                           "trace 1 +- 1e-6, reproducing <= 1e-5, slopes within 20%")


def density_sup_error(a: float, n: int) -> float:
    c = make_curve(a)
    xs = c.z2 + (c.z1 - c.z2) * (np.arange(21) + 1) / 22
    p = EnsembleParams.theorem(a, n)
    return max(abs(kernel_diag(p, float(x)) / n - float(rho(c, x))) for x in xs)


def criterion_7(quick: bool = False, a: float = 2.0) -> CriterionResult:
    c = make_curve(a)
    grid = np.linspace(c.z2, c.z1, 2001)[1:-1]
    rmax = float(np.max(rho(c, grid)))
    e16, e32 = density_sup_error(a, 16), density_sup_error(a, 32)
    ok = e32 <= 0.05 * rmax and e32 < e16
    return CriterionResult(7, "one-point function vs rho", ok,
                           {"sup_n16": e16, "sup_n32": e32, "limit": 0.05 * rmax},
                           "n=32 <= 0.05 max rho and below n=16")


# ---------------------------------------------------------------------------
# 8-9. Local universality
# ---------------------------------------------------------------------------

def criterion_8(quick: bool = False, a: float = 2.0) -> CriterionResult:
    c = make_curve(a)
    x0 = 0.5 * (c.z1 + c.z2)
    e16 = sine_limit_report(EnsembleParams.theorem(a, 16), x0, curve=c).max_error
    e32 = sine_limit_report(EnsembleParams.theorem(a, 32), x0, curve=c).max_error
    ratio = e16 / e32
    ok = e32 <= 0.1 and e32 < e16 and 1.3 <= ratio <= 3.2
    return CriterionResult(8, "sine kernel limit", ok,
                           {"err_n16": e16, "err_n32": e32, "ratio": ratio},
                           "n=32 <= 0.1, ratio in [1.3, 3.2]")


def criterion_9(quick: bool = False, a: float = 2.0) -> CriterionResult:
    c = make_curve(a)
    errs = {}
    mirror = 0.0
    for edge in ("z1", "z2"):
        reps = {n: airy_limit_report(EnsembleParams.theorem(a, n), edge, curve=c) for n in (16, 32)}
        errs[edge] = [reps[16].max_error, reps[32].max_error]
        m = airy_limit_report(EnsembleParams.theorem(a, 32), "-" + edge, curve=c)
        mirror = max(mirror, float(np.max(np.abs(m.values - reps[32].values))))
    ok = all(e[1] <= 0.15 and e[1] < e[0] for e in errs.values()) and mirror <= 1e-6
    return CriterionResult(9, "Airy kernel limit", ok,
                           {"z1": errs["z1"], "z2": errs["z2"], "mirror": mirror},
                           "n=32 <= 0.15, decreasing, mirror <= 1e-6")


# ---------------------------------------------------------------------------
# 10. Asymptotics of P_n
# ---------------------------------------------------------------------------

def criterion_10(quick: bool = False, a: float = 2.0) -> CriterionResult:
    c = make_curve(a)
    factors = {}
    for regime in ("outer", "band", "edge"):
        m = asy.regime_report(c, regime, (16, 32)).max_errors()
        factors[regime] = float(m[0] / m[1])
    ov = asy.overlap_check(c, 32)
    overlap_ok = all(np.all(np.array(v["difference"]) <= np.array(v["budget"])) for v in ov.values())
    z40 = asy.zeros_of_P(c, 40)
    z20 = asy.zeros_of_P(c, 20)
    ks40, ks20 = asy.zeros_ks_distance(c, z40), asy.zeros_ks_distance(c, z20)
    sym = float(np.max(np.abs(z40 + z40[::-1])))
    ok = (min(factors.values()) >= 1.5 and overlap_ok and ks40 <= 0.1 and ks40 < ks20
          and sym <= 1e-9)
    return CriterionResult(10, "asymptotics of P_n", ok,
                           {**{f"{k}_factor": v for k, v in factors.items()},
                            "overlap": overlap_ok, "ks_n40": ks40, "symmetry": sym},
                           "factors >= 1.5, overlap within budget, KS <= 0.1, symmetry <= 1e-9")


# ---------------------------------------------------------------------------
# 11. Monte Carlo
# ---------------------------------------------------------------------------

def criterion_11(quick: bool = False, a: float = 2.0, seed: int = 20240601) -> CriterionResult:
    c = make_curve(a)
    dens = sim.empirical_density(sim.sample_batch(200, a, seed, 50 if quick else 100), 60, c)
    edge = sim.edge_scaling(sim.sample_batch(100, a, seed + 1, 200),
                            sim.sample_batch(400, a, seed + 2, 200))
    cp = sim.char_poly_check(sim.sample_batch(4, a, seed + 3, 5000 if quick else 10000), [0.0, 1.0, 3.0])
    zscores = [abs(r["mean"] - r["exact"]) / r["stderr"] for r in cp]
    ok = (dens.l1 <= 0.1 and all(abs(m - 0.5) <= 0.02 for m in dens.band_masses)
          and dens.gap_fraction <= 0.005 and 0.5 <= edge.gamma <= 0.85 and max(zscores) <= 3)
    return CriterionResult(11, "Monte Carlo", ok,
                           {"l1": dens.l1, "band_masses": list(dens.band_masses),
                            "gap_fraction": dens.gap_fraction, "gamma": edge.gamma,
                            "char_poly_z": max(zscores)},
                           "L1 <= 0.1, masses 0.5 +- 0.02, gap <= 0.5%, gamma in [0.5, 0.85], |z| <= 3")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
            11: criterion_11}


def run_all(quick: bool = False, a: float = 2.0, only=None) -> list:
    """Evaluate the selected criteria; failures to evaluate count as failed criteria."""
    out = []
    for k, fn in CRITERIA.items():
        if only and k not in only:
            continue
        try:
            out.append(fn(quick=quick, a=a))
        except Exception as exc:  # reported, never silently passed
            out.append(CriterionResult(k, fn.__name__, False, {"error": repr(exc)}, "evaluates"))
    return out


def format_table(results) -> str:
    return "\n".join(r.line() for r in results)
