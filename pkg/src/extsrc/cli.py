"""Command-line front end: ``extsrc <command> [options]``.

Every command validates its options first, computes, and only then writes
CSV or JSON to ``--out`` (default stdout).  Exit codes: 0 success, 1
computation error or failed verification, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .errors import ExtSrcError

COMMANDS = ("curve", "density", "lambda", "poly", "kernel", "sine-test", "airy-test",
            "asymptotics", "zeros", "simulate", "verify")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_num(r[c]) for c in columns])
    return buf.getvalue()


def _plain(v):
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


def to_json(obj) -> str:
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _records(rows, columns, fmt: str) -> str:
    rows = list(rows)
    if fmt == "json":
        return to_json([{c: r[c] for c in columns} for r in rows])
    return to_csv(rows, columns)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _validate(args) -> None:
    finite = lambda v: v is None or math.isfinite(v)
    for name in ("a", "x0", "umin", "umax"):
        _require(finite(getattr(args, name, None)), f"--{name} must be finite")
    if args.n is not None:
        _require(args.n >= 1, "--n must be positive")
    if args.command in ("asymptotics", "zeros", "sine-test", "airy-test", "simulate", "kernel"):
        _require(args.n is None or args.n % 2 == 0, "--n must be even for this command")
    if args.grid is not None:
        _require(args.grid >= 2, "--grid must be at least 2")
    if args.umin is not None and args.umax is not None:
        _require(args.umin < args.umax, "--umin must be below --umax")
    if args.samples is not None:
        _require(args.samples >= 1, "--samples must be positive")
    if args.bins is not None:
        _require(args.bins >= 5, "--bins must be at least 5")
    if args.command == "zeros":
        _require(args.n is None or args.n <= 48, "zeros supports --n <= 48")
    if args.command == "simulate":
        _require(args.n is None or args.n <= 2048, "simulate supports --n <= 2048")
    if args.command in ("kernel", "sine-test", "airy-test", "poly", "asymptotics"):
        _require(args.n is None or args.n <= 64, "--n <= 64 for kernel and polynomial commands")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _curve(args):
    from .spectral_curve import make_curve
    return make_curve(args.a)


def cmd_curve(args) -> str:
    c = _curve(args)
    d = c.as_dict()
    d.update({"l1": c.l1, "l2": c.l2, "l3_re": c.l3.real, "l3_im": c.l3.imag})
    if args.format == "csv":
        return to_csv([d], list(d))
    return to_json(d)


def density_grid(curve, points: int) -> np.ndarray:
    """Grid over [-z1 - 0.5, z1 + 0.5] with band points clustered at the edges."""
    per_band = max(3, int(0.45 * points))
    rest = max(2, points - 2 * per_band)
    t = np.linspace(0.0, 1.0, per_band)
    band = curve.z2 + (curve.z1 - curve.z2) * np.sin(0.5 * math.pi * t) ** 2
    outer = np.linspace(curve.z1, curve.z1 + 0.5, rest // 3 + 1)[1:]
    gap = np.linspace(0.0, curve.z2, max(1, rest // 6) + 2)[1:-1]
    pos = np.concatenate([gap, band, outer])
    return np.unique(np.concatenate([-pos, [0.0], pos]))


def cmd_density(args) -> str:
    from .spectral_curve import rho
    c = _curve(args)
    x = density_grid(c, args.grid or 400)
    r = rho(c, x)
    return _records(({"x": xi, "rho": ri} for xi, ri in zip(x, r)), ["x", "rho"], args.format)


def _x_grid(args, c, pad: float = 1.0):
    lo = args.umin if args.umin is not None else -c.z1 - pad
    hi = args.umax if args.umax is not None else c.z1 + pad
    return np.linspace(lo, hi, args.grid or 201)


def cmd_lambda(args) -> str:
    from .spectral_curve import lambda_values
    c = _curve(args)
    x = _x_grid(args, c)
    x = x[np.min(np.abs(x[:, None] - c.branch_points), axis=1) > 1e-9]
    cols = {k: lambda_values(c, k, x, "+") for k in (1, 2, 3)}
    rows = ({"x": xi, **{f"lambda{k}_re": cols[k][i].real for k in cols},
             **{f"lambda{k}_im": cols[k][i].imag for k in cols}} for i, xi in enumerate(x))
    names = ["x"] + [f"lambda{k}_{p}" for k in (1, 2, 3) for p in ("re", "im")]
    return _records(rows, names, args.format)


def cmd_poly(args) -> str:
    from .multiple_hermite import EnsembleParams, eval_P_scaled
    c = _curve(args)
    p = EnsembleParams.theorem(args.a, args.n or 16)
    x = _x_grid(args, c, 0.5)
    m, ls = eval_P_scaled(p, x)
    rows = ({"x": xi, "mantissa": mi, "log_scale": li} for xi, mi, li in zip(x, m, ls))
    return _records(rows, ["x", "mantissa", "log_scale"], args.format)


def cmd_kernel(args) -> str:
    from .finite_kernel import kernel_matrix
    from .multiple_hermite import EnsembleParams
    c = _curve(args)
    p = EnsembleParams.theorem(args.a, args.n or 16)
    x = np.linspace(args.umin if args.umin is not None else -c.z1 - 0.5,
                    args.umax if args.umax is not None else c.z1 + 0.5, args.grid or 41)
    k = kernel_matrix(p, x, x)
    rows = ({"x": x[i], "y": x[j], "value": k[i, j]} for i in range(len(x)) for j in range(len(x)))
    return _records(rows, ["x", "y", "value"], args.format)


GRID_COLUMNS = ["x", "y", "u", "v", "value", "limit_value", "abs_error"]


def _lattice(args, lo: float, hi: float):
    from .finite_kernel import default_grid
    return default_grid(args.umin if args.umin is not None else lo,
                        args.umax if args.umax is not None else hi, args.grid or 13)


def _grid_output(rep, args) -> str:
    if args.format == "json":
        return to_json({"max_error": rep.max_error, "metadata": rep.metadata,
                        "rows": [{c: r[c] for c in GRID_COLUMNS} for r in rep.rows()]})
    return to_csv(rep.rows(), GRID_COLUMNS)


def cmd_sine(args) -> str:
    from .finite_kernel import sine_limit_report
    from .multiple_hermite import EnsembleParams
    c = _curve(args)
    x0 = args.x0 if args.x0 is not None else 0.5 * (c.z1 + c.z2)
    rep = sine_limit_report(EnsembleParams.theorem(args.a, args.n or 32), x0,
                            _lattice(args, -3.0, 3.0), c)
    return _grid_output(rep, args)


def cmd_airy(args) -> str:
    from .finite_kernel import airy_limit_report
    from .multiple_hermite import EnsembleParams
    c = _curve(args)
    rep = airy_limit_report(EnsembleParams.theorem(args.a, args.n or 32), args.edge or "z1",
                            _lattice(args, -4.0, 2.0), c)
    return _grid_output(rep, args)


def cmd_asymptotics(args) -> str:
    from .asymptotics import regime_report
    c = _curve(args)
    ns = [args.n] if args.n else [16, 24, 32]
    cols = ["regime", "n", "point", "exact", "approx", "rel_error"]
    rows = [r for reg in ("outer", "band", "edge") for r in regime_report(c, reg, ns).rows()]
    return _records(rows, cols, args.format)


def cmd_zeros(args) -> str:
    from .asymptotics import zeros_ks_distance, zeros_of_P
    c = _curve(args)
    z = zeros_of_P(c, args.n or 40)
    if args.format == "json":
        return to_json({"n": len(z), "zeros": z, "ks_distance": zeros_ks_distance(c, z)})
    return to_csv(({"k": k, "zero": v} for k, v in enumerate(z)), ["k", "zero"])


def cmd_simulate(args) -> str:
    from . import ensemble_sim as sim
    c = _curve(args)
    n = args.n or 200
    samples = args.samples or 100
    seed = args.seed if args.seed is not None else 0
    batch = sim.sample_batch(n, args.a, seed, samples)
    if args.format == "csv":
        return to_csv(sim.batch_rows(batch), ["sample_index", "k", "eigenvalue"])
    if samples < sim.MIN_DENSITY_SAMPLES:
        raise UsageError(f"summary statistics need --samples >= {sim.MIN_DENSITY_SAMPLES}")
    est = sim.empirical_density(batch, args.bins or 60, c)
    scaling = None
    if samples >= sim.MIN_EDGE_SAMPLES and 4 * n <= sim.MAX_N:
        scaling = sim.edge_scaling(batch, sim.sample_batch(4 * n, args.a, seed + 1, samples))
    return to_json(sim.summary(est, scaling))


def cmd_verify(args):
    from .acceptance import format_table, run_all
    only = None
    if args.criteria:
        try:
            only = {int(s) for s in args.criteria.split(",")}
        except ValueError:
            raise UsageError("--criteria takes comma-separated integers") from None
    res = run_all(quick=args.quick, a=args.a, only=only)
    if args.format == "json":
        text = to_json([{"criterion": r.number, "title": r.title, "passed": r.passed,
                         "measured": r.measured, "threshold": r.threshold} for r in res])
    else:
        text = format_table(res) + "\n"
    return text, all(r.passed for r in res)


HANDLERS = {"curve": cmd_curve, "density": cmd_density, "lambda": cmd_lambda, "poly": cmd_poly,
            "kernel": cmd_kernel, "sine-test": cmd_sine, "airy-test": cmd_airy,
            "asymptotics": cmd_asymptotics, "zeros": cmd_zeros, "simulate": cmd_simulate,
            "verify": cmd_verify}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", type=float, default=2.0, help="source strength (a > 1)")
    common.add_argument("--n", type=int, help="matrix size / polynomial degree")
    common.add_argument("--x0", type=float, help="bulk point for sine-test")
    common.add_argument("--edge", choices=["z1", "z2", "-z1", "-z2"], help="edge for airy-test")
    common.add_argument("--grid", type=int, help="number of grid points")
    common.add_argument("--umin", type=float, help="lower grid end")
    common.add_argument("--umax", type=float, help="upper grid end")
    common.add_argument("--seed", type=int, help="random seed for simulate")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--bins", type=int, help="histogram bins")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], help="output format")
    common.add_argument("--quick", action="store_true", help="reduced sizes for verify")
    common.add_argument("--criteria", help="verify only these comma-separated criteria")
    parser = argparse.ArgumentParser(prog="extsrc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _join_negative_values(argv):
    """Let ``--edge -z1`` parse like ``--edge=-z1``."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--edge":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--edge={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = "json" if args.command == "curve" else "csv"
        if args.command == "verify":
            args.format = "table"
    try:
        _validate(args)
        out = HANDLERS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"extsrc: error: {exc}", file=sys.stderr)
        return 2
    except ExtSrcError as exc:
        print(f"extsrc: {exc}", file=sys.stderr)
        return 1
    ok = True
    if isinstance(out, tuple):
        out, ok = out
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())
