"""Monte Carlo sampler for M = A + G with A = diag(a, ..., a, -a, ..., -a).

The density exp(-n Tr(M^2/2 - A M)) makes G = M - A a GUE matrix with
diagonal entries N(0, 1/n) and off-diagonal real and imaginary parts
N(0, 1/(2n)).  Sample ``i`` of a batch with seed ``s`` draws from the PCG64
stream of ``SeedSequence([s, i])``, so batches do not depend on the number of
worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StatisticsError
from .multiple_hermite import EnsembleParams, eval_P
from .spectral_curve import CurveData, make_curve, rho_cdf

__all__ = [
    "SampleBatch",
    "sample_spectrum",
    "sample_matrix",
    "sample_batch",
    "DensityEstimate",
    "empirical_density",
    "density_bin_edges",
    "EdgeScaling",
    "edge_scaling",
    "char_poly_check",
    "one_point_check",
    "batch_rows",
    "summary",
    "thread_count",
]

MAX_N = 2048
MIN_DENSITY_SAMPLES = 50
MIN_EDGE_SAMPLES = 200


def thread_count() -> int:
    """Worker threads, capped by the EXTSRC_THREADS environment variable."""
    env = os.environ.get("EXTSRC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError("EXTSRC_THREADS must be a positive integer") from None
    return min(8, os.cpu_count() or 1)


def _check(n: int, a: float) -> None:
    if n < 2 or n % 2 or n > MAX_N:
        raise DomainError(f"n must be even with 2 <= n <= {MAX_N}")
    if not a > 1:
        raise DomainError("a must exceed 1")


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _matrix(n: int, a: float, seed: int, index: int) -> np.ndarray:
    rng = _rng(seed, index)
    s = math.sqrt(1.0 / (2 * n))
    g = rng.normal(0.0, s, (n, n)) + 1j * rng.normal(0.0, s, (n, n))
    h = np.triu(g, 1)
    h = h + h.conj().T
    h[np.diag_indices(n)] = rng.normal(0.0, math.sqrt(1.0 / n), n)
    h[np.diag_indices(n)] += np.repeat([a, -a], n // 2)
    return h


def _draw(n: int, a: float, seed: int, index: int) -> np.ndarray:
    return np.linalg.eigvalsh(_matrix(n, a, seed, index))


def sample_matrix(n: int, a: float, seed: int, index: int = 0) -> np.ndarray:
    """The Hermitian matrix A + G behind :func:`sample_spectrum` with the same arguments."""
    _check(n, a)
    return _matrix(n, a, int(seed), int(index))


def sample_spectrum(n: int, a: float, seed: int, index: int = 0) -> np.ndarray:
    """Sorted eigenvalues of one draw of A + G."""
    _check(n, a)
    return _draw(n, a, int(seed), int(index))


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Eigenvalues of ``samples`` independent draws, one sorted row per draw."""

    n: int
    a: float
    seed: int
    eigenvalues: np.ndarray

    @property
    def samples(self) -> int:
        return self.eigenvalues.shape[0]


def sample_batch(n: int, a: float, seed: int, samples: int, threads: int | None = None) -> SampleBatch:
    """Draw ``samples`` spectra; the result is independent of ``threads``."""
    _check(n, a)
    if samples < 1:
        raise DomainError("samples must be positive")
    threads = thread_count() if threads is None else max(1, int(threads))
    work = lambda i: _draw(n, a, int(seed), i)
    if threads == 1:
        rows = [work(i) for i in range(samples)]
    else:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(work, range(samples)))
    return SampleBatch(n, float(a), int(seed), np.array(rows))


# ---------------------------------------------------------------------------
# Density statistics
# ---------------------------------------------------------------------------

def density_bin_edges(curve: CurveData, bins: int) -> np.ndarray:
    """Edges over [-z1 - 0.5, z1 + 0.5] containing +-z1 and +-z2 exactly.

    The bins are shared among the five segments in proportion to their
    lengths, at least one per segment.
    """
    z1, z2 = curve.z1, curve.z2
    knots = np.array([-z1 - 0.5, -z1, -z2, z2, z1, z1 + 0.5])
    if bins < len(knots) - 1:
        raise DomainError("need at least 5 bins")
    lengths = np.diff(knots)
    share = np.maximum(1, np.floor(bins * lengths / lengths.sum()).astype(int))
    while share.sum() < bins:
        share[np.argmax(lengths / share)] += 1
    while share.sum() > bins:
        share[np.argmax(np.where(share > 1, share, 0))] -= 1
    parts = [np.linspace(knots[i], knots[i + 1], share[i] + 1)[:-1] for i in range(5)]
    return np.concatenate(parts + [knots[-1:]])


@dataclass(frozen=True)
class DensityEstimate:
    edges: np.ndarray
    density: np.ndarray
    l1: float
    band_masses: tuple
    gap_fraction: float
    outside_fraction: float


def empirical_density(batch: SampleBatch, bins: int = 60, curve: CurveData | None = None) -> DensityEstimate:
    """Normalized histogram with its L1 distance to rho, band masses and gap occupancy.

    The L1 distance compares bin probabilities, sum |p_emp - integral of rho
    over the bin|; eigenvalues outside the histogram range count fully.
    """
    if batch.samples < MIN_DENSITY_SAMPLES:
        raise StatisticsError(f"need at least {MIN_DENSITY_SAMPLES} samples")
    curve = curve or make_curve(batch.a)
    ev = batch.eigenvalues.ravel()
    total = ev.size
    edges = density_bin_edges(curve, bins)
    counts, _ = np.histogram(ev, edges)
    p_emp = counts / total
    p_rho = np.diff(rho_cdf(curve, edges))
    outside = 1.0 - counts.sum() / total
    l1 = float(np.sum(np.abs(p_emp - p_rho)) + outside)
    z1, z2 = curve.z1, curve.z2
    left = np.count_nonzero((ev >= -z1) & (ev <= -z2)) / total
    right = np.count_nonzero((ev >= z2) & (ev <= z1)) / total
    gap = np.count_nonzero(np.abs(ev) <= z2 - 0.1) / total
    return DensityEstimate(edges, p_emp / np.diff(edges), l1, (left, right), gap, outside)


# ---------------------------------------------------------------------------
# Edge statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeScaling:
    gamma: float
    n_small: int
    n_large: int
    std_small: float
    std_large: float
    mean_max_large: float
    mean_min_large: float
    se_mean_max_large: float
    se_mean_min_large: float
    std_min_large: float


def edge_scaling(small: SampleBatch, large: SampleBatch) -> EdgeScaling:
    """Exponent gamma in std(lambda_max) ~ n^-gamma from two batch sizes."""
    for b in (small, large):
        if b.samples < MIN_EDGE_SAMPLES:
            raise StatisticsError(f"need at least {MIN_EDGE_SAMPLES} samples per size")
    s1 = float(np.std(small.eigenvalues[:, -1], ddof=1))
    s2 = float(np.std(large.eigenvalues[:, -1], ddof=1))
    gamma = math.log(s1 / s2) / math.log(large.n / small.n)
    mx = large.eigenvalues[:, -1]
    mn = large.eigenvalues[:, 0]
    m = large.samples
    return EdgeScaling(gamma, small.n, large.n, s1, s2, float(np.mean(mx)), float(np.mean(mn)),
                       float(np.std(mx, ddof=1) / math.sqrt(m)), float(np.std(mn, ddof=1) / math.sqrt(m)),
                       float(np.std(mn, ddof=1)))


def char_poly_check(batch: SampleBatch, x) -> list:
    """Monte Carlo mean of det(x - M) with its standard error against exact P_n(x)."""
    params = EnsembleParams.theorem(batch.a, batch.n)
    out = []
    for xv in np.atleast_1d(np.asarray(x, dtype=float)):
        d = np.prod(xv - batch.eigenvalues, axis=1)
        out.append({"x": float(xv), "mean": float(np.mean(d)),
                    "stderr": float(np.std(d, ddof=1) / math.sqrt(batch.samples)),
                    "exact": eval_P(params, float(xv)).to_float()})
    return out


def one_point_check(batch: SampleBatch, edges) -> dict:
    """Empirical bin probabilities with standard errors against (1/n) K_n(x, x)."""
    from .finite_kernel import kernel_diag

    params = EnsembleParams.theorem(batch.a, batch.n)
    edges = np.asarray(edges, dtype=float)
    per_sample = np.array([np.histogram(row, edges)[0] for row in batch.eigenvalues]) / batch.n
    t, w = np.polynomial.legendre.leggauss(12)
    exact = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        xs = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
        exact.append(0.5 * (hi - lo) * sum(wi * kernel_diag(params, float(x)) for x, wi in zip(xs, w))
                     / batch.n)
    return {"edges": edges, "empirical": per_sample.mean(axis=0),
            "stderr": per_sample.std(axis=0, ddof=1) / math.sqrt(batch.samples),
            "exact": np.array(exact)}


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def batch_rows(batch: SampleBatch):
    """Records with the CSV columns sample_index, k, eigenvalue."""
    for i, row in enumerate(batch.eigenvalues):
        for k, v in enumerate(row):
            yield {"sample_index": i, "k": k, "eigenvalue": float(v)}


def summary(estimate: DensityEstimate, scaling: EdgeScaling | None = None) -> dict:
    """JSON-ready statistics: l1, band_masses, gap_fraction and gamma."""
    out = {"l1": estimate.l1, "band_masses": list(estimate.band_masses),
           "gap_fraction": estimate.gap_fraction}
    if scaling is not None:
        out["gamma"] = scaling.gamma
    return out
