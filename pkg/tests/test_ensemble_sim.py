import json

import numpy as np
import pytest

from extsrc.errors import DomainError, StatisticsError
from extsrc.ensemble_sim import (batch_rows, char_poly_check, density_bin_edges, edge_scaling,
                                 empirical_density, one_point_check, sample_batch, sample_matrix,
                                 sample_spectrum, summary, thread_count)

A = 2.0


@pytest.fixture(scope="module")
def batch200():
    return sample_batch(200, A, seed=7, samples=100)


@pytest.fixture(scope="module")
def edge_batches():
    return sample_batch(100, A, seed=11, samples=200), sample_batch(400, A, seed=12, samples=200)


# sampler --------------------------------------------------------------------

def test_two_by_two_gap():
    b = sample_batch(2, A, seed=1, samples=10_000)
    gap = np.mean(b.eigenvalues[:, 1] - b.eigenvalues[:, 0])
    assert 3.8 <= gap <= 4.3


def test_average_characteristic_polynomial():
    b = sample_batch(4, A, seed=3, samples=10_000)
    for row in char_poly_check(b, [0.0, 1.0, 3.0]):
        assert abs(row["mean"] - row["exact"]) <= 3 * row["stderr"]


def test_seed_determinism():
    a = sample_batch(16, A, seed=5, samples=20)
    b = sample_batch(16, A, seed=5, samples=20)
    c = sample_batch(16, A, seed=6, samples=20)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert not np.array_equal(a.eigenvalues, c.eigenvalues)
    assert np.array_equal(a.eigenvalues[3], sample_spectrum(16, A, 5, 3))


def test_thread_independence(monkeypatch):
    one = sample_batch(24, A, seed=9, samples=30, threads=1)
    many = sample_batch(24, A, seed=9, samples=30, threads=4)
    assert np.array_equal(one.eigenvalues, many.eigenvalues)
    monkeypatch.setenv("EXTSRC_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("EXTSRC_THREADS", "x")
    with pytest.raises(DomainError):
        thread_count()


def test_rows_sorted_and_finite(batch200):
    ev = batch200.eigenvalues
    assert ev.shape == (100, 200)
    assert np.all(np.isfinite(ev)) and np.all(np.diff(ev, axis=1) >= 0)


def test_matrix_entry_moments():
    n = 100
    mats = [sample_matrix(n, A, seed=4, index=i) for i in range(1000)]
    source = np.repeat([A, -A], n // 2)
    diag = np.concatenate([np.diag(m).real - source for m in mats])
    assert diag.size == 100_000
    assert np.var(diag, ddof=1) == pytest.approx(1 / n, rel=0.05)
    off = np.concatenate([m[np.triu_indices(n, 1)] for m in mats[:20]])
    assert np.var(off.real, ddof=1) == pytest.approx(1 / (2 * n), rel=0.05)
    assert np.var(off.imag, ddof=1) == pytest.approx(1 / (2 * n), rel=0.05)
    assert np.array_equal(mats[0], mats[0].conj().T)
    assert np.array_equal(np.linalg.eigvalsh(mats[0]), sample_spectrum(n, A, 4, 0))


def test_sampler_validation():
    for n, a in ((3, A), (0, A), (4096, A), (4, 1.0)):
        with pytest.raises(DomainError):
            sample_spectrum(n, a, 0)


# density --------------------------------------------------------------------

def test_density_statistics(batch200, curve):
    est = empirical_density(batch200, bins=60, curve=curve)
    assert est.l1 <= 0.1
    assert est.band_masses == pytest.approx((0.5, 0.5), abs=0.02)
    assert est.gap_fraction <= 0.005
    assert np.sum(est.density * np.diff(est.edges)) == pytest.approx(1 - est.outside_fraction, abs=1e-12)


def test_bin_edges_aligned(curve):
    e = density_bin_edges(curve, 60)
    assert e.size == 61 and np.all(np.diff(e) > 0)
    for knot in (-curve.z1, -curve.z2, curve.z2, curve.z1):
        assert np.min(np.abs(e - knot)) == 0


def test_density_needs_samples():
    with pytest.raises(StatisticsError):
        empirical_density(sample_batch(8, A, seed=0, samples=10))


def test_one_point_function():
    b = sample_batch(8, A, seed=21, samples=4000)
    res = one_point_check(b, np.linspace(-4.5, 4.5, 10))
    assert np.all(np.abs(res["empirical"] - res["exact"]) <= 3 * res["stderr"] + 1e-12)


# edge -----------------------------------------------------------------------

def test_edge_scaling(edge_batches, curve):
    es = edge_scaling(*edge_batches)
    assert 0.5 <= es.gamma <= 0.85
    assert abs(es.mean_max_large - curve.z1) <= 0.05


def test_edge_mirror(edge_batches):
    es = edge_scaling(*edge_batches)
    se = np.hypot(es.se_mean_max_large, es.se_mean_min_large)
    assert abs(es.mean_max_large + es.mean_min_large) <= 2 * se


def test_edge_needs_samples():
    small = sample_batch(8, A, seed=0, samples=20)
    with pytest.raises(StatisticsError):
        edge_scaling(small, small)


# export ---------------------------------------------------------------------

def test_exports(batch200, curve):
    small = sample_batch(4, A, seed=2, samples=3)
    rows = list(batch_rows(small))
    assert len(rows) == 12 and set(rows[0]) == {"sample_index", "k", "eigenvalue"}
    s = summary(empirical_density(batch200, curve=curve))
    assert set(json.loads(json.dumps(s))) == {"l1", "band_masses", "gap_fraction"}
