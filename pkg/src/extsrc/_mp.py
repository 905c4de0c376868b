"""Extended-precision helpers shared by the exact (polynomial x Gaussian) integrals.

Every integral of a polynomial against w1 or w2 is evaluated exactly by
Gauss-Hermite quadrature after completing the square,

    int f(s) exp(-N(s^2/2 - a s)) ds = exp(N a^2/2) sqrt(2/N) sum_i W_i f(a + t_i sqrt(2/N)),

which is exact for deg f <= 2m - 1.  The sums suffer cancellation of order
exp(n) for unbalanced indices, hence the working precision grows with n.
"""

from __future__ import annotations

from functools import lru_cache

import mpmath as mp
import numpy as np


def working_dps(n: int) -> int:
    """Decimal digits sufficient for the cancellation at degree n."""
    return 30 + n


@lru_cache(maxsize=64)
def gauss_hermite(m: int, dps: int):
    """Nodes and weights of the m-point Gauss-Hermite rule (weight e^{-t^2}) at ``dps`` digits."""
    with mp.workdps(dps + 10):
        t0, _ = np.polynomial.hermite.hermgauss(m)
        nodes, weights = [], []
        for t in t0:
            t = mp.mpf(t)
            for _ in range(8):
                h0, h1 = mp.mpf(1), 2 * t
                for k in range(1, m):
                    h0, h1 = h1, 2 * t * h1 - 2 * k * h0
                t -= h1 / (2 * m * h0)
            h0, h1 = mp.mpf(1), 2 * t
            for k in range(1, m - 1):
                h0, h1 = h1, 2 * t * h1 - 2 * k * h0
            hm1 = h1 if m > 1 else mp.mpf(1)
            nodes.append(t)
            weights.append(2 ** (m - 1) * mp.factorial(m) * mp.sqrt(mp.pi) / (m * m * hm1 ** 2))
    return tuple(nodes), tuple(weights)


def poly_state(n1: int, n2: int, a, N, z):
    """[P_{n1,n2}, P_{n1-1,n2}, P_{n1,n2-1}](z) in the current mpmath precision."""
    P, P1, P2 = mp.mpf(1), mp.mpf(0), mp.mpf(0)
    i = j = 0
    while i < n1 or j < n2:
        c, d = mp.mpf(i) / N, mp.mpf(j) / N
        if i < n1 and (i <= j or j >= n2):
            P, P1, P2 = (z - a) * P - c * P1 - d * P2, P, (P - 2 * a * P2 if j > 0 else mp.mpf(0))
            i += 1
        else:
            P, P1, P2 = (z + a) * P - c * P1 - d * P2, (P + 2 * a * P1 if i > 0 else mp.mpf(0)), P
            j += 1
    return [P, P1, P2]


def weight_nodes(a, N, k: int, m: int, dps: int):
    """Nodes s_i and weights such that sum w_i f(s_i) = int f w_k exactly for deg f < 2m."""
    t, W = gauss_hermite(m, dps)
    sc = mp.sqrt(mp.mpf(2) / N)
    center = a if k == 1 else -a
    pref = mp.exp(N * a * a / 2) * sc
    return [center + ti * sc for ti in t], [wi * pref for wi in W]
