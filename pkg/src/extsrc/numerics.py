"""Numerical substrate: scaled arithmetic, quadrature, Cauchy transforms, Airy functions.

Everything here is a pure function of its inputs.  Quantities such as
``exp(n * lambda)`` at n = 64 leave the double range, so values that can grow
or decay exponentially are carried as a mantissa with a separate exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, EvaluationError, PrecisionError

__all__ = [
    "ScaledReal",
    "ScaledComplex",
    "NormalizedVector",
    "normalize_vector",
    "QuadratureRule",
    "gauss_legendre",
    "integrate",
    "cauchy_plus",
    "AiryValue",
    "airy",
    "airy_array",
    "airy_kernel",
]

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# Scaled arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScaledReal:
    """The real number ``sign * mantissa * 2**exp2`` with ``mantissa`` in [1, 2)."""

    sign: int
    mantissa: float
    exp2: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign != 0 and not 1.0 <= self.mantissa < 2.0:
            raise ValueError("mantissa must lie in [1, 2)")

    @classmethod
    def zero(cls) -> "ScaledReal":
        return cls(0, 0.0, 0)

    @classmethod
    def from_float(cls, x: float) -> "ScaledReal":
        x = float(x)
        if not math.isfinite(x):
            raise ValueError("cannot scale a non-finite value")
        if x == 0.0:
            return cls.zero()
        m, e = math.frexp(abs(x))  # m in [0.5, 1)
        return cls(1 if x > 0 else -1, 2.0 * m, e - 1)

    @classmethod
    def from_log(cls, log_abs: float, sign: int = 1) -> "ScaledReal":
        """Build ``sign * exp(log_abs)`` without forming the exponential."""
        if sign == 0 or log_abs == -math.inf:
            return cls.zero()
        t = log_abs / LN2
        e = math.floor(t)
        m = 2.0 ** (t - e)
        if m >= 2.0:  # guard against rounding at the top of the interval
            m, e = m / 2.0, e + 1
        return cls(1 if sign > 0 else -1, m, int(e))

    @classmethod
    def from_parts(cls, mantissa: float, log_scale: float) -> "ScaledReal":
        """Build ``mantissa * exp(log_scale)``."""
        if mantissa == 0.0:
            return cls.zero()
        return cls.from_log(math.log(abs(mantissa)) + log_scale, 1 if mantissa > 0 else -1)

    def log_abs(self) -> float:
        if self.sign == 0:
            return -math.inf
        return math.log(self.mantissa) + self.exp2 * LN2

    def to_float(self) -> float:
        """Plain float value; overflows to +-inf and underflows to 0 like IEEE."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.ldexp(self.mantissa, self.exp2)
        except OverflowError:
            return self.sign * math.inf

    __float__ = to_float

    def __neg__(self) -> "ScaledReal":
        return ScaledReal(-self.sign, self.mantissa, self.exp2)

    def __mul__(self, other) -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        if self.sign == 0 or other.sign == 0:
            return ScaledReal.zero()
        m = self.mantissa * other.mantissa
        e = self.exp2 + other.exp2
        if m >= 2.0:
            m, e = m / 2.0, e + 1
        return ScaledReal(self.sign * other.sign, m, e)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        if other.sign == 0:
            raise ZeroDivisionError("division by a scaled zero")
        if self.sign == 0:
            return ScaledReal.zero()
        m = self.mantissa / other.mantissa
        e = self.exp2 - other.exp2
        if m < 1.0:
            m, e = m * 2.0, e - 1
        return ScaledReal(self.sign * other.sign, m, e)

    def __add__(self, other) -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.exp2 >= other.exp2 else (other, self)
        shift = small.exp2 - big.exp2
        total = big.sign * big.mantissa + small.sign * math.ldexp(small.mantissa, shift)
        if total == 0.0:
            return ScaledReal.zero()
        m, e = math.frexp(abs(total))
        return ScaledReal(1 if total > 0 else -1, 2.0 * m, big.exp2 + e - 1)

    __radd__ = __add__

    def __sub__(self, other) -> "ScaledReal":
        if not isinstance(other, ScaledReal):
            other = ScaledReal.from_float(other)
        return self + (-other)

    def ratio(self, other: "ScaledReal") -> float:
        """Plain float value of ``self / other``."""
        return (self / other).to_float()


@dataclass(frozen=True)
class ScaledComplex:
    """The complex number ``mantissa * exp(log_scale)``, mantissa of modulus ~1."""

    mantissa: complex
    log_scale: float

    @classmethod
    def from_parts(cls, mantissa: complex, log_scale: float) -> "ScaledComplex":
        mantissa = complex(mantissa)
        r = abs(mantissa)
        if r == 0.0:
            return cls(0j, 0.0)
        return cls(mantissa / r, log_scale + math.log(r))

    def log_abs(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return self.log_scale + math.log(abs(self.mantissa))

    def to_complex(self) -> complex:
        if self.mantissa == 0:
            return 0j
        return self.mantissa * math.exp(self.log_scale)

    __complex__ = to_complex

    @property
    def real(self) -> ScaledReal:
        return ScaledReal.from_parts(self.mantissa.real, self.log_scale)

    def __mul__(self, other) -> "ScaledComplex":
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_parts(other, 0.0)
        return ScaledComplex.from_parts(self.mantissa * other.mantissa,
                                        self.log_scale + other.log_scale)

    __rmul__ = __mul__


class NormalizedVector(NamedTuple):
    unit: np.ndarray
    log_scale: float
    degenerate: bool


def normalize_vector(v) -> NormalizedVector:
    """Split ``v`` into a max-norm-one vector and a natural-log scale.

    ``v == exp(log_scale) * unit``.  An all-zero input returns the zero vector
    with ``log_scale = 0`` and ``degenerate = True``.
    """
    v = np.asarray(v)
    if v.size == 0:
        raise ValueError("normalize_vector needs at least one entry")
    m = float(np.max(np.abs(v)))
    if m == 0.0:
        return NormalizedVector(np.zeros_like(v), 0.0, True)
    if not math.isfinite(m):
        raise ValueError("normalize_vector received a non-finite entry")
    return NormalizedVector(v / m, math.log(m), False)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights on ``interval``; exact through ``degree``."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple
    degree: int


def gauss_legendre(lo: float, hi: float, order: int = 20, panels: int = 1) -> QuadratureRule:
    """Composite Gauss-Legendre rule with ``panels`` equal panels of ``order`` nodes."""
    if not hi > lo:
        raise ValueError("need hi > lo")
    if order < 1 or panels < 1:
        raise ValueError("order and panels must be positive")
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights, (float(lo), float(hi)), 2 * order - 1)


def integrate(f: Callable, rule: QuadratureRule):
    """Apply ``rule`` to the vectorized integrand ``f``."""
    values = np.asarray(f(rule.nodes))
    bad = ~np.isfinite(values)
    if np.any(bad):
        node = rule.nodes[np.argmax(bad)]
        raise EvaluationError(f"integrand is not finite at node {node!r}")
    return np.sum(rule.weights * values)


def cauchy_plus(f: Callable, x: float, cutoff: float, center: float = 0.0,
                order: int = 24, panels: int = 16, tail_tol: float = 1e-14) -> complex:
    """Boundary value from the upper half-plane of the Cauchy transform of ``f``.

    Returns ``(1/(2 pi i)) PV int f(s)/(s - x) ds + f(x)/2``.  The singularity is
    removed by subtracting ``f(x)``; the principal value of the constant over the
    window ``[center - cutoff, center + cutoff]`` is added in closed form.
    """
    lo, hi = center - cutoff, center + cutoff
    if not lo < x < hi:
        raise DomainError("evaluation point must lie inside the quadrature window")
    rule = gauss_legendre(lo, hi, order, panels)
    s = rule.nodes
    fs = np.asarray(f(s), dtype=float)
    fx = float(f(np.array([x]))[0])
    scale = max(float(np.max(np.abs(fs))), abs(fx))
    if scale == 0.0:
        return 0j
    ends = np.abs(np.asarray(f(np.array([lo, hi])), dtype=float))
    if np.max(ends) > tail_tol * scale:
        raise PrecisionError("cutoff too small: integrand has not decayed at the window edge")
    d = s - x
    near = np.abs(d) < 1e-9 * (hi - lo)
    quotient = np.empty_like(fs)
    quotient[~near] = (fs[~near] - fx) / d[~near]
    if np.any(near):
        step = 1e-5 * (hi - lo)
        df = (f(np.array([x + step]))[0] - f(np.array([x - step]))[0]) / (2 * step)
        quotient[near] = df
    pv = float(np.sum(rule.weights * quotient)) + fx * math.log((hi - x) / (x - lo))
    return pv / (2j * math.pi) + 0.5 * fx


# ---------------------------------------------------------------------------
# Airy functions of a real argument
# ---------------------------------------------------------------------------

class AiryValue(NamedTuple):
    ai: float
    ai_prime: float


_AI0 = 0.355028053887817239260063186004  # 3^(-2/3) / Gamma(2/3)
_AIP0 = 0.258819403792806798405183560189  # 3^(-1/3) / Gamma(1/3)
_SERIES_LIMIT = 6.0


def _airy_series(x: float) -> AiryValue:
    # Ai = c1 f - c2 g with f = sum 3^k (1/3)_k x^{3k}/(3k)!, g = sum 3^k (2/3)_k x^{3k+1}/(3k+1)!
    x3 = x * x * x
    f_terms, g_terms, fp_terms, gp_terms = [1.0], [x], [], [1.0]
    tf, tg = 1.0, x
    k = 0
    while True:
        tf *= x3 / ((3 * k + 2) * (3 * k + 3))
        tg *= x3 / ((3 * k + 3) * (3 * k + 4))
        k += 1
        f_terms.append(tf)
        g_terms.append(tg)
        # derivatives term by term: d/dx x^{3k} = 3k x^{3k-1}
        if x != 0.0:
            fp_terms.append(tf * 3 * k / x)
            gp_terms.append(tg * (3 * k + 1) / x)
        if abs(tf) + abs(tg) < 1e-18 * (1.0 + abs(f_terms[-2])) and k > 3:
            break
        if k > 200:
            break
    ai = _AI0 * math.fsum(f_terms) - _AIP0 * math.fsum(g_terms)
    aip = _AI0 * math.fsum(fp_terms) - _AIP0 * math.fsum(gp_terms)
    return AiryValue(ai, aip)


def _asymptotic_coefficients(zeta: float):
    """Coefficients u_k, v_k of the large-argument expansions, truncated at the smallest term."""
    us, vs = [1.0], [1.0]
    u = 1.0
    k = 0
    while True:
        k += 1
        # u_k = (2k+1)(2k+3)...(6k-1) / (216^k k!) via the ratio u_k/u_{k-1}
        u = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v = -(6 * k + 1) / (6 * k - 1) * u
        if abs(u) / zeta ** k > abs(us[-1]) / zeta ** (k - 1) or k > 60:
            break
        us.append(u)
        vs.append(v)
    return us, vs


def _airy_asymptotic(x: float) -> AiryValue:
    if x > 0:
        zeta = 2.0 / 3.0 * x ** 1.5
        us, vs = _asymptotic_coefficients(zeta)
        su = math.fsum((-1) ** k * u / zeta ** k for k, u in enumerate(us))
        sv = math.fsum((-1) ** k * v / zeta ** k for k, v in enumerate(vs))
        pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
        return AiryValue(pref * su / x ** 0.25, -pref * x ** 0.25 * sv)
    t = -x
    zeta = 2.0 / 3.0 * t ** 1.5
    us, vs = _asymptotic_coefficients(zeta)
    even_u = math.fsum((-1) ** (k // 2) * u / zeta ** k for k, u in enumerate(us) if k % 2 == 0)
    odd_u = math.fsum((-1) ** (k // 2) * u / zeta ** k for k, u in enumerate(us) if k % 2 == 1)
    even_v = math.fsum((-1) ** (k // 2) * v / zeta ** k for k, v in enumerate(vs) if k % 2 == 0)
    odd_v = math.fsum((-1) ** (k // 2) * v / zeta ** k for k, v in enumerate(vs) if k % 2 == 1)
    phase = zeta + math.pi / 4.0
    s, c = math.sin(phase), math.cos(phase)
    ai = (s * even_u - c * odd_u) / (math.sqrt(math.pi) * t ** 0.25)
    aip = -t ** 0.25 * (c * even_v + s * odd_v) / math.sqrt(math.pi)
    return AiryValue(ai, aip)


def airy(x: float) -> AiryValue:
    """Ai(x) and Ai'(x) for real ``x`` with ``|x| <= 100``."""
    x = float(x)
    if not math.isfinite(x) or abs(x) > 100.0:
        raise DomainError("airy is implemented for |x| <= 100")
    if abs(x) <= _SERIES_LIMIT:
        return _airy_series(x)
    return _airy_asymptotic(x)


def airy_array(x) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise :func:`airy` returning arrays ``(ai, ai_prime)``."""
    x = np.asarray(x, dtype=float)
    out = [airy(v) for v in x.ravel()]
    ai = np.array([o.ai for o in out]).reshape(x.shape)
    aip = np.array([o.ai_prime for o in out]).reshape(x.shape)
    return ai, aip


def airy_kernel(u: float, v: float) -> float:
    """(Ai(u)Ai'(v) - Ai'(u)Ai(v)) / (u - v), with the diagonal Ai'(u)^2 - u Ai(u)^2."""
    au = airy(u)
    if u == v:
        return au.ai_prime ** 2 - u * au.ai ** 2
    av = airy(v)
    return (au.ai * av.ai_prime - au.ai_prime * av.ai) / (u - v)
