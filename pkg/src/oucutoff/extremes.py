"""Maxima of many i.i.d. stable variables, their normalisations and limit laws.

Sample sizes are carried as ``ln(n)`` so that ``n`` may be far beyond any
integer type. The law of the maximum is evaluated entirely in log space:
``log F_max = -exp(ln n + log(-log F))``, where ``log(-log F)`` comes from
the base law's log survival function in the right tail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import stable
from .numerics import DEFAULT_SPEC, QuadratureSpec, find_root, log_neg_log1m_exp
from .ou import LocScale
from .rng import RandomStream
from .stable import StableLaw
from .tvd import QUANTILE_LADDER, TvEstimate, tv_quadrature

__all__ = [
    "LogCount",
    "MaxLaw",
    "max_law",
    "max_log_cdf",
    "max_density",
    "Normalization",
    "normalization_gaussian",
    "normalization_gaussian_exact",
    "normalization_stable",
    "default_normalization",
    "LimitLaw",
    "GUMBEL",
    "frechet",
    "limit_law_for",
    "limit_density",
    "limit_cdf",
    "evt_gap",
    "tv_affine_pair",
]

_MAX_EXACT_INT = 2**53


@dataclass(frozen=True, order=True)
class LogCount:
    """A sample size ``n >= 1`` stored as ``ln n``."""

    ln_n: float

    def __post_init__(self):
        if not self.ln_n >= 0 or math.isinf(self.ln_n):
            raise ValueError(f"ln_n must be finite and >= 0, got {self.ln_n}")

    @classmethod
    def from_n(cls, n: int) -> "LogCount":
        if n < 1:
            raise ValueError("n must be >= 1")
        return cls(math.log(n))

    @property
    def n(self) -> float:
        """``exp(ln_n)`` as a float (may be ``inf``)."""
        try:
            return math.exp(self.ln_n)
        except OverflowError:
            return math.inf

    @property
    def ln_n_minus_1(self) -> float:
        """``ln(n - 1)``; ``-inf`` for ``n == 1``."""
        if self.ln_n == 0:
            return -math.inf
        return self.ln_n + math.log1p(-math.exp(-self.ln_n))

    def as_int(self) -> int:
        """The integer ``n``; rejects counts that are not exact integers up to ``2**53``."""
        n = self.n
        if not n <= _MAX_EXACT_INT:
            raise ValueError(f"n = exp({self.ln_n}) is not representable as an exact integer")
        k = round(n)
        if abs(n - k) > 1e-9 * k:
            raise ValueError(f"n = exp({self.ln_n}) = {n} is not an integer")
        return int(k)


def _log_neg_log_cdf(base: StableLaw, y: np.ndarray) -> np.ndarray:
    """``log(-log F(y))`` for the base law, precise where ``F(y)`` is close to 1."""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    pos = y > 0
    if np.any(pos):
        out[pos] = log_neg_log1m_exp(np.asarray(stable.log_sf(base, y[pos])))
    if np.any(~pos):
        with np.errstate(divide="ignore"):
            out[~pos] = np.log(-np.asarray(stable.log_cdf(base, y[~pos])))
    return out


@dataclass(frozen=True)
class MaxLaw:
    """Law of ``location + scale * max(L_1, ..., L_n)`` with ``L_j`` i.i.d. ``base``."""

    base: StableLaw
    count: LogCount
    location: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("degenerate max law: scale must be positive")

    def affine(self, shift: float, mult: float) -> "MaxLaw":
        """Law of ``shift + mult * X`` for ``X`` with this law (``mult > 0``)."""
        if not mult > 0:
            raise ValueError("mult must be positive")
        return MaxLaw(self.base, self.count, shift + mult * self.location, mult * self.scale)

    def _y(self, x):
        return (np.asarray(x, dtype=float) - self.location) / self.scale

    def log_cdf(self, x):
        y = self._y(x)
        with np.errstate(over="ignore"):
            out = -np.exp(self.count.ln_n + _log_neg_log_cdf(self.base, np.atleast_1d(y)))
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    def cdf(self, x):
        return np.exp(self.log_cdf(x))

    def log_density(self, x):
        y = np.atleast_1d(self._y(x))
        lnl = _log_neg_log_cdf(self.base, y)
        ln_m1 = self.count.ln_n_minus_1
        with np.errstate(over="ignore"):
            body = -np.exp(ln_m1 + lnl) if ln_m1 > -math.inf else 0.0
        out = self.count.ln_n + body + np.asarray(stable.log_density(self.base, y)) - math.log(self.scale)
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))

    def density(self, x):
        return np.exp(self.log_density(x))

    def quantile(self, p: float) -> float:
        """Solve ``n log F(y) = log p`` in the log-hazard form, then map back."""
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        target = math.log(-math.log(p)) - self.count.ln_n

        def h(y):
            return float(_log_neg_log_cdf(self.base, np.array([y]))[0]) - target

        s = self.base.sigma
        hi, lo = s, -s
        while h(hi) >= 0:
            hi *= 2.0
            if math.isinf(hi):
                raise ArithmeticError("quantile bracket not found")
        while h(lo) <= 0:
            lo *= 2.0
            if math.isinf(lo):
                raise ArithmeticError("quantile bracket not found")
        y = find_root(h, lo, hi, tol=1e-15 * max(1.0, abs(lo), abs(hi)))
        return self.location + self.scale * y

    def sample(self, stream: RandomStream, count: int) -> np.ndarray:
        """Draw maxima directly from ``n`` base variates each (needs an integer ``n``)."""
        n = self.count.as_int()
        out = np.empty(count)
        chunk = max(1, 2_000_000 // n)
        for start in range(0, count, chunk):
            m = min(chunk, count - start)
            out[start:start + m] = stable.sample(self.base, stream, m * n).reshape(m, n).max(axis=1)
        return self.location + self.scale * out


def max_law(base: Union[LocScale, StableLaw], count: LogCount) -> MaxLaw:
    if isinstance(base, LocScale):
        if base.degenerate:
            raise ValueError("point mass has no density")
        return MaxLaw(base.base, count, base.location, base.scale)
    return MaxLaw(base, count)


def max_log_cdf(m: MaxLaw, x):
    return m.log_cdf(x)


def max_density(m: MaxLaw, x):
    return m.density(x)


@dataclass(frozen=True)
class Normalization:
    """Centering ``a_n`` and scaling ``b_n > 0``; ``pre_asymptotic`` marks a fallback choice."""

    a_n: float
    b_n: float
    pre_asymptotic: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.b_n > 0:
            raise ValueError("b_n must be positive")


def normalization_gaussian(c: float, count: LogCount) -> Normalization:
    """Explicit Gumbel normalisation for the normal law with variance ``2c``."""
    ln_n = count.ln_n
    if not ln_n > 1.0:
        raise ValueError("Gaussian normalisation needs ln n > 1")
    r = math.sqrt(2.0 * ln_n)
    k = math.sqrt(2.0 * c)
    a = k * (r - (math.log(ln_n) + math.log(4.0 * math.pi)) / (2.0 * r))
    return Normalization(a, k / r)


def normalization_gaussian_exact(c: float, count: LogCount) -> Normalization:
    """Root of ``2 pi a^2 exp(a^2 / 2c) = 2 c n^2`` in log form, with ``b_n = 2c / a_n``."""
    rhs = math.log(2.0 * c) + 2.0 * count.ln_n - math.log(2.0 * math.pi)

    def h(a):
        return 2.0 * math.log(a) + a * a / (2.0 * c) - rhs

    lo = 1e-300
    hi = max(1.0, math.sqrt(2.0 * c * max(rhs, 1.0)) * 2.0)
    while h(hi) < 0:
        hi *= 2.0
    a = find_root(h, lo, hi, tol=1e-15 * hi)
    return Normalization(a, 2.0 * c / a)


def normalization_stable(law: StableLaw, count: LogCount) -> Normalization:
    """``a_n = 0``, ``b_n = (c C_alpha n)^(1/alpha)`` for the heavy-tailed case."""
    if law.alpha >= 2.0:
        raise ValueError("stable normalisation needs alpha < 2")
    if count.ln_n < math.log(2.0) - 1e-15:
        raise ValueError("stable normalisation needs n >= 2")
    b = math.exp((math.log(law.c) + math.log(stable.stable_constant(law.alpha)) + count.ln_n) / law.alpha)
    return Normalization(0.0, b)


def default_normalization(law: StableLaw, count: LogCount) -> Normalization:
    """The normalisation used by the distance engines.

    Falls back, flagged as pre-asymptotic, to the root-solved Gaussian
    normalisation when ``ln n <= 1`` and to the stable formula evaluated at
    the given ``n`` when ``n < 2``.
    """
    if law.is_gaussian:
        if count.ln_n > 1.0:
            return normalization_gaussian(law.c, count)
        nz = normalization_gaussian_exact(law.c, count)
        return Normalization(nz.a_n, nz.b_n, pre_asymptotic=True)
    if count.ln_n >= math.log(2.0) - 1e-15:
        return normalization_stable(law, count)
    b = math.exp((math.log(law.c) + math.log(stable.stable_constant(law.alpha)) + count.ln_n) / law.alpha)
    return Normalization(0.0, b, pre_asymptotic=True)


@dataclass(frozen=True)
class LimitLaw:
    """Extreme-value limit: ``gumbel`` or ``frechet`` with index ``alpha``.

    The Frechet CDF ``exp(-x**-alpha)`` (x > 0) is what the heavy-tailed
    case converges to; it is sometimes labelled a Pareto-type law.
    """

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("gumbel", "frechet"):
            raise ValueError(f"unknown limit law {self.kind!r}")
        if self.kind == "frechet" and not (self.alpha is not None and 0 < self.alpha < 2):
            raise ValueError("Frechet limit needs alpha in (0, 2)")

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gumbel":
            with np.errstate(over="ignore"):
                out = -x - np.exp(-x)
        else:
            a = self.alpha
            pos = x > 0
            xs = np.where(pos, x, 1.0)
            with np.errstate(over="ignore"):
                out = np.where(pos, math.log(a) - (a + 1.0) * np.log(xs) - xs ** (-a), -np.inf)
        return out[()] if out.ndim == 0 else out

    def density(self, x):
        return np.exp(self.log_density(x))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "gumbel":
            with np.errstate(over="ignore"):
                out = np.exp(-np.exp(-x))
        else:
            pos = x > 0
            xs = np.where(pos, x, 1.0)
            with np.errstate(over="ignore"):
                out = np.where(pos, np.exp(-(xs ** (-self.alpha))), 0.0)
        return out[()] if out.ndim == 0 else out

    def quantile(self, p: float) -> float:
        if not 0.0 < p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if self.kind == "gumbel":
            return -math.log(-math.log(p))
        return (-math.log(p)) ** (-1.0 / self.alpha)


GUMBEL = LimitLaw("gumbel")


def frechet(alpha: float) -> LimitLaw:
    return LimitLaw("frechet", alpha)


def limit_law_for(law: StableLaw) -> LimitLaw:
    return GUMBEL if law.is_gaussian else frechet(law.alpha)


def limit_density(l: LimitLaw, x):
    return l.density(x)


def limit_cdf(l: LimitLaw, x):
    return l.cdf(x)


def _quantiles(law, probs):
    return np.array([law.quantile(float(p)) for p in probs])


def tv_affine_pair(law, shift: float, mult: float, spec: QuadratureSpec = DEFAULT_SPEC, other=None) -> TvEstimate:
    """TV between ``shift + mult * W`` and ``V``.

    ``W`` has law ``law`` and ``V`` has law ``other`` (default ``law``); both
    must expose ``log_density`` and ``quantile``. Breakpoints are the
    ``QUANTILE_LADDER`` quantiles of both laws, so the partition follows their
    scales however far apart they are.
    """
    other = law if other is None else other
    eps = spec.tail_quantile_eps
    probs = np.concatenate([[eps], QUANTILE_LADDER, [1.0 - eps]])
    probs = probs[(probs >= eps) & (probs <= 1 - eps)]
    qw = _quantiles(law, probs)
    qv = qw if other is law else _quantiles(other, probs)
    q1 = shift + mult * qw
    lm = math.log(mult)

    def f(x):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.exp(np.asarray(law.log_density((x - shift) / mult)) - lm)

    def g(x):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.exp(np.asarray(other.log_density(x)))

    return tv_quadrature(
        f, g, ((q1[0], q1[-1]), (qv[0], qv[-1])), spec, breakpoints=np.concatenate([q1, qv])
    )


def evt_gap(base: StableLaw, count: LogCount, spec: QuadratureSpec = DEFAULT_SPEC, norm: Normalization | None = None) -> TvEstimate:
    """TV between the normalised maximum ``(max - a_n) / b_n`` and its limit law."""
    norm = norm or default_normalization(base, count)
    z = MaxLaw(base, count).affine(-norm.a_n / norm.b_n, 1.0 / norm.b_n)
    est = tv_affine_pair(z, 0.0, 1.0, spec, other=limit_law_for(base))
    if norm.pre_asymptotic:
        note = (est.note + "; " if est.note else "") + "pre-asymptotic normalisation"
        est = TvEstimate(est.value, est.method, est.error_bound, est.converged, note)
    return est
