"""Numerical kernels shared by the rest of the package.

Adaptive Gauss-Kronrod quadrature with vectorised integrands, a bracketing
root finder, the log-domain normal CDF and a Lanczos gamma function.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "DEFAULT_SPEC",
    "integrate_adaptive",
    "find_root",
    "RootBracketError",
    "log_normal_cdf",
    "log_normal_sf",
    "log_neg_log1m_exp",
    "mills_ratio",
    "gamma_fn",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances for adaptive quadrature and quantile truncation."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    tail_quantile_eps: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if int(self.max_subdivisions) < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not (0 < self.tail_quantile_eps <= 1e-6):
            raise ValueError("tail_quantile_eps must lie in (0, 1e-6]")


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class IntegralResult:
    """Outcome of :func:`integrate_adaptive`.

    ``converged`` is False when the subdivision budget ran out before the
    requested tolerance was met; ``value`` is then the best estimate and
    ``error_bound`` the internal error estimate at that point.
    """

    value: float
    error_bound: float
    subdivisions_used: int
    converged: bool = True

    def __float__(self):
        return self.value


# Gauss-Kronrod 7-15 nodes on [-1, 1] (positive half, centre last).
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KRONROD_W = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15_batch(f, lefts, rights):
    """Apply the 7-15 rule to many intervals with one call to ``f``."""
    lefts = np.asarray(lefts, dtype=float)
    rights = np.asarray(rights, dtype=float)
    centre = 0.5 * (lefts + rights)
    half = 0.5 * (rights - lefts)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    kron = half * (fx @ _KRONROD_W)
    gauss = half * (fx @ _GAUSS_W)
    # QUADPACK-style error scaling.
    mean = 0.5 * kron / np.where(half != 0, half, 1.0)
    resasc = half * (np.abs(fx - mean[:, None]) @ _KRONROD_W)
    err = np.abs(kron - gauss)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & np.isfinite(scaled), scaled, err)
    eps_floor = 50.0 * np.finfo(float).eps * half * (np.abs(fx) @ _KRONROD_W)
    err = np.maximum(err, eps_floor)
    if not np.all(np.isfinite(kron)):
        raise FloatingPointError("integrand returned non-finite values")
    return kron, err


def _map_infinite(f, a, b):
    """Return (g, lo, hi) so that the integral of f over (a, b) equals g over (lo, hi)."""
    def guarded(x, jac):
        out = np.zeros_like(x)
        ok = np.isfinite(x) & np.isfinite(jac)
        out[ok] = f(x[ok]) * jac[ok]
        return out

    if math.isinf(a) and math.isinf(b):
        def g(t):
            with np.errstate(divide="ignore", over="ignore"):
                d = 1.0 - t * t
                return guarded(t / d, (1.0 + t * t) / (d * d))
        return g, -1.0, 1.0
    if math.isinf(b):
        def g(t):
            with np.errstate(divide="ignore", over="ignore"):
                d = 1.0 - t
                return guarded(a + t / d, 1.0 / (d * d))
        return g, 0.0, 1.0
    if math.isinf(a):
        def g(t):
            with np.errstate(divide="ignore", over="ignore"):
                d = 1.0 - t
                return guarded(b - t / d, 1.0 / (d * d))
        return g, 0.0, 1.0
    return f, a, b


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints: Sequence[float] = (),
) -> IntegralResult:
    """Integrate a vectorised function over ``[a, b]`` (either end may be infinite).

    ``f`` receives a 1-d array of abscissae and must return an array of the
    same shape. Infinite ranges are mapped onto finite ones by an algebraic
    substitution; interior ``breakpoints`` seed the initial partition.
    The worst intervals are bisected in batches until the summed error
    estimate drops below ``max(abs_tol, rel_tol * |value|)`` or the number of
    intervals reaches ``spec.max_subdivisions``.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    g, lo, hi = _map_infinite(f, float(a), float(b))
    if g is f:
        pts = sorted(p for p in breakpoints if lo < p < hi)
    else:
        pts = []
    edges = [lo, *pts, hi]
    vals, errs = _gk15_batch(g, edges[:-1], edges[1:])
    heap = [(-e, l, r, v) for l, r, v, e in zip(edges[:-1], edges[1:], vals, errs)]
    heapq.heapify(heap)
    total = float(np.sum(vals))
    total_err = float(np.sum(errs))
    n_intervals = len(heap)
    limit = max(int(spec.max_subdivisions), n_intervals)

    def target():
        return max(spec.abs_tol, spec.rel_tol * abs(total))

    frozen = []  # intervals too narrow to split further
    while total_err > target() and n_intervals < limit and heap:
        batch = []
        budget = min(64, max(1, len(heap) // 4), limit - n_intervals)
        while heap and len(batch) < budget:
            item = heapq.heappop(heap)
            l, r = item[1], item[2]
            m = 0.5 * (l + r)
            if not (l < m < r) or (r - l) <= 4 * np.finfo(float).eps * max(abs(l), abs(r), 1e-300):
                frozen.append(item)
                continue
            batch.append(item)
        if not batch:
            break
        lefts, rights = [], []
        for _, l, r, _ in batch:
            m = 0.5 * (l + r)
            lefts += [l, m]
            rights += [m, r]
        v2, e2 = _gk15_batch(g, lefts, rights)
        for k, (ne, l, r, v) in enumerate(batch):
            total -= v
            total_err += ne  # ne is the negated error
            for j in (2 * k, 2 * k + 1):
                total += v2[j]
                total_err += e2[j]
                heapq.heappush(heap, (-e2[j], lefts[j], rights[j], v2[j]))
        n_intervals += len(batch)
        # re-sum occasionally to stop drift from incremental updates
        if n_intervals % 256 < len(batch):
            items = heap + frozen
            total = float(sum(it[3] for it in items))
            total_err = float(sum(-it[0] for it in items))
    items = heap + frozen
    total = float(math.fsum(it[3] for it in items))
    total_err = float(math.fsum(-it[0] for it in items))
    return IntegralResult(
        value=total,
        error_bound=total_err,
        subdivisions_used=n_intervals,
        converged=total_err <= target(),
    )


class RootBracketError(ValueError):
    """Raised when a root finder is given a bracket without a sign change."""


def find_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    """Root of a continuous scalar function on a sign-changing bracket.

    Brent's method; the returned point lies inside ``[lo, hi]``.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return float(lo)
    if fhi == 0:
        return float(hi)
    if not (np.sign(flo) * np.sign(fhi) < 0):
        raise RootBracketError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    x = optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(min(max(x, lo), hi))


_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT1_2 = math.sqrt(0.5)


def mills_ratio(y):
    """Mills ratio ``(1 - Phi(y)) / phi(y)`` for ``y >= 8`` via Laplace's continued fraction."""
    y = np.asarray(y, dtype=float)
    t = np.array(y, copy=True)
    for k in range(80, 0, -1):
        t = y + k / t
    return 1.0 / t


def log_normal_cdf(y):
    """Natural log of the standard normal CDF.

    Uses ``erfc`` for ``|y| <= 8`` and the Mills-ratio continued fraction
    beyond, so that both the deep left tail (where the value is about
    ``-y**2/2``) and the right tail (where it is about ``-phi(y)/y``) keep full
    relative precision.
    """
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0
    y = np.atleast_1d(y)
    out = np.empty_like(y)

    mid = np.abs(y) <= 8.0
    ym = y[mid]
    lo_part = ym <= 0
    out_mid = np.empty_like(ym)
    out_mid[lo_part] = np.log(0.5 * special.erfc(-ym[lo_part] * _SQRT1_2))
    out_mid[~lo_part] = np.log1p(-0.5 * special.erfc(ym[~lo_part] * _SQRT1_2))
    out[mid] = out_mid

    left = y < -8.0
    if np.any(left):
        z = -y[left]
        out[left] = -0.5 * z * z - _LOG_SQRT_2PI + np.log(mills_ratio(z))
    right = y > 8.0
    if np.any(right):
        z = y[right]
        log_q = -0.5 * z * z - _LOG_SQRT_2PI + np.log(mills_ratio(z))
        out[right] = -np.exp(log_q)  # log1p(-q) == -q to double precision here
    nan = np.isnan(y)
    out[nan] = np.nan
    return float(out[0]) if scalar else out


def log_normal_sf(y):
    """Natural log of ``1 - Phi(y)``, by symmetry."""
    return log_normal_cdf(-np.asarray(y, dtype=float))


def log_neg_log1m_exp(log_s):
    """``log(-log(1 - exp(log_s)))`` for ``log_s <= 0``.

    Turns a log survival probability into the log of the cumulative hazard
    without losing the tiny survival values that dominate maxima of many
    variables.
    """
    log_s = np.asarray(log_s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.exp(log_s)
        small = log_s < -20.0
        near_one = log_s > -math.log(2.0)
        # 1 - s by expm1 when s is close to 1, where subtraction cancels
        log_f = np.where(near_one, np.log(-np.expm1(np.minimum(log_s, -1e-300))), np.log1p(-np.where(small, 0.5, s)))
        out = np.where(small, log_s + 0.5 * s, np.log(-log_f))
    return out[()] if out.ndim == 0 else out


_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma function for positive real ``x`` (Lanczos, g=7, 9 terms)."""
    x = float(x)
    if not x > 0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for k in range(1, 9):
        acc += _LANCZOS[k] / (x + k)
    t = x + _LANCZOS_G + 0.5
    return math.exp(_LOG_SQRT_2PI + (x + 0.5) * math.log(t) - t) * acc
