"""Distance to equilibrium of the maximum of n OU processes, and its cut-off profile.

Both ``d_n(t)`` (exact maximum) and ``D_n(t)`` (maximum replaced by its
extreme-value limit) reduce, by translation and scale invariance of total
variation, to ``TV(theta + r W, W)`` with ``W`` the normalised maximum or the
limit law, ``r = s_t / s_inf`` and

    theta = (exp(-lambda t) x0 / s_inf - a_n (1 - r)) / b_n.

Working in these normalised coordinates keeps the computation well scaled
for any ``ln n``, including values where ``n`` itself overflows.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


from . import stable
from .extremes import (
    LogCount,
    MaxLaw,
    Normalization,
    default_normalization,
    evt_gap,
    limit_law_for,
    normalization_gaussian,
    tv_affine_pair,
)
from .numerics import DEFAULT_SPEC, QuadratureSpec
from .ou import OUParams, marginal_scale
from .stable import StableLaw
from .tvd import TvEstimate, tv_gumbel_shift

__all__ = [
    "CutoffSchedule",
    "ProfilePoint",
    "PreconditionWarning",
    "scale_ratio",
    "shift_in_units",
    "distance_dn",
    "distance_Dn",
    "window_phi",
    "theta_window",
    "profile_shift",
    "profile_G",
    "cutoff_time",
    "union_bound",
    "reflect_min",
    "profile_scan",
    "cutoff_shape_scan",
    "no_cutoff_scan",
]


class PreconditionWarning(UserWarning):
    """A scan was run outside the hypotheses of the result it illustrates."""


@dataclass(frozen=True)
class CutoffSchedule:
    t_n: float
    kappa: float = 1.0
    window_correction: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")

    @property
    def window(self) -> float:
        return self.kappa + self.window_correction

    def time_at(self, b: float) -> float:
        return self.t_n + b * self.window


@dataclass(frozen=True)
class ProfilePoint:
    ln_n: float
    b: float
    t_eval: float
    d_n: TvEstimate | None
    D_n: TvEstimate | None
    theta_n: float
    G_b: float
    error: str = ""


def _log_one_minus_exp(x: float) -> float:
    """``log(1 - exp(-x))`` for ``x > 0``."""
    if x > math.log(2.0):
        return math.log1p(-math.exp(-x))
    return math.log(-math.expm1(-x))


def scale_ratio(p: OUParams, t: float) -> tuple[float, float]:
    """``(r, 1 - r)`` with ``r = s_t / s_inf = (1 - exp(-lambda alpha t))**(1/alpha)``, both cancellation-free."""
    if t <= 0:
        return 0.0, 1.0
    if math.isinf(t):
        return 1.0, 0.0
    lg = _log_one_minus_exp(p.lam * p.noise.alpha * t) / p.noise.alpha
    return math.exp(lg), -math.expm1(lg)


def shift_in_units(p: OUParams, t: float, norm: Normalization) -> float:
    """``theta``: the shift of ``theta + r W`` against ``W`` in normalised units."""
    s_inf = marginal_scale(p, math.inf)
    _, one_minus_r = scale_ratio(p, t)
    loc = math.exp(-p.lam * t) * p.x0
    return (loc / s_inf - norm.a_n * one_minus_r) / norm.b_n


def _reduced_pair(p: OUParams, count: LogCount, t: float):
    if not t > 0:
        raise ValueError("t must be positive")
    norm = default_normalization(p.noise, count)
    r, _ = scale_ratio(p, t)
    theta = shift_in_units(p, t, norm)
    return norm, r, theta


def _degenerate() -> TvEstimate:
    return TvEstimate(1.0, "closed_form", 0.0, True, "point mass against a continuous law")


def distance_dn(p: OUParams, count: LogCount, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> TvEstimate:
    """``d_n(t)``: TV between the maximum of n processes at time t and at equilibrium."""
    norm, r, theta = _reduced_pair(p, count, t)
    if r == 0.0:
        return _degenerate()
    z = MaxLaw(p.noise, count).affine(-norm.a_n / norm.b_n, 1.0 / norm.b_n)
    return tv_affine_pair(z, theta, r, spec)


def distance_Dn(p: OUParams, count: LogCount, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> TvEstimate:
    """``D_n(t)``: as :func:`distance_dn` with the normalised maximum replaced by its limit law."""
    _, r, theta = _reduced_pair(p, count, t)
    if r == 0.0:
        return _degenerate()
    return tv_affine_pair(limit_law_for(p.noise), theta, r, spec)


def _require_gaussian(p: OUParams):
    if not p.noise.is_gaussian:
        raise ValueError("this quantity is defined for the Gaussian case alpha = 2 only")


def window_phi(lam: float, t: float) -> float:
    """``1 - sqrt(1 - exp(-2 lambda t))`` without cancellation."""
    return -math.expm1(0.5 * _log_one_minus_exp(2.0 * lam * t))


def theta_window(p: OUParams, count: LogCount, t: float) -> float:
    """``sqrt(2 lambda) e^{-lambda t} x0 / b_n - (a_n / b_n) phi_t`` with the explicit Gaussian normalisation."""
    _require_gaussian(p)
    if not t > 0:
        raise ValueError("t must be positive")
    norm = normalization_gaussian(p.noise.c, count)
    return (
        math.sqrt(2.0 * p.lam) * math.exp(-p.lam * t) * p.x0 / norm.b_n
        - norm.a_n / norm.b_n * window_phi(p.lam, t)
    )


def profile_shift(p: OUParams, kappa: float, b: float) -> float:
    """Limit of ``theta_n`` along ``t_n + b kappa``: ``sqrt(2 lambda / c) e^{-lambda kappa b} x0 - e^{-2 lambda kappa b}``.

    The constant ``sqrt(2 lambda / c)`` is the one produced by the derivation;
    it reduces to ``2 sqrt(lambda)`` when ``c = 1/2``.
    """
    _require_gaussian(p)
    e = -p.lam * kappa * b
    if 2.0 * e > 700.0:
        return -math.inf
    return math.sqrt(2.0 * p.lam / p.noise.c) * math.exp(e) * p.x0 - math.exp(2.0 * e)


def profile_G(p: OUParams, kappa: float, b: float) -> float:
    """Profile function ``G(b) = TV(theta_inf(b) + xi, xi)`` for a standard Gumbel ``xi``."""
    theta = profile_shift(p, kappa, b)
    if abs(theta) > 700.0:
        return 1.0
    return tv_gumbel_shift(theta)


def cutoff_time(p: OUParams, count: LogCount, kappa: float = 1.0, window_correction: float = 0.0) -> CutoffSchedule:
    """``t_n = ln(ln n) / (2 lambda)``."""
    _require_gaussian(p)
    if not count.ln_n > 1.0:
        raise ValueError("cut-off time needs ln n > 1")
    return CutoffSchedule(math.log(count.ln_n) / (2.0 * p.lam), kappa, window_correction)


class BaseLaw:
    """Gives a :class:`StableLaw` the ``log_density``/``quantile`` surface used by ``tv_affine_pair``."""

    def __init__(self, law: StableLaw):
        self.law = law

    def log_density(self, x):
        return stable.log_density(self.law, x)

    def quantile(self, q: float) -> float:
        if self.law.is_cauchy:
            return self.law.c * math.tan(math.pi * (q - 0.5))
        return stable.quantile(self.law, q)


def union_bound(p: OUParams, count: LogCount, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``n * TV(X_t, X_inf)`` for one process; an upper bound for ``d_n(t)``. ``inf`` if ``n`` overflows."""
    if not t > 0:
        raise ValueError("t must be positive")
    n = count.n
    r, _ = scale_ratio(p, t)
    if r == 0.0:
        return n
    shift = math.exp(-p.lam * t) * p.x0 / marginal_scale(p, math.inf)
    single = tv_affine_pair(BaseLaw(p.noise), shift, r, spec).value
    if single == 0.0:
        return 0.0
    return n * single if not math.isinf(n) else math.inf


def reflect_min(p: OUParams) -> OUParams:
    """Parameters whose maximum process has the law of minus the minimum process of ``p``."""
    return p.with_x0(-p.x0)


def profile_scan(
    p: OUParams,
    counts: Iterable[LogCount],
    bs: Sequence[float],
    kappa: float = 1.0,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> list[ProfilePoint]:
    """``d_n``, ``D_n``, ``theta_n`` and ``G`` at ``t_n + b kappa`` for every ``(n, b)``, in input order."""
    _require_gaussian(p)
    rows = []
    for count in counts:
        for b in bs:
            rows.append(profile_point(p, count, b, kappa, spec))
    return rows


def profile_point(p: OUParams, count: LogCount, b: float, kappa: float = 1.0, spec: QuadratureSpec = DEFAULT_SPEC) -> ProfilePoint:
    G = profile_G(p, kappa, b)
    t = math.nan
    theta = math.nan
    try:
        t = cutoff_time(p, count, kappa).time_at(b)
        theta = theta_window(p, count, t)
        d = distance_dn(p, count, t, spec)
        D = distance_Dn(p, count, t, spec)
    except (ArithmeticError, ValueError) as exc:
        return ProfilePoint(count.ln_n, b, t, None, None, theta, G, f"{type(exc).__name__}: {exc}")
    return ProfilePoint(count.ln_n, b, t, d, D, theta, G)


def cutoff_shape_scan(
    p: OUParams, count: LogCount, deltas: Sequence[float], spec: QuadratureSpec = DEFAULT_SPEC
) -> list[tuple[float, TvEstimate]]:
    """``d_n(delta * t_n)`` for each ``delta``, with ``t_n = ln(ln n) / (2 lambda)``."""
    if not count.ln_n > 1.0:
        raise ValueError("cut-off time needs ln n > 1")
    if not p.noise.is_gaussian:
        warnings.warn("shape scan outside the Gaussian case is exploratory", PreconditionWarning, stacklevel=2)
    t_n = math.log(count.ln_n) / (2.0 * p.lam)
    return [(float(d), distance_dn(p, count, d * t_n, spec)) for d in deltas]


def no_cutoff_scan(
    p: OUParams, schedule: Mapping[LogCount, float], spec: QuadratureSpec = DEFAULT_SPEC
) -> list[tuple[LogCount, TvEstimate]]:
    """``d_n(t_n)`` along a schedule ``n -> t_n`` in the heavy-tailed case.

    Warns with :class:`PreconditionWarning` when ``alpha == 2`` or when the
    times do not increase strictly along increasing ``n`` (a finite stand-in
    for divergence); the rows are computed regardless.
    """
    if p.noise.is_gaussian:
        warnings.warn("no-cut-off scan is meant for alpha < 2", PreconditionWarning, stacklevel=2)
    items = sorted(schedule.items(), key=lambda kv: kv[0].ln_n)
    times = [t for _, t in items]
    if len(times) > 1 and not all(b > a for a, b in zip(times[:-1], times[1:])):
        warnings.warn("schedule times do not increase with n", PreconditionWarning, stacklevel=2)
    return [(c, distance_dn(p, c, t, spec)) for c, t in items]


def coupling_bound(p: OUParams, count: LogCount, spec: QuadratureSpec = DEFAULT_SPEC) -> TvEstimate:
    """``2 * evt_gap``: bounds ``|d_n(t) - D_n(t)|`` uniformly in ``t``."""
    g = evt_gap(p.noise, count, spec)
    return TvEstimate(min(1.0, 2.0 * g.value), g.method, 2.0 * g.error_bound, g.converged, g.note)


__all__ += ["profile_point", "coupling_bound", "BaseLaw"]
