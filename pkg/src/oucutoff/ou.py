"""Exact laws of the stable-driven Ornstein-Uhlenbeck process ``dX = -lambda X dt + dL``.

Started from a deterministic ``x0``, ``X_t`` equals in law
``exp(-lambda t) x0 + s_t L_1`` with ``s_t = ((1 - exp(-lambda alpha t)) / (lambda alpha))**(1/alpha)``,
so every marginal is a location-scale image of the driving law. Paths are
sampled through the exact Markov transition, without time discretisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import stable
from .rng import RandomStream
from .stable import StableLaw

__all__ = [
    "OUParams",
    "LocScale",
    "marginal_scale",
    "marginal_law",
    "stationary_law",
    "transition_sample",
    "sample_path",
]


@dataclass(frozen=True)
class OUParams:
    lam: float
    x0: float
    noise: StableLaw

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")

    def with_x0(self, x0: float) -> "OUParams":
        return replace(self, x0=float(x0))


@dataclass(frozen=True)
class LocScale:
    """Law of ``location + scale * L`` for ``L`` distributed as ``base``.

    ``scale == 0`` is the point mass at ``location``.
    """

    base: StableLaw
    location: float
    scale: float

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")

    @property
    def degenerate(self) -> bool:
        return self.scale == 0.0

    def _check(self):
        if self.degenerate:
            raise ValueError("point mass has no density")

    def density(self, x):
        self._check()
        return stable.density(self.base, (np.asarray(x, dtype=float) - self.location) / self.scale) / self.scale

    def log_density(self, x):
        self._check()
        return stable.log_density(self.base, (np.asarray(x, dtype=float) - self.location) / self.scale) - math.log(
            self.scale
        )

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.degenerate:
            out = (x >= self.location).astype(float)
            return float(out) if out.ndim == 0 else out
        return stable.cdf(self.base, (x - self.location) / self.scale)

    def sample(self, stream: RandomStream, count: int) -> np.ndarray:
        return self.location + self.scale * stable.sample(self.base, stream, count)


def marginal_scale(p: OUParams, t) -> float:
    """``s_t``, using ``-expm1`` so small ``lambda alpha t`` keeps full precision."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    la = p.lam * p.noise.alpha
    if math.isinf(t):
        return (1.0 / la) ** (1.0 / p.noise.alpha)
    return (-math.expm1(-la * t) / la) ** (1.0 / p.noise.alpha)


def marginal_law(p: OUParams, t: float) -> LocScale:
    return LocScale(p.noise, math.exp(-p.lam * t) * p.x0 if not math.isinf(t) else 0.0, marginal_scale(p, t))


def stationary_law(p: OUParams) -> LocScale:
    return LocScale(p.noise, 0.0, marginal_scale(p, math.inf))


def transition_sample(p: OUParams, x_now, dt: float, stream: RandomStream):
    """One exact step of length ``dt`` from state(s) ``x_now``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    x_now = np.asarray(x_now, dtype=float)
    noise = stable.sample(p.noise, stream, max(x_now.size, 1)).reshape(x_now.shape)
    out = math.exp(-p.lam * dt) * x_now + marginal_scale(p, dt) * noise
    return float(out) if out.ndim == 0 else out


def sample_path(p: OUParams, grid: Sequence[float], stream: RandomStream) -> np.ndarray:
    """Exact joint draw of ``(X_{t_1}, ..., X_{t_k})`` on a strictly increasing grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        return np.empty(0)
    if grid[0] < 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and start at t >= 0")
    out = np.empty(grid.size)
    x, t_prev = p.x0, 0.0
    for i, t in enumerate(grid):
        if t > t_prev:
            x = transition_sample(p, x, t - t_prev, stream)
        out[i] = x
        t_prev = t
    return out
