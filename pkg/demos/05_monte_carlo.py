"""Checking the exact distance against simulation.

The maximum of n = 10 processes at t = 1 and at equilibrium is sampled
through exact transitions; the histogram TV sits within sampling error of
the quadrature value.
"""
import numpy as np

from oucutoff.cutoff import distance_dn
from oucutoff.extremes import LogCount
from oucutoff.ou import OUParams, sample_path, stationary_law
from oucutoff.rng import RandomStream
from oucutoff.stable import StableLaw
from oucutoff.tvd import tv_empirical

p = OUParams(lam=1.0, x0=1.0, noise=StableLaw(2.0, 0.5))
n, t, reps = 10, 1.0, 20_000
root = RandomStream(2024)

# each replicate runs n paths through a two-step grid ending at t
paths = np.array([[sample_path(p, [0.5, t], root.substream(i, j))[-1] for j in range(n)] for i in range(reps)])
at_t = paths.max(axis=1)
at_eq = stationary_law(p).sample(root.substream(reps), n * reps).reshape(reps, n).max(axis=1)

emp = tv_empirical(at_t, at_eq, bins=40)
print(f"empirical TV  {emp.value:.4f}  (noise ~ {emp.error_bound:.3f})")
print(f"quadrature    {distance_dn(p, LogCount.from_n(n), t).value:.4f}")
