"""No cut-off with heavy tails.

For alpha < 2 the maximum scales like n^(1/alpha), which swamps the
initial condition: along any divergent time schedule the distance
vanishes, so there is no sharp transition to find.
"""
import math
import warnings

from oucutoff.cutoff import PreconditionWarning, no_cutoff_scan
from oucutoff.extremes import LogCount
from oucutoff.ou import OUParams
from oucutoff.stable import StableLaw

p = OUParams(lam=1.0, x0=1.0, noise=StableLaw(1.0, 1.0))
for factor in (1.0, 0.1):
    sched = {LogCount.from_n(10**k): factor * math.log(math.log(10**k)) for k in (2, 4, 8, 16)}
    rows = no_cutoff_scan(p, sched)
    print(f"t_n = {factor:g} ln ln n:", "  ".join(f"{e.value:.4f}" for _, e in rows))

# a bounded schedule is flagged, since it cannot show the decay
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    no_cutoff_scan(p, {LogCount.from_n(100): 1.0, LogCount.from_n(10**4): 1.0})
print("warning:", [str(w.message) for w in caught if issubclass(w.category, PreconditionWarning)])
