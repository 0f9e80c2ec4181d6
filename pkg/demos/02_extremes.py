"""Maxima of n stable variables and their extreme-value limits.

Normalised Gaussian maxima approach the Gumbel law, but only at a
logarithmic pace; heavy-tailed maxima approach a Frechet law much faster.
Everything is evaluated from ln n, so n itself never needs to be formed.
"""
from oucutoff.extremes import LogCount, MaxLaw, default_normalization, evt_gap
from oucutoff.stable import StableLaw

gauss = StableLaw(2.0, 0.5)
print("Gaussian: TV(normalised max, Gumbel)")
for ln_n in (10, 100, 1e3, 1e4, 1e6):
    count = LogCount(ln_n)
    nz = default_normalization(gauss, count)
    print(f"  ln n = {ln_n:>9g}   a_n = {nz.a_n:10.4f}   b_n = {nz.b_n:.5f}   gap = {evt_gap(gauss, count).value:.3e}")

cauchy = StableLaw(1.0, 1.0)
print("Cauchy: TV(normalised max, Frechet(1))")
for k in (2, 4, 6, 8):
    print(f"  n = 1e{k}   gap = {evt_gap(cauchy, LogCount.from_n(10**k)).value:.3e}")

# quantiles of the maximum of e^(1e6) normals, computed in the log domain
m = MaxLaw(gauss, LogCount(1e6))
print("median of the max of exp(1e6) standard normals:", m.quantile(0.5))
