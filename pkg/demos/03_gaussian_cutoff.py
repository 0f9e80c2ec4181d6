"""Profile cut-off for the maximum of n Gaussian OU processes.

With t_n = ln(ln n) / (2 lambda), the distance to equilibrium evaluated
at t_n + b converges to G(b), the TV between two shifted Gumbel laws.
"""
from oucutoff.cutoff import cutoff_shape_scan, profile_G, profile_scan
from oucutoff.extremes import LogCount
from oucutoff.ou import OUParams
from oucutoff.stable import StableLaw

p = OUParams(lam=1.0, x0=1.0, noise=StableLaw(2.0, 0.5))
bs = [-2.0, -1.0, 0.0, 1.0, 2.0]

print("b      " + "".join(f"{b:>10g}" for b in bs))
print("G(b)   " + "".join(f"{profile_G(p, 1.0, b):10.5f}" for b in bs))
for ln_n in (1e2, 1e3, 1e4, 1e5):
    rows = profile_scan(p, [LogCount(ln_n)], bs)
    print(f"1e{len(str(int(ln_n))) - 1}    " + "".join(f"{r.d_n.value:10.5f}" for r in rows))

# away from the window the distance is 1 before t_n and 0 after
for delta, est in cutoff_shape_scan(p, LogCount(1e6), [0.25, 0.5, 1.0, 2.0, 4.0]):
    print(f"d_n({delta} t_n) = {est.value:.6g}")
