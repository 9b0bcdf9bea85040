"""
Homology of a noisy circle by a downward level scan
===================================================

Points on the unit circle with Gaussian noise. Levels are scanned from the
top of the density estimate; the first level whose degree-one image has rank
one marks the stable range, and the ranks one level further down are
reported.
"""

from levelhom import KernelSpec, gen_noisy_manifold, recommended_bandwidth, recover_manifold_homology
from levelhom import sample_values
from levelhom.estimators import default_epsilon

n = 2000
x = gen_noisy_manifold("circle", n, sigma=0.1, seed=0)
r = recommended_bandwidth(n, 2)
values = sample_values(x, r, KernelSpec(dimension=2))
eps = default_epsilon(values)

res = recover_manifold_homology(x, eps, m=1, r=r, values=values)
for i, level, b in res.trace:
    print(f"  i={i:2d}  L={level:.4f}  rank H1 image = {b}")
print(f"i* = {res.i_star}, level {res.level_used:.4f}, betti = {res.betti}")
