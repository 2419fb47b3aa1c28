"""Heat trace and Riesz means: exact lattice sums next to their asymptotes."""
import math

import numpy as np

from fracspec import DomainSpec, HeatQuery, RieszQuery, SpectralParams, heat_trace, riesz_mean
from fracspec.smoothed import heat_asymptote, heat_upper_bound, riesz_asymptote, separable_partition_function

p = SpectralParams(2, 0.75, L=math.pi)
dom = DomainSpec.from_params(p)

print("t          Z(t)           tail bound   Z/asymptote  Z/upper")
for t in np.geomspace(1e-3, 1.0, 7):
    Z, tail, X = heat_trace(p, HeatQuery(t, tol=1e-8))
    print(f"{t:8.2e}  {Z:14.6f}  {tail:10.2e}  {Z / heat_asymptote(dom, p.s, t):10.5f}"
          f"  {Z / heat_upper_bound(dom, p.s, t):8.5f}")

# the spectrum is a sum of independent one-dimensional levels
t = 0.01
print("\nZ from the lattice:", heat_trace(p, HeatQuery(t, tol=1e-12))[0])
print("Z_1(t)^2:          ", separable_partition_function(p, t))

print("\nrho   R_rho(E)/asymptote at E = 2000")
for rho in (0.0, 0.5, 1.0, 2.0):
    q = RieszQuery(rho, 2000.0)
    print(f"{rho:3.1f}   {riesz_mean(p, q) / riesz_asymptote(dom, p.s, q):.5f}")
