"""Counting function of the cube against Weyl's law and the spectral bounds.

Run: python3 demos/weyl_and_bounds.py
"""
import math

import numpy as np

from fracspec import DomainSpec, SpectralParams, counting_function, enumerate_smallest
from fracspec.bounds import bly_sum_lower_bound, counting_upper_bound, polya_lower_bound, weyl_counting_estimate

for d, s in ((2, 1.0), (2, 0.75), (3, 0.6)):
    p = SpectralParams(d, s, L=math.pi)
    dom = DomainSpec.from_params(p)
    print(f"d={d} s={s}")
    print(f"{'E':>12} {'N(E)':>10} {'N/Weyl':>8} {'N/upper':>8}")
    for E in np.geomspace(20 * p.ground_energy, 2e4 * p.ground_energy, 4):
        N = counting_function(p, E)
        print(f"{E:12.4g} {N:10d} {N / weyl_counting_estimate(dom, s, E):8.4f} "
              f"{N / counting_upper_bound(dom, s, E):8.4f}")

    # lower bounds hold for every n; the ratios drift toward 1 from above
    vals = enumerate_smallest(p, 5000).values
    n = np.array([1, 10, 100, 1000, 5000])
    polya = np.array([polya_lower_bound(dom, s, k) for k in n])
    bly = np.array([bly_sum_lower_bound(dom, s, k) for k in n])
    sums = np.cumsum(vals)[n - 1]
    print("  n      E_n/Polya   S(n)/BLY")
    for k, a, b in zip(n, vals[n - 1] / polya, sums / bly):
        print(f"  {k:<6d} {a:9.4f} {b:10.4f}")
    print()
