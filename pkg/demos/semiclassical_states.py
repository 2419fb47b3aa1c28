"""Phase-space constants and coherent states approaching the classical limit."""
from fracspec.coherent import CoherentParams, kinetic_expectation, semiclassical_limit_check
from fracspec.semiclassical import (
    PotentialSpec,
    bound_state_moment_sum,
    deformed_sphere_volume,
    gamma_one_coefficients,
    phase_space_moment_quadrature,
)
from fracspec.specfun import ball_volume

for d, s in ((2, 0.75), (3, 0.6)):
    c = gamma_one_coefficients(d, s)
    print(f"d={d} s={s}: gamma=1 coefficient {c.reduced:.6g}, quadrature {c.quadrature:.6g}, "
          f"without the 1/d factor {c.unreduced:.6g}")

print("\nBeta-product volume vs ball volume:", deformed_sphere_volume(4, 0.7), ball_volume(4, 0.7))

well = PotentialSpec.gaussian_well(3.0, 0.5, 1, 0.75, 1.0)
print("\nGaussian well, d=1 s=0.75: classical sum", bound_state_moment_sum(well),
      "phase-space quadrature", phase_space_moment_quadrature(well))

print("\nGaussian coherent state (s=1): <L> - |2 pi k|^2 equals hbar d / 2")
for h in (0.5, 0.1):
    c = CoherentParams(2, 1.0, h, k=(1.0, 0.5))
    print(f"  hbar={h}: {kinetic_expectation(c) - c.classical_limit:.12f}")

for s in (0.6, 0.9):
    rep = semiclassical_limit_check(s, 1.0)
    print(f"\ns={s}: limit {rep.limit:.6f}")
    for h, g in zip(rep.hbar, rep.gap):
        print(f"  hbar={h:<5} gap={g:.3e}")
