"""Width, boundary width and turning constant across the test families.

Circle: both widths vanish and the turning constant is 1.
C_n: bounded turning gets worse with n while the boundary width stays bounded,
the finite shadow of a finite-width curve that is not a quasicircle.
G_n: the boundary width approaches the square value sinh^-1 sqrt 2 from the
corner contribution, which does not depend on n.
"""

import numpy as np

from quasiwidth.analysis import ExperimentConfig, analyze_curve, widths_of_samples
from quasiwidth.constructions import build_circle, build_Cn, build_Gn
from quasiwidth.curves import sample_curve

N = 1000
cfg = ExperimentConfig(N=N, seed=0, qi_pairs=100)

r = analyze_curve(build_circle(), cfg, "circle")
print(f"circle: width {r.width_est:.2e}, bw {r.boundary_width_est:.2e}, K {r.K:.4f}, L {r.L:.3f}, A {r.A:.2e}")

print("\nC_n (eps = 0.2)")
for n in range(1, 7):
    C, cert = build_Cn(n)
    r = analyze_curve(C, cfg, "cn", n, with_qi=False)
    print(f"  n={n}: K {r.K:7.3f}  width {r.width_est:.4f}  bw {r.boundary_width_est:.4f}"
          f"  delta {r.refinement_delta:.4f}  certificate {'ok' if cert.ok else 'FAILED'}")

print(f"\nG_n (sinh^-1 sqrt 2 = {np.arcsinh(np.sqrt(2)):.5f})")
for n in (4, 8, 16, 32, 64):
    rep = widths_of_samples(sample_curve(build_Gn(n), N), boundary_only=True)
    print(f"  n={n:2d}: bw {rep.boundary_width_est:.5f}")
