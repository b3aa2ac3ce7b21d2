"""The two sharp constants from explicit configurations in a hyperbolic plane.

The ideal triangle gives cosh^-1 sqrt 2 (the universal bound on the width of
a boundary point), the ideal square gives sinh^-1 sqrt 2 (a lower bound for
the best possible such constant).  Perturbing the triangle moves the min-max
distance in the directions explained below.
"""

import numpy as np

from quasiwidth.constants import INTERVAL, perturbation_study, verify_constants

rep = verify_constants()
print(f"ideal triangle: d(x, y) = {rep.triangle.distance:.12f}  (closed form {np.arccosh(np.sqrt(2)):.12f})")
print(f"  angle at y = {rep.triangle.angle_at_y:.12f} (pi/4 = {np.pi / 4:.12f})")
print(f"  min over Q of the larger distance to P, P' = {rep.triangle.minmax:.12f}")
print(f"ideal square:   d(m, l) = {rep.square.distance:.12f}  (closed form {np.arcsinh(np.sqrt(2)):.12f})")
print(f"  |<m, v>| = {rep.square.sinh_value:.12f}")
print(f"interval {INTERVAL}: ok = {rep.ok}")

print("\nperturbing the shared vertex of P and P':")
print(f"{'delta':>6} {'split (ultraparallel)':>22} {'finite vertex (rays)':>21}")
for delta in (0.05, 0.15, 0.3, 0.6):
    p = perturbation_study(delta)
    split, finite = p["split_PP'"], p["finite_PP'"]
    print(f"{delta:6.2f} {split:22.6f} {finite:21.6f}")
print(f"base value {perturbation_study()['base']:.6f}")
# splitting keeps three full lines bounding disjoint half-planes and only
# increases the min-max; rays through a finite vertex cut into the triangle
