"""The curve D and its zoom/translate probe.

D glues scaled copies of C_1..C_nmax into the real line.  Its turning constant
grows with nmax (no quasicircle in the limit) while the boundary width of its
Mobius images stays put: zooming into any copy does not squeeze the
complementary regions, because the eps-bigons of every arc stay clear.
"""

from quasiwidth.analysis import ExperimentConfig, probe, zoom_translate_family
from quasiwidth.bigons import arc_bigons_clear
from quasiwidth.constructions import build_D
from quasiwidth.curves import sample_curve
from quasiwidth.turning import turning_constant

cfg = ExperimentConfig(N=800, seed=0)
maps = zoom_translate_family()
for n_max in (1, 2, 4):
    D = build_D(n_max)
    K = turning_constant(sample_curve(D, cfg.N)).K
    clear = all(l and r for _, l, r in arc_bigons_clear(D, cfg.eps))
    rep = probe(D, maps, cfg)
    print(f"n_max={n_max}: arcs {len(D):2d}, K {K:6.3f}, bigons clear {clear}, "
          f"bw max {rep.max_boundary_width:.4f}, spread {rep.spread:.2e}, delta {rep.refinement_delta:.4f}, "
          f"bigons persist {all(e.bigons_clear for e in rep.entries)}")
