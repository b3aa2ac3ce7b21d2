import numpy as np
import pytest

from conftest import curve
from quasiwidth.analysis import (
    ExperimentConfig,
    analyze_curve,
    labeled_hull,
    probe,
    refinement_deltas,
    sample_pair,
    transformed_curve,
    zoom_translate_family,
)
from quasiwidth.curves import sample_curve
from quasiwidth.hull import MINUS, PLUS
from quasiwidth.moebius import apply_to_sphere, mobius_to_lorentz
from quasiwidth.width import WidthReport


def test_config_validation():
    for bad in ({"N": 8}, {"M": 0}, {"M": 17}, {"refine": -1}, {"qi_pairs": 3}):
        with pytest.raises(ValueError):
            ExperimentConfig(**bad)
    assert ExperimentConfig(n_values=(1, 2)).to_json()["n_values"] == [1, 2]


def test_refinement_deltas():
    a = WidthReport(2.0, 1.5, None, None, 10, 5)
    b = WidthReport(1.9, 1.45, None, None, 5, 5)
    dw, db, m = refinement_deltas(a, b)
    assert np.isclose(dw, 0.1) and np.isclose(db, 0.05) and np.isclose(m, 0.1)


def test_argmaxes_in_input_frame():
    cfg = ExperimentConfig(N=300, seed=0, qi_pairs=30)
    r = analyze_curve(curve("cn2"), cfg, "cn", 2)
    P = sample_curve(curve("cn2"), 300)
    h = labeled_hull(P, centre=False)
    f = h.index(PLUS).distance(r.report.width_argmax) + h.index(MINUS).distance(r.report.width_argmax)
    assert abs(f[0] - r.width_est) < 1e-7
    assert r.width_est >= r.boundary_width_est - 1e-9
    assert r.row()["family"] == "cn" and np.isfinite(r.L) and r.path_metric_excess >= 1 - 1e-9


def test_pushed_samples_match_transformed_curve():
    g = zoom_translate_family()[5]
    P, _ = sample_pair(curve("cn1"), 200, g)
    C = transformed_curve(curve("cn1"), g)
    assert C.is_simple()
    res = np.min([np.min(np.abs(P @ a.circle.u - a.circle.c)) for a in C.arcs])
    assert res < 1e-8


def test_zoom_translate_probe_is_flat():
    cfg = ExperimentConfig(N=300, seed=0)
    rep = probe(curve("cn1"), zoom_translate_family(), cfg)
    assert len(rep.entries) == 16 and rep.spread < 1e-6
    assert all(e.bigons_clear for e in rep.entries)
    assert np.allclose(rep.entries[0].matrix, [[[1, 0], [0, 0]], [[0, 0], [1, 0]]])


def test_identity_map_changes_nothing():
    P = sample_curve(curve("gn8"), 300)
    assert np.allclose(apply_to_sphere(mobius_to_lorentz(zoom_translate_family()[0]), P), P)


def test_zoom_family_on_d4_keeps_bigons():
    cfg = ExperimentConfig(N=600, seed=0)
    maps = zoom_translate_family(shifts=(0.0,))
    rep = probe(curve("d4"), maps, cfg)
    assert np.allclose([e.matrix[0][0][0] / e.matrix[1][1][0] for e in rep.entries], [1, 2, 4, 8])
    assert all(e.bigons_clear for e in rep.entries)
    assert rep.max_boundary_width < 3.0 and rep.spread <= 2 * rep.refinement_delta
