import numpy as np
import pytest

from conftest import hull, samples
from quasiwidth.analysis import labeled_hull
from quasiwidth.constructions import build_perturbed_circle
from quasiwidth.curves import sample_curve
from quasiwidth.hull import MINUS, PLUS
from quasiwidth.hypcore import klein_embed, mink_inner
from quasiwidth.width import (
    boundary_width,
    estimate_widths,
    face_samples,
    nearest_projection,
    round_trip_displacement,
    triangle_frames,
    width_objective,
)

CURVES = ["square", "perturbed", "cn2", "gn8", "d1"]


@pytest.fixture(scope="module")
def reports():
    return {name: estimate_widths(hull(name, 400), 400) for name in CURVES}


def test_circle_has_zero_widths():
    r = estimate_widths(hull("circle", 400), 400)
    assert r.width_est == 0 and r.boundary_width_est == 0


def test_triangle_frames_are_canonical():
    h = hull("cn2", 200)
    F = triangle_frames(h.mesh, h.index(PLUS).tris)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        assert np.allclose(mink_inner(F[:, i], F[:, j]), -1)


def test_face_samples_lie_on_their_class():
    h = hull("cn2", 200)
    for s in (PLUS, MINUS):
        X, tid, _ = face_samples(h, s, 16)
        assert np.all(h.index(s).distance(X) < 1e-9)
        assert np.allclose(mink_inner(X, X), -1)
    with pytest.raises(ValueError):
        face_samples(h, PLUS, 17)


@pytest.mark.parametrize("name", CURVES)
def test_width_dominates_boundary_width(name, reports):
    r = reports[name]
    assert r.width_est >= r.boundary_width_est - 1e-9
    assert r.boundary_width_est == max(r.one_sided.values())


@pytest.mark.parametrize("name", CURVES)
def test_boundary_width_beats_dense_face_samples(name, reports):
    h = hull(name, 400)
    dense = max(h.index(-s).distance(face_samples(h, s, 16)[0]).max() for s in (PLUS, MINUS))
    assert reports[name].boundary_width_est >= dense - 1e-9


@pytest.mark.parametrize("name", CURVES)
def test_width_beats_lattice_oracle(name, reports):
    h = hull(name, 400)
    g = np.linspace(-1, 1, 41)
    G = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)
    G = G[(h.mesh.signed_distances(G) < -1e-9).all(axis=1) & ((G * G).sum(axis=1) < 1 - 1e-9)]
    assert reports[name].width_est >= width_objective(h, klein_embed(G)).max() - 1e-9


@pytest.mark.parametrize("name", CURVES)
def test_witnesses_realize_values(name, reports):
    h = hull(name, 400)
    r = reports[name]
    assert abs(width_objective(h, r.width_argmax)[0] - r.width_est) < 1e-9
    bw, _ = boundary_width(h)
    assert abs(h.index(-bw.source).distance(bw.point)[0] - r.boundary_width_est) < 1e-9


def test_projection_round_trip_small_for_near_circle():
    C = build_perturbed_circle(amp=0.02)
    h = labeled_hull(sample_curve(C, 600))
    proj = nearest_projection(h, PLUS)
    assert np.all(proj.distances < 0.1)
    assert np.all(round_trip_displacement(h, proj) < 0.1)


def test_projection_feet_on_target():
    h = hull("cn3", 400)
    proj = nearest_projection(h, MINUS)
    assert np.all(h.labels[proj.target_faces] == PLUS)
    assert np.all(h.index(PLUS).distance(proj.feet) < 1e-9)
    assert np.allclose(h.index(PLUS).distance(proj.points), proj.distances)


def test_report_json_round_trip(reports):
    import json

    d = json.loads(json.dumps(reports["cn2"].to_json()))
    assert d["N"] == 400 and d["width_est"] == reports["cn2"].width_est


def test_estimates_stable_under_resampling():
    a = estimate_widths(labeled_hull(samples("cn2", 800)), 800)
    b = estimate_widths(labeled_hull(samples("cn2", 1600)), 1600)
    assert abs(a.boundary_width_est - b.boundary_width_est) < 0.05


def lattice_max(h, n=25, keep=30, levels=10):
    """Multi-resolution lattice search: a global Klein lattice, then nested local lattices around the best points."""

    def inside(G):
        return (h.mesh.signed_distances(G) < -1e-12).all(axis=1) & ((G * G).sum(axis=1) < 1 - 1e-12)

    g = np.linspace(-1, 1, n)
    G = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1).reshape(-1, 3)
    G = G[inside(G)]
    f = width_objective(h, klein_embed(G))
    step = g[1] - g[0]
    o = np.linspace(-1, 1, 5)
    off = np.stack(np.meshgrid(o, o, o, indexing="ij"), -1).reshape(-1, 3)
    for _ in range(levels):
        top = G[np.argsort(-f)[:keep]]
        G = (top[:, None, :] + step * off[None]).reshape(-1, 3)
        G = np.vstack([top, G[inside(G)]])
        f = width_objective(h, klein_embed(G))
        step /= 2
    return float(f.max())


@pytest.mark.parametrize("N", [40, 80])
@pytest.mark.parametrize("name", ["perturbed", "cn1", "gn8", "square"])
def test_ascent_matches_multiresolution_lattice(name, N):
    h = hull(name, N)
    r = estimate_widths(h, N)
    # both are lower bounds of the sup; the ascent may only lose by 1e-3
    assert r.width_est >= lattice_max(h) - 1e-3
    assert abs(width_objective(h, r.width_argmax[None])[0] - r.width_est) < 1e-9
