"""Width and boundary width estimators and nearest-point projections."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .hypcore import hyperbolic_midpoint, klein_embed, klein_extract, mink_inner, null_lift
from .hull import MINUS, PLUS, LabeledHull

# canonical barycentric weights, in the ideal-triangle frame where all
# pairwise brackets of the rescaled vertices equal -1
_WEIGHTS = np.array(
    [[1, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2], [1, 2, 2], [2, 1, 2], [2, 2, 1],
     [4, 1, 1], [1, 4, 1], [1, 1, 4], [3, 2, 1], [3, 1, 2], [1, 3, 2], [2, 3, 1], [1, 2, 3], [2, 1, 3]],
    dtype=float,
)


def triangle_frames(hull_mesh, tris) -> np.ndarray:
    """Rescaled null vertices ``(T, 3, 4)`` with ``<v_i, v_j> = -1`` for ``i != j``."""
    V = null_lift(hull_mesh.points)
    A, B, C = (V[tris[:, k]] for k in range(3))
    gab, gbc, gca = (-mink_inner(A, B), -mink_inner(B, C), -mink_inner(C, A))
    la = np.sqrt(gbc / (gab * gca))
    lb = np.sqrt(gca / (gab * gbc))
    lc = np.sqrt(gab / (gbc * gca))
    return np.stack([la[:, None] * A, lb[:, None] * B, lc[:, None] * C], axis=1)


def frame_point(frames, w) -> np.ndarray:
    """Points with weights ``w`` (k, 3) in frames (k, 3, 4)."""
    v = np.einsum("ki,kij->kj", w, frames)
    q = 2 * (w[:, 0] * w[:, 1] + w[:, 1] * w[:, 2] + w[:, 2] * w[:, 0])
    return v / np.sqrt(q)[:, None]


def face_samples(hull: LabeledHull, label, M=5):
    """``M`` canonical samples in every triangle of the class: points and triangle ids."""
    if not 1 <= M <= len(_WEIGHTS):
        raise ValueError(f"M must lie in [1, {len(_WEIGHTS)}]")
    idx = hull.index(label)
    frames = triangle_frames(hull.mesh, idx.tris)
    T = len(frames)
    w = np.tile(_WEIGHTS[:M], (T, 1))
    tid = np.repeat(np.arange(T), M)
    return frame_point(frames[tid], w), tid, frames


@dataclass
class SideWitness:
    value: float
    point: np.ndarray  # hyperboloid point on the source side
    source: int  # label of the side the point lies on
    face: int


def _polish_in_triangle(frame, dist_fn, w0):
    """Maximize ``dist_fn`` over one ideal triangle in log-weight coordinates."""
    x0 = np.log(w0[1:] / w0[0])

    def neg(x):
        w = np.concatenate([[1.0], np.exp(np.clip(x, -30, 30))])
        return -dist_fn(frame_point(frame[None], w[None]))[0]

    res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-9, "fatol": 1e-13, "maxiter": 400})
    w = np.concatenate([[1.0], np.exp(np.clip(res.x, -30, 30))])
    return -res.fun, frame_point(frame[None], w[None])[0]


def one_sided_width(hull: LabeledHull, source, M=5, n_polish=6) -> SideWitness:
    """``sup`` over sampled points of one boundary class of the distance to the other."""
    target = hull.index(-source)
    X, tid, frames = face_samples(hull, source, M)
    d = target.distance(X)
    order = np.argsort(-d, kind="stable")
    best_v, best_p, best_t = float(d[order[0]]), X[order[0]], int(tid[order[0]])
    done = set()
    for k in order:
        if len(done) >= n_polish:
            break
        t = int(tid[k])
        if t in done:
            continue
        done.add(t)
        v, p = _polish_in_triangle(frames[t], target.distance, _WEIGHTS[k % M])
        if v > best_v:
            best_v, best_p, best_t = v, p, t
    face = int(hull.index(source).tri_face[best_t])
    return SideWitness(best_v, best_p, source, face)


def boundary_width(hull: LabeledHull, M=5, n_polish=6):
    """Lower bound for the boundary width: the larger one-sided sup and its witness."""
    if hull.mesh.flat:
        X, _, _ = face_samples(hull, PLUS, 1)
        return SideWitness(0.0, X[0], PLUS, int(hull.faces_of(PLUS)[0])), []
    sides = [one_sided_width(hull, s, M, n_polish) for s in (PLUS, MINUS)]
    best = max(sides, key=lambda s: (s.value, -s.source))
    return best, sides


def width_objective(hull: LabeledHull, X) -> np.ndarray:
    X = np.atleast_2d(X)
    return hull.index(PLUS).distance(X) + hull.index(MINUS).distance(X)


@dataclass
class WidthResult:
    value: float
    point: np.ndarray
    seeds: int
    evaluations: int


def _clip_to_hull(mesh, anchor, k):
    """Pull ``k`` back along the segment from ``anchor`` to the hull boundary if it left."""
    step = k - anchor
    a = mesh.u @ step
    slack = mesh.c - mesh.u @ anchor
    t = 1.0
    pos = a > 1e-300
    if np.any(pos):
        t = min(1.0, float(np.min(np.maximum(slack[pos], 0.0) / a[pos])))
    return anchor + t * step


def _lattice_seeds(mesh, n_per_axis=7):
    lo, hi = mesh.points.min(axis=0), mesh.points.max(axis=0)
    axes = [np.linspace(l, h, n_per_axis + 2)[1:-1] for l, h in zip(lo, hi)]
    G = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    inside = (mesh.signed_distances(G) < -1e-9).all(axis=1) & (np.sum(G * G, axis=1) < 1 - 1e-9)
    return G[inside]


def width(hull: LabeledHull, bw: SideWitness, sides, M=5, n_ascent=6, step=0.05, max_iter=500):
    """Lower bound for the width by simplex ascent of ``d(x, +) + d(x, -)`` in Klein coordinates."""
    if hull.mesh.flat:
        # both sides are the same totally geodesic disk
        return WidthResult(0.0, bw.point, 0, 0)
    seeds = [s.point for s in sides]
    # midpoints between high-scoring boundary samples and their feet
    for s in (PLUS, MINUS):
        X, _, _ = face_samples(hull, s, M)
        top = X[np.argsort(-hull.index(-s).distance(X), kind="stable")[:8]]
        _, foot, _ = hull.index(-s).query(top)
        seeds.extend(hyperbolic_midpoint(top, foot))
    lat = _lattice_seeds(hull.mesh)
    if len(lat):
        seeds.extend(klein_embed(lat))
    seeds = np.array(seeds)
    f0 = width_objective(hull, seeds)
    order = np.argsort(-f0, kind="stable")
    best_v, best_p = float(f0[order[0]]), seeds[order[0]]
    evals = len(seeds)
    mesh = hull.mesh
    for i in order[:n_ascent]:
        anchor = klein_extract(seeds[i])

        def neg(k, anchor=anchor):
            kk = _clip_to_hull(mesh, anchor, k)
            return -float(width_objective(hull, klein_embed(kk))[0])

        simplex = np.vstack([anchor, anchor + step * np.eye(3)])
        res = minimize(neg, anchor, method="Nelder-Mead",
                       options={"initial_simplex": simplex, "xatol": 1e-7, "fatol": 0.0, "maxiter": max_iter})
        evals += res.nfev
        if -res.fun > best_v:
            best_v = float(-res.fun)
            best_p = klein_embed(_clip_to_hull(mesh, anchor, res.x))
    return WidthResult(best_v, best_p, len(seeds), evals)


@dataclass
class WidthReport:
    width_est: float
    boundary_width_est: float
    width_argmax: np.ndarray
    boundary_width_argmax: np.ndarray
    N: int
    M: int
    refinement_delta: float = float("nan")
    width_delta: float = float("nan")
    boundary_width_delta: float = float("nan")
    one_sided: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "width_est": self.width_est,
            "boundary_width_est": self.boundary_width_est,
            "width_argmax": [float(v) for v in self.width_argmax],
            "boundary_width_argmax": [float(v) for v in self.boundary_width_argmax],
            "N": self.N,
            "M": self.M,
            "refinement_delta": self.refinement_delta,
            "width_delta": self.width_delta,
            "boundary_width_delta": self.boundary_width_delta,
            "one_sided": self.one_sided,
        }


def estimate_widths(hull: LabeledHull, N: int, M=5) -> WidthReport:
    bw, sides = boundary_width(hull, M)
    w = width(hull, bw, sides, M)
    # f at the boundary witness equals the boundary width (up to roundoff), so
    # the reported width never drops below it
    if w.value < bw.value:
        w = WidthResult(bw.value, bw.point, w.seeds, w.evaluations)
    return WidthReport(w.value, bw.value, w.point, bw.point, N, M,
                       one_sided={("plus" if s.source == PLUS else "minus"): s.value for s in sides})


# ---------------------------------------------------------------------------
# nearest-point projection


@dataclass
class ProjectionMap:
    source: int
    points: np.ndarray  # (k, 4) samples on the source side
    source_faces: np.ndarray
    feet: np.ndarray  # (k, 4) nearest points on the target side
    target_faces: np.ndarray
    distances: np.ndarray


def projection_samples(hull: LabeledHull, label):
    """Canonical centres of the triangles of a class (the vertices themselves are ideal)."""
    idx = hull.index(label)
    frames = triangle_frames(hull.mesh, idx.tris)
    X = frame_point(frames, np.ones((len(frames), 3)))
    return X, idx.tri_face.copy()


def nearest_projection(hull: LabeledHull, source) -> ProjectionMap:
    X, faces = projection_samples(hull, source)
    d, foot, tf = hull.index(-source).query(X)
    return ProjectionMap(source, X, faces, foot, tf, d)


def round_trip_displacement(hull: LabeledHull, proj: ProjectionMap) -> np.ndarray:
    """``d(x, pi_back(pi(x)))`` for every source sample."""
    _, back, _ = hull.index(proj.source).query(proj.feet)
    return np.arccosh(np.maximum(1.0, -mink_inner(proj.points, back)))
