"""Intrinsic path metrics on the two boundary classes and quasi-isometry fitting.

Mesh vertices are ideal, so the graph cannot use them as nodes.  Instead every
edge shared by two faces of the same class carries a grid of points spaced
``2**-refine`` apart in hyperbolic arclength (plus a few fixed far nodes),
centred at the foot of the midpoint of the two face centres.  Inside one face any two points are joined by
a chord, which is exact because faces are convex pieces of geodesic planes.
Grids for ``refine = k`` are contained in those for ``k + 1``, so distances are
non-increasing in ``refine``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .hypcore import dist_point_point, mink_inner, mink_matrix, normalize_timelike, null_lift
from .hull import LabeledHull
from .width import ProjectionMap

#: half-length of the fine node grid on each interior edge
EDGE_SPAN = 1.0
#: fixed far nodes, independent of ``refine``
EDGE_FAR = (2.0, 4.0)


class PathMetricError(RuntimeError):
    pass


def _pairwise_dist(X, Y):
    return np.arccosh(np.maximum(1.0, -mink_matrix(X, Y)))


def face_centres(mesh) -> np.ndarray:
    """Klein centroid of each face polygon, lifted to the hyperboloid."""
    V = null_lift(mesh.points)
    return normalize_timelike(np.array([V[poly].mean(axis=0) for poly in mesh.faces]))


def edge_grid(A, B, origin, refine, span=EDGE_SPAN) -> np.ndarray:
    """Points at arclength ``j * 2**-refine`` (``|.| <= span``) and ``EDGE_FAR`` from the foot of ``origin`` on line AB."""
    pa, pb = mink_inner(origin, A), mink_inner(origin, B)
    nu = np.sqrt(-2.0 * pa * pb * mink_inner(A, B))
    lam, mu = abs(pb) / nu, abs(pa) / nu
    h = 2.0 ** -refine
    j = int(np.floor(span / h + 1e-12))
    far = np.array([x for x in EDGE_FAR if x > span])
    s = np.concatenate([h * np.arange(-j, j + 1), far, -far])
    return lam * np.exp(s)[:, None] * A + mu * np.exp(-s)[:, None] * B


@dataclass(eq=False)
class PathMetric:
    """Shortest-path metric on the faces of one label class."""

    hull: LabeledHull
    label: int
    refine: int = 2

    def __post_init__(self):
        if self.refine < 0:
            raise ValueError("refine must be >= 0")
        mesh = self.hull.mesh
        labels = self.hull.labels
        self.faces = self.hull.faces_of(self.label)
        inner = [(e, fs) for e, fs in mesh.edges().items()
                 if len(fs) == 2 and fs[0] != fs[1] and labels[fs[0]] == self.label and labels[fs[1]] == self.label]
        self._check_connected([fs for _, fs in inner])
        V = null_lift(mesh.points)
        cen = face_centres(mesh)
        pts, owner, start = [], {int(f): [] for f in self.faces}, 0
        for (i, j), (f, g) in inner:
            origin = normalize_timelike(cen[f] + cen[g])
            P = edge_grid(V[i], V[j], origin, self.refine)
            pts.append(P)
            ids = np.arange(start, start + len(P))
            start += len(P)
            owner[int(f)].append(ids)
            owner[int(g)].append(ids)
        self.nodes = np.concatenate(pts) if pts else np.zeros((0, 4))
        self.face_nodes = {f: (np.concatenate(v) if v else np.zeros(0, dtype=int)) for f, v in owner.items()}
        rows, cols, w = [], [], []
        for ids in self.face_nodes.values():
            if len(ids) < 2:
                continue
            D = _pairwise_dist(self.nodes[ids], self.nodes[ids])
            a, b = np.triu_indices(len(ids), 1)
            rows.append(ids[a])
            cols.append(ids[b])
            w.append(D[a, b])
        self._edges = (
            np.concatenate(rows) if rows else np.zeros(0, dtype=int),
            np.concatenate(cols) if cols else np.zeros(0, dtype=int),
            np.concatenate(w) if w else np.zeros(0),
        )

    def _check_connected(self, adj):
        index = {int(f): k for k, f in enumerate(self.faces)}
        if len(self.faces) == 1:
            return
        r = [index[int(f)] for f, _ in adj]
        c = [index[int(g)] for _, g in adj]
        G = coo_matrix((np.ones(len(r)), (r, c)), shape=(len(self.faces),) * 2)
        k, _ = connected_components(G, directed=False)
        if k != 1:
            raise PathMetricError(f"label class {self.label} has {k} components")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def pairwise(self, X, faces) -> np.ndarray:
        """Path distances between terminal points ``X`` (k, 4) lying on the given faces."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        faces = np.asarray(faces, dtype=int)
        k, n = len(X), self.n_nodes
        r0, c0, w0 = self._edges
        rows, cols, w = [r0], [c0], [w0]
        for t in range(k):
            ids = self.face_nodes.get(int(faces[t]))
            if ids is None:
                raise PathMetricError(f"face {faces[t]} is not in label class {self.label}")
            if len(ids):
                rows.append(np.full(len(ids), n + t))
                cols.append(ids)
                w.append(_pairwise_dist(X[t:t + 1], self.nodes[ids])[0])
        same = faces[:, None] == faces[None, :]
        a, b = np.nonzero(np.triu(same, 1))
        rows.append(n + a)
        cols.append(n + b)
        w.append(_pairwise_dist(X, X)[a, b])
        # zero-length chords would vanish from a sparse matrix
        w = np.maximum(np.concatenate(w), 1e-300)
        G = coo_matrix((w, (np.concatenate(rows), np.concatenate(cols))), shape=(n + k, n + k)).tocsr()
        D = dijkstra(G, directed=False, indices=np.arange(n, n + k))[:, n:]
        np.fill_diagonal(D, 0.0)
        return D


def path_metric(hull: LabeledHull, label, refine=2) -> PathMetric:
    return PathMetric(hull, label, refine)


@dataclass
class QIFit:
    L: float
    A: float
    pairs: np.ndarray  # (P, 2) indices into the projection's samples
    d_source: np.ndarray
    d_target: np.ndarray
    max_slack: float

    def sandwich_holds(self, tol=1e-12) -> bool:
        lo = self.d_source / self.L - self.A
        hi = self.L * self.d_source + self.A
        return bool(np.all(self.d_target >= lo - tol) and np.all(self.d_target <= hi + tol))

    def to_json(self) -> dict:
        return {"L": self.L, "A": self.A, "pairs": int(len(self.pairs)), "max_slack": self.max_slack}


def qi_residual(L, d, dp) -> float:
    """Smallest ``A`` for which ``d / L - A <= dp <= L d + A`` on all pairs."""
    if len(d) == 0:
        return 0.0
    return float(max(0.0, np.max(d / L - dp), np.max(dp - L * d)))


L_GRID = 1.05 ** np.arange(int(np.ceil(np.log(1000) / np.log(1.05))) + 1)


def farthest_point_order(X, m, start=0) -> np.ndarray:
    """Greedy farthest-point ordering (hyperbolic distance) of ``m`` of the points ``X``."""
    out = [start]
    d = dist_point_point(X, X[start])
    for _ in range(m - 1):
        i = int(np.argmax(d))
        out.append(i)
        d = np.minimum(d, dist_point_point(X, X[i]))
    return np.array(out)


def qi_fit(pm_source, pm_target, proj: ProjectionMap, pairs=200, seed=0) -> QIFit:
    """Fit quasi-isometry constants of ``proj`` between the two path metrics.

    Pairs are the first ``pairs`` pairs of a farthest-point ordering of the
    source samples from a random start, so the pairs cover the surface evenly.  ``A(L)`` is the max
    residual on the sampled pairs; ``L`` is the grid value minimizing
    ``A(L) + (L - 1) * median(d)``, the additive slack at a typical scale.
    """
    if pairs < 10:
        raise ValueError("need at least 10 pairs")
    rng = np.random.default_rng(seed)
    k = len(proj.points)
    m = min(k, int(np.ceil((1 + np.sqrt(1 + 8 * pairs)) / 2)))
    # a prefix of one farthest-point ordering, so more pairs only ever add pairs
    pool = farthest_point_order(proj.points, m, int(rng.integers(k)))
    Ds = pm_source.pairwise(proj.points[pool], proj.source_faces[pool])
    Dt = pm_target.pairwise(proj.feet[pool], proj.target_faces[pool])
    b, a = np.tril_indices(m, -1)
    a, b = a[:pairs], b[:pairs]
    d, dp = Ds[a, b], Dt[a, b]
    keep = (d > 1e-12) & np.isfinite(d) & np.isfinite(dp)
    d, dp = d[keep], dp[keep]
    pairs_idx = np.column_stack([pool[a], pool[b]])[keep]
    scale = float(np.median(d)) if len(d) else 0.0
    A = np.array([qi_residual(L, d, dp) for L in L_GRID])
    i = int(np.argmin(A + (L_GRID - 1.0) * scale))
    L, Av = float(L_GRID[i]), float(A[i])
    return QIFit(L, Av, pairs_idx, d, dp, Av)


# ---------------------------------------------------------------------------
# exact development

_SIG = np.array([-1.0, 1.0, 1.0, 1.0])


def _complement_basis(A, B):
    """Minkowski-orthonormal basis of the spacelike plane orthogonal to ``A`` and ``B``."""
    G = np.array([[mink_inner(A, A), mink_inner(A, B)], [mink_inner(A, B), mink_inner(B, B)]])
    S = np.vstack([A, B])
    out = []
    for e in np.eye(4):
        v = e - np.linalg.solve(G, S @ (_SIG * e)) @ S
        for w in out:
            v = v - mink_inner(v, w) * w
        q = mink_inner(v, v)
        if q > 1e-8:
            out.append(v / np.sqrt(q))
        if len(out) == 2:
            return out
    raise PathMetricError("degenerate hinge")


def hinge_unfold(A, B, inside_f, inside_p) -> np.ndarray:
    """Rotation about the line AB taking the half-plane towards ``inside_f`` onto
    the continuation of the half-plane towards ``inside_p``."""
    e1, e2 = _complement_basis(A, B)

    def direction(x):
        w = mink_inner(x, e1) * e1 + mink_inner(x, e2) * e2
        return w / np.sqrt(mink_inner(w, w))

    wf, wp = direction(inside_f), direction(inside_p)
    # orthonormal pair (wf, wf_perp) spanning the complement
    wf_perp = mink_inner(wf, e2) * e1 - mink_inner(wf, e1) * e2
    target = -wp
    c, s = mink_inner(target, wf), mink_inner(target, wf_perp)
    rot1 = target
    rot2 = -s * wf + c * wf_perp
    H = np.eye(4)
    H += np.outer(rot1 - wf, wf * _SIG) + np.outer(rot2 - wf_perp, wf_perp * _SIG)
    return H


@dataclass(eq=False)
class DevelopedMetric:
    """Exact intrinsic metric of one class, by unfolding its faces into one plane.

    All vertices are ideal and lie on the curve, so the dual graph of a class
    is a tree and the unfolded faces tile a convex ideal polygon.  Unfolding is
    re-rooted at the face of each query point, which keeps the composed hinge
    matrices moderate near that point.
    """

    hull: LabeledHull
    label: int

    def __post_init__(self):
        mesh = self.hull.mesh
        labels = self.hull.labels
        self.faces = self.hull.faces_of(self.label)
        V = null_lift(mesh.points)
        cen = face_centres(mesh)
        self.nbr = {int(f): [] for f in self.faces}
        for (i, j), fs in mesh.edges().items():
            if len(fs) == 2 and fs[0] != fs[1] and labels[fs[0]] == self.label and labels[fs[1]] == self.label:
                f, g = int(fs[0]), int(fs[1])
                self.nbr[f].append((g, hinge_unfold(V[i], V[j], cen[g], cen[f])))
                self.nbr[g].append((f, hinge_unfold(V[i], V[j], cen[f], cen[g])))
        if len(self.unfold(int(self.faces[0]))) != len(self.faces):
            raise PathMetricError(f"label class {self.label} is disconnected")

    def unfold(self, root) -> dict:
        """Matrices taking every face of the class into the plane of ``root``."""
        R = {root: np.eye(4)}
        stack = [root]
        while stack:
            p = stack.pop()
            for f, H in self.nbr[p]:
                if f not in R:
                    R[f] = R[p] @ H
                    stack.append(f)
        return R

    def pairwise(self, X, faces) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        faces = [int(f) for f in faces]
        k = len(X)
        D = np.zeros((k, k))
        for a in range(k):
            R = self.unfold(faces[a])
            Y = np.einsum("kij,kj->ki", np.stack([R[f] for f in faces[a + 1:]]), X[a + 1:]) if a + 1 < k else np.zeros((0, 4))
            D[a, a + 1:] = _pairwise_dist(X[a:a + 1], Y)[0]
        return D + D.T
