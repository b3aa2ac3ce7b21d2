"""Convex hulls of ideal points in the Klein ball and distances to their boundary.

In the Klein model the hyperbolic convex hull of a set of ideal points is the
Euclidean convex hull of the corresponding unit vectors.  Faces are merged
Qhull facets; each face carries its Euclidean plane ``u . k = c`` and the
matching support plane of H^3.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import ConvexHull, QhullError

from .hypcore import HPlane, mink_inner, normalize_timelike, null_lift
from .regions import RegionTester

PLUS, MINUS = 1, -1
_SIG = np.array([-1.0, 1.0, 1.0, 1.0])


class HullError(RuntimeError):
    pass


class ClassificationError(RuntimeError):
    pass


@dataclass(eq=False)
class HullMesh:
    points: np.ndarray  # (V, 3) unit vectors
    faces: list  # vertex index arrays, counterclockwise seen from outside
    u: np.ndarray  # (F, 3) outward unit normals
    c: np.ndarray  # (F,) plane offsets; the hull is u . k <= c
    tris: np.ndarray  # (T, 3) fan triangulation of the faces
    tri_face: np.ndarray  # (T,)
    flat: bool = False
    _edges: dict = field(default=None, repr=False)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def edges(self) -> dict:
        """Map ``(i, j)`` with ``i < j`` to the faces sharing that polygon edge."""
        if self._edges is None:
            E = {}
            for f, poly in enumerate(self.faces):
                for a, b in zip(poly, np.roll(poly, -1)):
                    E.setdefault((min(a, b), max(a, b)), []).append(f)
            self._edges = E
        return self._edges

    def euler(self) -> int:
        V = len(np.unique(np.concatenate(self.faces)))
        return V - len(self.edges()) + self.n_faces

    def face_adjacency(self) -> list:
        return [tuple(fs) for fs in self.edges().values() if len(fs) == 2]

    def signed_distances(self, K) -> np.ndarray:
        """``u_f . k - c_f`` for Klein points ``K``; non-positive inside the hull."""
        return np.atleast_2d(K) @ self.u.T - self.c

    def support_plane(self, f: int) -> HPlane:
        return support_plane(self, f)

    def to_json(self, labels=None) -> dict:
        faces = []
        for f, poly in enumerate(self.faces):
            item = {"verts": [int(v) for v in poly]}
            if labels is not None:
                item["label"] = "plus" if labels[f] == PLUS else "minus"
            faces.append(item)
        return {"vertices": [[float(x) for x in p] for p in self.points], "faces": faces}


def _order_polygon(P, idx, u):
    idx = np.asarray(sorted(set(int(i) for i in idx)))
    Q = P[idx]
    cen = Q.mean(axis=0)
    e1 = Q[0] - cen
    e1 -= (e1 @ u) * u
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    ang = np.arctan2((Q - cen) @ e2, (Q - cen) @ e1)
    poly = idx[np.argsort(ang, kind="stable")]
    k = int(np.argmin(poly))
    return np.roll(poly, -k)


def _fan(poly):
    return np.array([[poly[0], poly[i], poly[i + 1]] for i in range(1, len(poly) - 1)])


def _plane_fit(Q, hint):
    cen = Q.mean(axis=0)
    _, _, vt = np.linalg.svd(Q - cen)
    u = vt[-1]
    if u @ hint < 0:
        u = -u
    return u, float(np.mean(Q @ u))


def _qhull(P) -> ConvexHull:
    """Qhull with default options, retried with wide merges allowed.

    Long runs of exactly coplanar samples (arcs of one circle) can trip the
    wide-merge guard; the merged facets are re-fitted and checked below.
    """
    try:
        return ConvexHull(P)
    except QhullError:
        pass
    try:
        return ConvexHull(P, qhull_options="Qt Q12")
    except QhullError as exc:
        raise HullError(f"qhull failed: {str(exc).splitlines()[0]}") from exc


def convex_hull_3d(points, merge_tol=1e-10) -> HullMesh:
    """Hull of unit vectors with coplanar facets merged into polygons.

    Points that are all coplanar (a round circle) give a flat mesh: the same
    polygon twice with opposite normals.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3 or len(P) < 4:
        raise HullError("need at least 4 points in R^3")
    cen = P.mean(axis=0)
    _, s, vt = np.linalg.svd(P - cen, full_matrices=False)
    if s[1] <= 1e-10 * s[0]:
        raise HullError("points are collinear")
    if np.abs((P - cen) @ vt[2]).max() < 1e-10:
        u = vt[2]
        c = float(np.mean(P @ u))
        poly = _order_polygon(P, np.arange(len(P)), u)
        back = np.concatenate([poly[:1], poly[1:][::-1]])
        tris = _fan(poly)
        return HullMesh(P, [poly, back], np.array([u, -u]), np.array([c, -c]),
                        np.vstack([tris, tris[:, [0, 2, 1]]]),
                        np.repeat([0, 1], len(tris)), flat=True)

    H = _qhull(P)
    eq = H.equations
    nt = len(H.simplices)
    i = np.repeat(np.arange(nt), 3)
    j = H.neighbors.ravel()
    same = np.abs(eq[i] - eq[j]).max(axis=1) < merge_tol
    G = coo_matrix((np.ones(same.sum()), (i[same], j[same])), shape=(nt, nt))
    _, roots = connected_components(G, directed=False)
    members = np.argsort(roots, kind="stable")
    starts = np.searchsorted(roots[members], np.arange(roots.max() + 1))
    groups = np.split(members, starts[1:])
    extra = {}
    for pi, fi in (H.coplanar[:, :2] if len(H.coplanar) else []):
        extra.setdefault(roots[fi], []).append(pi)

    faces, us, cs = [], [], []
    for r, g in enumerate(groups):
        idx = np.concatenate([H.simplices[g].ravel(), extra.get(r, [])]).astype(int)
        if len(g) == 1 and r not in extra:
            u, c = eq[g[0], :3], -eq[g[0], 3]
            poly = np.sort(idx)
            a, b, cc = P[poly]
            if np.cross(b - a, cc - a) @ u < 0:
                poly = poly[[0, 2, 1]]
        else:
            u, c = _plane_fit(P[np.unique(idx)], eq[g[0], :3])
            poly = _order_polygon(P, idx, u)
        faces.append(poly)
        us.append(u)
        cs.append(c)
    # deterministic face order: by the leading vertices of each polygon
    order = sorted(range(len(faces)), key=lambda f: tuple(faces[f][:3]))
    faces = [faces[f] for f in order]
    u = np.array(us)[order]
    c = np.array(cs)[order]
    tris, tf = [], []
    for f, poly in enumerate(faces):
        t = _fan(poly)
        tris.append(t)
        tf.append(np.full(len(t), f))
    mesh = HullMesh(P, faces, u, c, np.vstack(tris), np.concatenate(tf))
    if np.abs(c).max() >= 1:
        raise HullError("face plane misses the ball")
    if mesh.signed_distances(P).max() > 1e-9:
        raise HullError("merged faces are not supporting planes")
    used = np.unique(np.concatenate(faces))
    if len(used) != len(P):
        raise HullError(f"{len(P) - len(used)} input points are not hull vertices")
    return mesh


def support_plane(mesh: HullMesh, f: int) -> HPlane:
    """Minkowski normal ``(c, u) / sqrt(1 - c^2)``; the hull is on its non-positive side."""
    c = float(mesh.c[f])
    if abs(c) >= 1:
        raise HullError("face plane misses the ball")
    return HPlane.from_klein(mesh.u[f], c)


def face_normals(mesh: HullMesh) -> np.ndarray:
    return np.column_stack([mesh.c, mesh.u]) / np.sqrt(1 - mesh.c ** 2)[:, None]


# ---------------------------------------------------------------------------
# classification


def default_reference(tester: RegionTester) -> np.ndarray:
    north = np.array([0.0, 0.0, 1.0])
    if not tester.near_curve(north, tol=max(10 * tester.max_gap, 1e-6))[0]:
        return north
    return tester.center


def classify_faces(mesh: HullMesh, reference=None, tester: RegionTester = None) -> np.ndarray:
    """Label faces PLUS or MINUS by the complementary region their outer cap faces.

    The curve polygon is ``mesh.points`` in order.  PLUS is the region holding
    ``reference`` (default: the north pole, or a point far from the curve when
    the curve passes near infinity).
    """
    tester = RegionTester(mesh.points) if tester is None else tester
    ref = default_reference(tester) if reference is None else np.asarray(reference, dtype=float)
    try:
        side = tester.side(mesh.u)
        ref_side = tester.side(ref)[0]
    except RuntimeError as exc:
        raise ClassificationError(str(exc)) from exc
    labels = np.where(side == ref_side, PLUS, MINUS)
    if mesh.flat and labels[0] == labels[1]:
        raise ClassificationError("flat hull sides landed in the same region")
    return labels


def label_components(mesh: HullMesh, labels) -> dict:
    """Number of edge-connected components of each label class."""
    parent = list(range(mesh.n_faces))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for f, g in mesh.face_adjacency():
        if labels[f] == labels[g]:
            parent[find(f)] = find(g)
    out = {PLUS: set(), MINUS: set()}
    for f in range(mesh.n_faces):
        out[int(labels[f])].add(find(f))
    return {k: len(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# distances


def _minkowski_perp(X, Y, Z):
    """Unit vectors Minkowski-orthogonal to rows of X, Y, Z (each (k, 4))."""
    M = np.stack([X, Y, Z], axis=1) * _SIG
    _, _, vt = np.linalg.svd(M)
    m = vt[:, -1, :]
    return m / np.sqrt(np.abs(mink_inner(m, m)))[:, None]


@dataclass(eq=False)
class SurfaceIndex:
    """Precomputed data for distances to a union of faces of a hull mesh."""

    mesh: HullMesh
    faces: np.ndarray

    def __post_init__(self):
        mesh = self.mesh
        self.faces = np.asarray(sorted(set(int(f) for f in np.atleast_1d(self.faces))))
        if len(self.faces) == 0:
            raise ValueError("empty face set")
        sel = np.isin(mesh.tri_face, self.faces)
        self.tris = mesh.tris[sel]
        self.tri_face = mesh.tri_face[sel]
        T = len(self.tris)
        normals = face_normals(mesh)
        self.N = normals[self.tri_face]
        V = null_lift(mesh.points)
        A, B, C = (V[self.tris[:, k]] for k in range(3))
        # edge planes through each triangle edge, perpendicular to the face,
        # signed positive on the triangle side
        X = np.concatenate([B, C, A])
        Y = np.concatenate([C, A, B])
        Z = np.concatenate([A, B, C])
        m = _minkowski_perp(X, Y, np.tile(self.N, (3, 1)))
        m *= np.sign(mink_inner(Z, m))[:, None]
        self.Mstack = m.reshape(3, T, 4)
        # unique triangle edges
        e = np.sort(np.concatenate([self.tris[:, [1, 2]], self.tris[:, [2, 0]], self.tris[:, [0, 1]]]), axis=1)
        owner = np.concatenate([self.tri_face] * 3)
        key = e[:, 0] * (len(mesh.points) + 1) + e[:, 1]
        order = np.lexsort((owner, key))
        key_s = key[order]
        first = np.ones(len(order), bool)
        first[1:] = key_s[1:] != key_s[:-1]
        self.edges = e[order][first]
        self.edge_face = owner[order][first]
        self.EA = V[self.edges[:, 0]]
        self.EB = V[self.edges[:, 1]]
        self.g = -mink_inner(self.EA, self.EB)

    def query(self, P, chunk_budget=3_000_000):
        """Distances, feet and face ids for points ``P`` (k, 4)."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        Q = len(P)
        T, E = len(self.tris), len(self.edges)
        d = np.empty(Q)
        face = np.empty(Q, dtype=int)
        foot = np.empty((Q, 4))
        NJ = (self.N * _SIG).T
        MJ = (self.Mstack * _SIG).reshape(-1, 4).T
        AJ = (self.EA * _SIG).T
        BJ = (self.EB * _SIG).T
        step = max(1, chunk_budget // (4 * T + 2 * E))
        for k in range(0, Q, step):
            p = P[k:k + step]
            q = len(p)
            s = p @ NJ
            inside = ((p @ MJ).reshape(q, 3, T) >= -1e-12).all(axis=1)
            pd = np.where(inside, np.arcsinh(np.abs(s)), np.inf)
            pa, pb = p @ AJ, p @ BJ
            ld = np.arccosh(np.sqrt(np.maximum(2 * pa * pb / self.g, 1.0)))
            ti = np.argmin(pd, axis=1)
            ei = np.argmin(ld, axis=1)
            r = np.arange(q)
            dp, de = pd[r, ti], ld[r, ei]
            fp, fe = self.tri_face[ti], self.edge_face[ei]
            use_plane = (dp < de) | ((dp == de) & (fp <= fe))
            d[k:k + q] = np.where(use_plane, dp, de)
            face[k:k + q] = np.where(use_plane, fp, fe)
            sp = s[r, ti][:, None]
            ft_plane = (p - sp * self.N[ti]) / np.sqrt(1 + sp * sp)
            ft_edge = normalize_timelike(pb[r, ei][:, None] * self.EA[ei] + pa[r, ei][:, None] * self.EB[ei])
            foot[k:k + q] = np.where(use_plane[:, None], ft_plane, ft_edge)
        return d, foot, face

    def distance(self, P, chunk_budget=3_000_000) -> np.ndarray:
        """Distances only (cheaper: no feet)."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        Q = len(P)
        T, E = len(self.tris), len(self.edges)
        out = np.empty(Q)
        NJ = (self.N * _SIG).T
        MJ = (self.Mstack * _SIG).reshape(-1, 4).T
        AJ = (self.EA * _SIG).T
        BJ = (self.EB * _SIG).T
        step = max(1, chunk_budget // (4 * T + 2 * E))
        for k in range(0, Q, step):
            p = P[k:k + step]
            q = len(p)
            s = np.abs(p @ NJ)
            inside = ((p @ MJ).reshape(q, 3, T) >= -1e-12).all(axis=1)
            c2 = ((p @ AJ) * (p @ BJ)).__mul__(2 / self.g).min(axis=1)
            sp = np.where(inside, s, np.inf).min(axis=1)
            out[k:k + q] = np.minimum(np.arcsinh(sp), np.arccosh(np.sqrt(np.maximum(c2, 1.0))))
        return out


def face_distance(p, mesh: HullMesh, face: int):
    """Distance from ``p`` to one (polygonal, totally geodesic) face and the nearest point."""
    d, foot, _ = SurfaceIndex(mesh, [face]).query(np.atleast_2d(p))
    return float(d[0]), foot[0]


class LabeledHull:
    """A hull mesh with face labels and cached distance indices for both classes."""

    def __init__(self, mesh: HullMesh, labels):
        self.mesh = mesh
        self.labels = np.asarray(labels)
        self._index = {}
        for lab in (PLUS, MINUS):
            if not np.any(self.labels == lab):
                raise ClassificationError("both label classes must be nonempty")

    def index(self, label) -> SurfaceIndex:
        if label not in self._index:
            self._index[label] = SurfaceIndex(self.mesh, np.where(self.labels == label)[0])
        return self._index[label]

    def faces_of(self, label) -> np.ndarray:
        return np.where(self.labels == label)[0]


def surface_distance(p, hull: LabeledHull, label):
    """Distance from ``p`` to the union of faces with ``label``: ``(d, foot, face)``."""
    d, foot, face = hull.index(label).query(np.atleast_2d(p))
    return float(d[0]), foot[0], int(face[0])
