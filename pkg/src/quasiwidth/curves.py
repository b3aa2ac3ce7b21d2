"""Jordan curves as closed chains of oriented circular arcs on the unit sphere."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .moebius import apply_to_sphere, sphere_to_plane, stereo_to_sphere

TWO_PI = 2.0 * np.pi
_ON_CIRCLE_TOL = 1e-9


class CurveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SphereCircle:
    """The circle ``{x in S^2 : u . x = c}``; the cap ``u . x > c`` is its positive side."""

    u: np.ndarray
    c: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(3)
        nu = np.linalg.norm(u)
        if nu == 0:
            raise CurveError("circle normal must be nonzero")
        if abs(nu - 1.0) > 1e-12:
            u = u / nu
        if not abs(self.c) < 1:
            raise CurveError(f"|c| must be < 1, got {self.c}")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "c", float(self.c))
        # orthonormal frame (e1, e2, u), right-handed
        a = np.array([1.0, 0, 0]) if abs(u[0]) < 0.9 else np.array([0, 1.0, 0])
        e1 = np.cross(u, a)
        e1 /= np.linalg.norm(e1)
        object.__setattr__(self, "_e1", e1)
        object.__setattr__(self, "_e2", np.cross(u, e1))

    @property
    def center(self) -> np.ndarray:
        return self.c * self.u

    @property
    def radius(self) -> float:
        return float(np.sqrt(1.0 - self.c * self.c))

    @property
    def minkowski_normal(self) -> np.ndarray:
        """Unit spacelike normal of the hyperbolic plane bounded by this circle."""
        return np.concatenate([[self.c], self.u]) / self.radius

    def angle_of(self, x) -> np.ndarray:
        d = np.asarray(x, dtype=float) - self.center
        return np.arctan2(d @ self._e2, d @ self._e1)

    def point_at(self, phi) -> np.ndarray:
        phi = np.asarray(phi, dtype=float)[..., None]
        return self.center + self.radius * (np.cos(phi) * self._e1 + np.sin(phi) * self._e2)

    def residual(self, x) -> np.ndarray:
        """Distance of sphere points from the circle's plane."""
        return np.abs(np.asarray(x, dtype=float) @ self.u - self.c)

    def same_as(self, other: "SphereCircle", tol=1e-9) -> bool:
        for s in (1.0, -1.0):
            if np.linalg.norm(self.u - s * other.u) < tol and abs(self.c - s * other.c) < tol:
                return True
        return False

    def to_json(self) -> dict:
        return {"u": [float(v) for v in self.u], "c": self.c}

    @classmethod
    def through(cls, p1, p2, p3) -> "SphereCircle":
        p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p1, p2, p3))
        u = np.cross(p2 - p1, p3 - p1)
        nu = np.linalg.norm(u)
        if nu < 1e-14:
            raise CurveError("three points do not determine a circle")
        u /= nu
        c = float(np.mean([u @ p1, u @ p2, u @ p3]))
        return cls(u, c)


@dataclass(frozen=True, eq=False)
class Arc:
    """An arc of ``circle`` from ``start`` to ``end``.

    ``orientation == "pos"`` means the angle increases counterclockwise about
    ``circle.u``.  ``start == end`` denotes the full circle.
    """

    circle: SphereCircle
    start: np.ndarray
    end: np.ndarray
    orientation: str = "pos"

    def __post_init__(self):
        if self.orientation not in ("pos", "neg"):
            raise CurveError(f"orientation must be 'pos' or 'neg', got {self.orientation!r}")
        s = np.asarray(self.start, dtype=float).reshape(3)
        e = np.asarray(self.end, dtype=float).reshape(3)
        for p in (s, e):
            if abs(np.linalg.norm(p) - 1) > 1e-9 or self.circle.residual(p) > _ON_CIRCLE_TOL * 10:
                raise CurveError("arc endpoint is not on its circle")
        object.__setattr__(self, "start", s)
        object.__setattr__(self, "end", e)

    @property
    def sign(self) -> float:
        return 1.0 if self.orientation == "pos" else -1.0

    @property
    def is_full(self) -> bool:
        return np.linalg.norm(self.start - self.end) < 1e-12

    @property
    def sweep(self) -> float:
        """Swept angle in (0, 2 pi]."""
        if self.is_full:
            return TWO_PI
        d = self.sign * (self.circle.angle_of(self.end) - self.circle.angle_of(self.start))
        d = float(np.mod(d, TWO_PI))
        return d if d > 1e-15 else TWO_PI

    @property
    def length(self) -> float:
        return self.circle.radius * self.sweep

    def at(self, s) -> np.ndarray:
        """Points at fractions ``s`` in [0, 1] of the sweep."""
        phi0 = self.circle.angle_of(self.start)
        return self.circle.point_at(phi0 + self.sign * np.asarray(s, dtype=float) * self.sweep)

    @property
    def midpoint(self) -> np.ndarray:
        return self.at(0.5)

    def param_of(self, x) -> np.ndarray:
        """Fraction of the sweep at which points ``x`` sit (in [0, 2 pi / sweep))."""
        d = self.sign * (self.circle.angle_of(x) - self.circle.angle_of(self.start))
        return np.mod(d, TWO_PI) / self.sweep

    def contains(self, x, tol=1e-9) -> np.ndarray:
        x = np.atleast_2d(x)
        on = self.circle.residual(x) < 1e-7
        t = self.param_of(x)
        ang_tol = tol / max(self.sweep, 1e-12)
        inside = (t <= 1 + ang_tol) | (t >= TWO_PI / self.sweep - ang_tol)
        return on & inside

    def reversed(self) -> "Arc":
        return Arc(self.circle, self.end, self.start, "neg" if self.orientation == "pos" else "pos")

    def split(self, s=0.5) -> tuple["Arc", "Arc"]:
        m = self.at(s)
        return Arc(self.circle, self.start, m, self.orientation), Arc(self.circle, m, self.end, self.orientation)

    def transformed(self, L) -> "Arc":
        """Image under the boundary action of a Lorentz matrix."""
        pts = apply_to_sphere(L, self.at([0.0, 0.25, 0.5, 1.0]))
        if self.is_full:
            return full_circle_through(pts[0], pts[1], pts[2])
        return arc_through(pts[0], pts[2], pts[3])

    def to_json(self) -> dict:
        return {
            "circle": self.circle.to_json(),
            "start": [float(v) for v in self.start],
            "end": [float(v) for v in self.end],
            "orientation": self.orientation,
        }


def _snap(circle: SphereCircle, p) -> np.ndarray:
    """Project a point onto the circle (removes roundoff from constructions)."""
    return circle.point_at(circle.angle_of(p))


def arc_through(start, mid, end) -> Arc:
    """The arc from ``start`` to ``end`` passing through ``mid``."""
    circle = SphereCircle.through(start, mid, end)
    s, m, e = (_snap(circle, p) for p in (start, mid, end))
    ps, pm, pe = circle.angle_of(s), circle.angle_of(m), circle.angle_of(e)
    orient = "pos" if np.mod(pm - ps, TWO_PI) < np.mod(pe - ps, TWO_PI) else "neg"
    return Arc(circle, s, e, orient)


def full_circle_through(p0, p1, p2) -> Arc:
    """Full circle starting at ``p0`` and running through ``p1`` before ``p2``."""
    circle = SphereCircle.through(p0, p1, p2)
    s = _snap(circle, p0)
    a0, a1, a2 = (circle.angle_of(p) for p in (s, p1, p2))
    orient = "pos" if np.mod(a1 - a0, TWO_PI) < np.mod(a2 - a0, TWO_PI) else "neg"
    return Arc(circle, s, s, orient)


def plane_arc(center, radius, from_deg, to_deg, ccw=True) -> Arc:
    """Arc of a planar circle, pushed to the sphere by stereographic projection."""
    a0, a1 = np.radians(from_deg), np.radians(to_deg)
    sign = 1.0 if ccw else -1.0
    sweep = np.mod(sign * (a1 - a0), TWO_PI)
    if sweep < 1e-12:
        sweep = TWO_PI
    if sweep == TWO_PI:
        zs = complex(center) + radius * np.exp(1j * (a0 + sign * np.array([0.0, 2.0, 4.0])))
        return full_circle_through(*stereo_to_sphere(zs))
    zs = complex(center) + radius * np.exp(1j * (a0 + sign * sweep * np.array([0.0, 0.5, 1.0])))
    return arc_through(*stereo_to_sphere(zs))


def plane_segment(p, q) -> Arc:
    """Straight segment ``[p, q]`` in C as an arc of a circle through the north pole."""
    p, q = complex(p), complex(q)
    pts = stereo_to_sphere(np.array([p, 0.5 * (p + q), q]))
    return arc_through(pts[0], pts[1], pts[2])


def _intersections(c1: SphereCircle, c2: SphereCircle, tol=1e-12):
    d = np.cross(c1.u, c2.u)
    dd = d @ d
    if dd < 1e-24:
        return np.zeros((0, 3))
    G = np.array([[1.0, c1.u @ c2.u], [c1.u @ c2.u, 1.0]])
    al, be = np.linalg.solve(G, [c1.c, c2.c])
    x0 = al * c1.u + be * c2.u
    disc = (1.0 - x0 @ x0) / dd
    if disc < -tol:
        return np.zeros((0, 3))
    if disc < tol:
        return x0[None, :] / np.linalg.norm(x0)
    s = np.sqrt(disc)
    return np.vstack([x0 + s * d, x0 - s * d])


@dataclass(eq=False)
class JordanCurve:
    """A closed chain of arcs; ``arcs[i].end == arcs[i + 1].start`` cyclically."""

    arcs: list
    names: list = field(default=None)

    def __post_init__(self):
        self.arcs = list(self.arcs)
        if not self.arcs:
            raise CurveError("a curve needs at least one arc")
        n = len(self.arcs)
        for i, a in enumerate(self.arcs):
            nxt = self.arcs[(i + 1) % n]
            if np.linalg.norm(a.end - nxt.start) > 1e-9:
                raise CurveError(f"arc {i} does not end where arc {(i + 1) % n} starts")
        if n > 1 and any(a.is_full for a in self.arcs):
            raise CurveError("a full circle must be the only arc")
        if self.names is None:
            self.names = [f"arc{i}" for i in range(n)]

    def __len__(self):
        return len(self.arcs)

    @property
    def length(self) -> float:
        return float(sum(a.length for a in self.arcs))

    def vertices(self) -> np.ndarray:
        return np.array([a.start for a in self.arcs])

    def transformed(self, L) -> "JordanCurve":
        arcs = [a.transformed(L) for a in self.arcs]
        # re-glue joints so that roundoff does not break closure
        fixed = []
        for i, a in enumerate(arcs):
            nxt = arcs[(i + 1) % len(arcs)]
            if a.is_full:
                fixed.append(a)
                continue
            end = _snap(a.circle, nxt.start)
            fixed.append(Arc(a.circle, a.start, end, a.orientation))
        return JordanCurve(fixed, list(self.names))

    def crossings(self, tol=1e-9) -> list:
        """Pairs of arcs that meet anywhere other than at a shared consecutive endpoint."""
        n = len(self.arcs)
        bad = []
        for i in range(n):
            for j in range(i + 1, n):
                if _arcs_meet(self.arcs[i], self.arcs[j], i, j, n, tol):
                    bad.append((i, j))
        return bad

    def is_simple(self) -> bool:
        return not self.crossings()

    def check(self) -> "JordanCurve":
        bad = self.crossings()
        if bad:
            raise CurveError(f"curve is not simple: arcs {bad} intersect")
        return self

    def to_json(self) -> dict:
        return {"arcs": [a.to_json() for a in self.arcs]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, data: dict) -> "JordanCurve":
        if "arcs" in data:
            arcs = [
                Arc(SphereCircle(a["circle"]["u"], a["circle"]["c"]), a["start"], a["end"], a["orientation"])
                for a in data["arcs"]
            ]
            return cls(arcs)
        if "plane_arcs" in data:
            arcs = []
            for item in data["plane_arcs"]:
                if "segment" in item:
                    (x0, y0), (x1, y1) = item["segment"]
                    arcs.append(plane_segment(complex(x0, y0), complex(x1, y1)))
                else:
                    cx, cy = item["center"]
                    arcs.append(plane_arc(complex(cx, cy), item["radius"], item["from_deg"], item["to_deg"],
                                          item.get("ccw", True)))
            return cls(_reglue(arcs))
        raise CurveError("curve JSON needs an 'arcs' or 'plane_arcs' list")

    @classmethod
    def loads(cls, text: str) -> "JordanCurve":
        return cls.from_json(json.loads(text))


def _reglue(arcs: Sequence[Arc], tol=1e-7) -> list:
    """Snap consecutive endpoints together when they agree up to input precision."""
    out = []
    n = len(arcs)
    for i, a in enumerate(arcs):
        nxt = arcs[(i + 1) % n]
        if a.is_full or n == 1:
            out.append(a)
            continue
        if np.linalg.norm(a.end - nxt.start) > tol:
            raise CurveError(f"planar arc {i} does not end where arc {(i + 1) % n} starts")
        out.append(Arc(a.circle, a.start, _snap(a.circle, nxt.start), a.orientation))
    return out


def _arcs_meet(a: Arc, b: Arc, i, j, n, tol) -> bool:
    shared = []
    if (i + 1) % n == j:
        shared.append(a.end)
    if (j + 1) % n == i:
        shared.append(a.start)

    def is_shared(x):
        return any(np.linalg.norm(x - s) < 1e-7 for s in shared)

    if a.circle.same_as(b.circle):
        # same circle: sample b densely in a's parameter and look for interior overlap
        probe = b.at(np.linspace(0, 1, 65))
        inside = a.contains(probe, tol)
        return bool(any(ins and not is_shared(x) for ins, x in zip(inside, probe)))
    for x in _intersections(a.circle, b.circle):
        if a.contains(x, tol)[0] and b.contains(x, tol)[0] and not is_shared(x):
            return True
    return False


def sample_curve(C: JordanCurve, N: int, with_arc_index=False):
    """``N`` points in curve order, allocated to arcs by spherical arc length.

    Every arc contributes its start point plus interior points; its end point
    is the next arc's start, so each arc is represented by at least two points.
    """
    if N < 4:
        raise ValueError("need at least 4 samples")
    n = len(C.arcs)
    if N < n:
        raise ValueError(f"{N} samples cannot cover {n} arcs")
    lengths = np.array([a.length for a in C.arcs])
    share = N * lengths / lengths.sum()
    k = np.maximum(1, np.floor(share).astype(int))
    while k.sum() < N:
        k[np.argmax(share - k)] += 1
    while k.sum() > N:
        cand = np.where(k > 1)[0]
        k[cand[np.argmin((share - k)[cand])]] -= 1
    pts, idx = [], []
    for i, (arc, ki) in enumerate(zip(C.arcs, k)):
        pts.append(arc.at(np.arange(ki) / ki))
        idx.append(np.full(ki, i))
    P = np.vstack(pts)
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    if with_arc_index:
        return P, np.concatenate(idx)
    return P


def curve_to_plane(P) -> np.ndarray:
    return sphere_to_plane(np.asarray(P))


@dataclass(frozen=True)
class DisjointCircles:
    """Certificate for non-intersecting circles.

    ``inversive_distance`` is ``|<n1, n2>| > 1``; ``arccosh`` of it is the
    hyperbolic distance between the planes the circles bound.  ``nested`` is
    True when one positive cap contains the other.
    """

    inversive_distance: float
    nested: bool

    @property
    def plane_distance(self) -> float:
        return float(np.arccosh(self.inversive_distance))


def angle_between_circles(c1: SphereCircle, c2: SphereCircle, tol=1e-12):
    """Angle between the positive caps' boundary circles, or a disjointness certificate.

    For intersecting circles this is ``arccos <n1, n2>`` in [0, pi]: 0 for
    internally tangent caps, pi for externally tangent ones.
    """
    if c1.same_as(c2):
        raise CurveError("identical circles have no intersection angle")
    g = float(c1.minkowski_normal @ np.diag([-1.0, 1, 1, 1]) @ c2.minkowski_normal)
    if abs(g) <= 1 + tol:
        return float(np.arccos(np.clip(g, -1.0, 1.0)))
    return DisjointCircles(abs(g), g > 0)


def crossing_angle(c1: SphereCircle, c2: SphereCircle):
    """Unoriented crossing angle in [0, pi/2], or a disjointness certificate."""
    a = angle_between_circles(c1, c2)
    if isinstance(a, DisjointCircles):
        return a
    return min(a, np.pi - a)
