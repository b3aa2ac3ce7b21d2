"""Hyperboloid-model kernel for H^3.

Vectors of R^{3,1} are plain numpy arrays ordered ``(t, x, y, z)`` with the
form ``<u, v> = -u_t v_t + u_x v_x + u_y v_y + u_z v_z``.  The typed wrappers
below validate their invariants on construction; every kernel also accepts
raw arrays so the hot paths can stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

#: tolerance for algebraic identities (norms, incidences)
TOL_ALGEBRAIC = 1e-9
#: tolerance used when comparing against brute-force oracles
TOL_ORACLE = 1e-6

_SIGNATURE = np.array([-1.0, 1.0, 1.0, 1.0])


class InvalidSegment(ValueError):
    """Raised when a geodesic segment has linearly dependent endpoints."""


def minkvec(t, x, y, z) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def mink_inner(u, v):
    """Minkowski form, broadcasting over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.sum(u * _SIGNATURE * v, axis=-1)


def mink_matrix(U, V):
    """All pairwise forms ``<U_i, V_j>`` for stacks of shape (n, 4) and (m, 4)."""
    U = np.asarray(U, dtype=float)
    return (U * _SIGNATURE) @ np.asarray(V, dtype=float).T


def mink_norm2(u):
    return mink_inner(u, u)


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point of H^3 on the upper sheet ``<v, v> = -1, v_t > 0``."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(4)
        if abs(mink_norm2(v) + 1.0) > TOL_ALGEBRAIC * max(1.0, v[0] ** 2) or v[0] <= 0:
            raise ValueError(f"not a point of the hyperboloid: {v}")
        object.__setattr__(self, "v", v)

    @classmethod
    def normalized(cls, v) -> "HPoint":
        return cls(normalize_timelike(v))


@dataclass(frozen=True, eq=False)
class IdealPoint:
    """A point at infinity, stored as the null vector ``(1, u)`` with ``|u| = 1``."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(4)
        if not np.all(np.isfinite(v)) or abs(v[0]) < 1e-300:
            raise ValueError("degenerate ideal point")
        v = v / v[0]
        r = np.linalg.norm(v[1:])
        if r == 0 or abs(r - 1.0) > 1e-6:
            raise ValueError(f"not a null vector: {v}")
        v[1:] /= r
        object.__setattr__(self, "v", v)

    @classmethod
    def from_sphere(cls, u) -> "IdealPoint":
        u = np.asarray(u, dtype=float)
        return cls(np.concatenate([[1.0], u / np.linalg.norm(u)]))

    @property
    def sphere(self) -> np.ndarray:
        return self.v[1:].copy()


@dataclass(frozen=True, eq=False)
class HPlane:
    """Totally geodesic plane ``{p : <p, n> = 0}`` with unit spacelike normal.

    The preferred closed half-space is ``<p, n> <= 0``.
    """

    n: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.n, dtype=float).reshape(4)
        if abs(mink_norm2(n) - 1.0) > TOL_ALGEBRAIC * max(1.0, n[0] ** 2):
            raise ValueError(f"plane normal is not unit spacelike: {n}")
        object.__setattr__(self, "n", n)

    @classmethod
    def normalized(cls, n) -> "HPlane":
        n = np.asarray(n, dtype=float)
        q = mink_norm2(n)
        if q <= 0:
            raise ValueError("plane normal must be spacelike")
        return cls(n / np.sqrt(q))

    @classmethod
    def from_klein(cls, u, c) -> "HPlane":
        """The plane whose Klein-ball trace is ``{k : u . k = c}``, ``|u| = 1``."""
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u)
        if abs(c) >= 1:
            raise ValueError("Klein plane misses the ball")
        return cls(np.concatenate([[c], u]) / np.sqrt(1.0 - c * c))

    def flipped(self) -> "HPlane":
        return HPlane(-self.n)


Endpoint = Union[HPoint, IdealPoint]


@dataclass(frozen=True, eq=False)
class GeodesicSegment:
    a: Endpoint
    b: Endpoint

    def __post_init__(self):
        M = np.vstack([self.a.v, self.b.v])
        s = np.linalg.svd(M, compute_uv=False)
        if s[1] <= 1e-12 * s[0]:
            raise InvalidSegment("segment endpoints span a line, not a plane")


def _vec(obj) -> np.ndarray:
    if isinstance(obj, (HPoint, IdealPoint)):
        return obj.v
    if isinstance(obj, HPlane):
        return obj.n
    return np.asarray(obj, dtype=float)


def normalize_timelike(v):
    """Rescale future/past timelike vectors onto the upper hyperboloid sheet."""
    v = np.asarray(v, dtype=float)
    q = -mink_inner(v, v)
    s = np.sign(v[..., 0:1])
    return v * s / np.sqrt(np.maximum(q, 1e-300))[..., None]


def null_lift(u):
    """Sphere points (..., 3) to null vectors (..., 4) with t = 1."""
    u = np.asarray(u, dtype=float)
    return np.concatenate([np.ones(u.shape[:-1] + (1,)), u], axis=-1)


def dist_point_point(p, q):
    """Hyperbolic distance, ``cosh d = -<p, q>`` with the argument clamped to 1.

    Close points use ``2 sinh(d/2) = |p - q|`` instead, which avoids the
    square-root loss of ``arccosh`` near 1.
    """
    pv, qv = _vec(p), _vec(q)
    c = np.maximum(1.0, -mink_inner(pv, qv))
    diff = pv - qv
    near = 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(0.0, mink_inner(diff, diff))))
    return np.where(c < 1.5, near, np.arccosh(c))[()]


def dist_point_plane(p, plane):
    """Distance from ``p`` to a plane and the foot of the perpendicular.

    Returns ``(d, foot)`` where ``sinh d = |<p, n>|``; the foot is the
    Minkowski-orthogonal projection ``p - <p, n> n`` rescaled by ``cosh d``.
    Broadcasts over leading axes of ``p``.
    """
    pv, n = _vec(p), _vec(plane)
    s = mink_inner(pv, n)
    foot = pv - s[..., None] * n
    foot = foot / np.sqrt(1.0 + s * s)[..., None]
    return np.arcsinh(np.abs(s)), foot


def _foot_on_span(p, a, b):
    G = np.array([[mink_inner(a, a), mink_inner(a, b)], [mink_inner(a, b), mink_inner(b, b)]])
    rhs = np.array([mink_inner(p, a), mink_inner(p, b)])
    alpha, beta = np.linalg.solve(G, rhs)
    return alpha, beta


def dist_point_segment(p, seg: GeodesicSegment):
    """Distance from ``p`` to a geodesic segment, ray or line, and the realizing point.

    The orthogonal projection onto ``span(a, b)`` lands on the geodesic; when
    its coefficients are both non-negative the foot lies between the endpoints.
    Otherwise the nearest finite endpoint wins (ideal endpoints never clamp).
    """
    pv = _vec(p)
    a, b = seg.a.v, seg.b.v
    alpha, beta = _foot_on_span(pv, a, b)
    finite = [e.v for e in (seg.a, seg.b) if isinstance(e, HPoint)]
    if alpha >= 0 and beta >= 0:
        proj = alpha * a + beta * b
        c = np.sqrt(max(-mink_inner(proj, proj), 1.0))
        return float(np.arccosh(c)), proj / np.sqrt(-mink_inner(proj, proj))
    if not finite:
        # roundoff on an ideal-ideal line: the foot is essentially on the line
        proj = max(alpha, 0.0) * a + max(beta, 0.0) * b
        foot = normalize_timelike(proj)
        return float(dist_point_point(pv, foot)), foot
    dists = [float(dist_point_point(pv, e)) for e in finite]
    i = int(np.argmin(dists))
    return dists[i], finite[i].copy()


def dist_point_ideal_line(P, A, B):
    """Vectorized distance from points ``P`` (..., 4) to lines through null vectors.

    ``cosh^2 d = 2 <p,a><p,b> / (-<a,b>)``; ``A`` and ``B`` broadcast against ``P``.
    """
    pa = mink_inner(P, A)
    pb = mink_inner(P, B)
    g = -mink_inner(A, B)
    c2 = 2.0 * pa * pb / g
    return np.arccosh(np.sqrt(np.maximum(c2, 1.0)))


def klein_embed(k):
    """Klein-ball coordinates (..., 3) to hyperboloid points (..., 4)."""
    k = np.asarray(k, dtype=float)
    r2 = np.sum(k * k, axis=-1)
    if np.any(r2 >= 1.0):
        raise ValueError("Klein coordinates must lie in the open unit ball")
    return null_lift(k) / np.sqrt(1.0 - r2)[..., None]


def klein_extract(p):
    pv = _vec(p)
    return pv[..., 1:] / pv[..., 0:1]


def geodesic_point(p, q, s):
    """Point at fraction ``s`` of the way from ``p`` to ``q`` (hyperbolic arclength)."""
    p, q = _vec(p), _vec(q)
    d = float(dist_point_point(p, q))
    if d < 1e-14:
        return p.copy()
    return (np.sinh((1 - s) * d) * p + np.sinh(s * d) * q) / np.sinh(d)


def hyperbolic_midpoint(p, q):
    """Midpoint of the segment ``[p, q]`` (vectorized)."""
    return normalize_timelike(_vec(p) + _vec(q))


def plane_through_ideal(a, b, c) -> HPlane:
    """Plane spanned by three ideal points given as sphere vectors or null vectors."""
    vs = [np.asarray(x, dtype=float) for x in (a, b, c)]
    vs = [null_lift(x) if x.shape[-1] == 3 else x for x in vs]
    return plane_orthogonal_to(*vs)


def plane_orthogonal_to(*vectors) -> HPlane:
    """Unit normal to the Minkowski span of three independent vectors."""
    M = np.vstack(vectors) * _SIGNATURE
    _, _, vt = np.linalg.svd(M)
    return HPlane.normalized(vt[-1])
