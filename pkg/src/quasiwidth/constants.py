"""The two sharp constants, recomputed from explicit configurations in an H^2 slice.

The closed forms are only used for comparison; the values themselves come
from feet of perpendiculars and plane distances in the hyperboloid model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .hypcore import (
    GeodesicSegment,
    HPoint,
    IdealPoint,
    dist_point_ideal_line,
    dist_point_plane,
    dist_point_point,
    dist_point_segment,
    mink_inner,
    normalize_timelike,
    plane_orthogonal_to,
)

#: endpoints of the interval of the open question, to 5 decimals
INTERVAL = (0.88137, 1.14622)
E_Z = np.array([0.0, 0.0, 0.0, 1.0])


def slice_ideal(angle) -> np.ndarray:
    """Null vector of the ideal point at ``angle`` on the boundary of the slice ``z = 0``."""
    return np.array([1.0, np.cos(angle), np.sin(angle), 0.0])


def swap_reflection(B, C) -> np.ndarray:
    """Minkowski reflection exchanging the null vectors ``B`` and ``C`` (equal time parts)."""
    n = B - C
    n = n / np.sqrt(mink_inner(n, n))
    J = np.diag([-1.0, 1.0, 1.0, 1.0])
    return np.eye(4) - 2.0 * np.outer(n, n @ J)


def line_point(A, B, s) -> np.ndarray:
    """Arclength parametrization of the line AB, ``s = 0`` at the fixed point of the swap."""
    g = -mink_inner(A, B)
    return (np.exp(s) * A + np.exp(-s) * B) / np.sqrt(2.0 * g)


def side_distance(y, ends) -> float:
    """Distance from ``y`` to the side with endpoints ``ends``: a line if both are ideal, else a segment."""
    a, b = ends
    if abs(mink_inner(a, a)) < 1e-12 and abs(mink_inner(b, b)) < 1e-12:
        return float(dist_point_ideal_line(y, a, b))
    wrap = [IdealPoint(v) if abs(mink_inner(v, v)) < 1e-12 else HPoint(v) for v in ends]
    return float(dist_point_segment(y, GeodesicSegment(*wrap))[0])


def minmax_distance(A, B, P_ends, Pp_ends):
    """``min_y max(d(y, P), d(y, P'))`` over ``y`` on the line AB (the side Q)."""

    def f(s):
        y = line_point(A, B, s)
        return max(side_distance(y, P_ends), side_distance(y, Pp_ends))

    res = minimize_scalar(f, bounds=(-8.0, 8.0), method="bounded", options={"xatol": 1e-12})
    return float(res.fun), float(res.x)


@dataclass
class TriangleCheck:
    distance: float  # d(x, y) from the feet
    distance_segment: float  # same, via the segment kernel
    cosine_rule: float  # cosh d predicted from the measured angle at y
    angle_at_y: float
    minmax: float  # numerical min over Q of the larger distance to P, P'


@dataclass
class SquareCheck:
    distance: float  # d(m, l) via the pole v
    distance_line: float  # same, via the ideal-line kernel
    sinh_value: float  # |<m, v>|


@dataclass
class ConstantsReport:
    triangle: TriangleCheck
    square: SquareCheck
    perturbed: dict
    tol: float
    ok: bool
    failures: list

    def to_json(self) -> dict:
        return {
            "cosh_inv_sqrt2": self.triangle.distance,
            "sinh_inv_sqrt2": self.square.distance,
            "triangle": vars(self.triangle),
            "square": vars(self.square),
            "perturbed": self.perturbed,
            "interval": list(INTERVAL),
            "tol": self.tol,
            "ok": self.ok,
            "failures": self.failures,
        }


def ideal_triangle_check(A, B, C) -> TriangleCheck:
    """Sides ``P = AB``, ``P' = AC`` and ``Q = BC``; ``y`` on ``Q`` fixed by the swap of ``P`` and ``P'``."""
    S = swap_reflection(B, C)
    y = normalize_timelike(B + C)
    if not np.allclose(S @ A, A, atol=1e-12):
        raise ValueError("the swap of B and C must fix A")
    if not np.allclose(S @ y, y, atol=1e-12):
        raise ArithmeticError("y is not fixed by the symmetry")
    # foot of y on P
    pa, pb = mink_inner(y, A), mink_inner(y, B)
    x = normalize_timelike(pb * A + pa * B)
    d = float(dist_point_point(x, y))
    d_seg, _ = dist_point_segment(y, GeodesicSegment(IdealPoint(A), IdealPoint(B)))
    # angle at y between the segment towards x and the side Q towards C
    tx = x + mink_inner(x, y) * y
    tc = C + mink_inner(C, y) * y
    cos_a = mink_inner(tx, tc) / np.sqrt(mink_inner(tx, tx) * mink_inner(tc, tc))
    ang = float(np.arccos(np.clip(cos_a, -1.0, 1.0)))
    ang = min(ang, np.pi - ang)
    # triangle with angles 0 (ideal), pi/2 (at x) and ang (at y):
    # cos 0 = -cos(pi/2) cos(ang) + sin(pi/2) sin(ang) cosh d
    cosine = 1.0 / np.sin(ang)
    mm, _ = minmax_distance(B, C, (A, B), (A, C))
    return TriangleCheck(d, float(d_seg), float(cosine), ang, mm)


def ideal_square_check() -> SquareCheck:
    v1, v2, v3, v4 = (slice_ideal(k * np.pi / 2) for k in range(4))
    m = normalize_timelike(swap_reflection(v1, v2) @ (v1 + v2))
    pole = plane_orthogonal_to(v1, v4, E_Z)
    d, _ = dist_point_plane(m, pole)
    return SquareCheck(float(d), float(dist_point_ideal_line(m, v1, v4)), float(abs(mink_inner(m, pole.n))))


def perturbation_study(delta=0.15) -> dict:
    """Perturb one vertex of the ideal triangle and recompute the min-max distance.

    Splitting an ideal vertex into two ideal points makes the two sides through
    it ultraparallel, which must strictly increase the min-max.  Pulling the
    vertex in to a finite point turns the two sides into rays that cross; this
    leaves the class of disjoint half-planes, and the min-max drops instead.
    """
    a0, b0, c0 = np.pi / 2, np.pi / 2 + 2 * np.pi / 3, np.pi / 2 - 2 * np.pi / 3
    A, B, C = slice_ideal(a0), slice_ideal(b0), slice_ideal(c0)
    base, _ = minmax_distance(B, C, (A, B), (A, C))
    out = {"base": base}
    # vertex shared by P and P'
    Ab, Ac = slice_ideal(a0 + delta), slice_ideal(a0 - delta)
    out["split_PP'"] = minmax_distance(B, C, (Ab, B), (Ac, C))[0]
    # vertex shared by P and Q
    Bp, Bq = slice_ideal(b0 - delta), slice_ideal(b0 + delta)
    out["split_PQ"] = minmax_distance(Bq, C, (A, Bp), (A, C))[0]
    # the shared vertex pulled in to a finite point at distance 1 / delta from the centre
    r = np.tanh(0.5 / delta)
    a = normalize_timelike(np.array([1.0, r * np.cos(a0), r * np.sin(a0), 0.0]))
    out["finite_PP'"] = minmax_distance(B, C, (a, B), (a, C))[0]
    out["delta"] = delta
    return out


def verify_constants(tol=1e-9) -> ConstantsReport:
    A, B, C = (slice_ideal(np.pi / 2 + k * 2 * np.pi / 3) for k in range(3))
    tri = ideal_triangle_check(A, B, C)
    sq = ideal_square_check()
    pert = perturbation_study()
    w0, w1 = np.arccosh(np.sqrt(2.0)), np.arcsinh(np.sqrt(2.0))
    checks = {
        "triangle distance": abs(tri.distance - w0) <= tol,
        "triangle segment kernel": abs(tri.distance_segment - w0) <= tol,
        "cosine rule": abs(tri.cosine_rule - np.sqrt(2.0)) <= tol,
        "angle pi/4": abs(tri.angle_at_y - np.pi / 4) <= tol,
        "triangle min-max": abs(tri.minmax - w0) <= 1e-7,
        "square distance": abs(sq.distance - w1) <= tol,
        "square line kernel": abs(sq.distance_line - w1) <= tol,
        "sinh value": abs(sq.sinh_value - np.sqrt(2.0)) <= tol,
        "interval low": round(tri.distance, 5) == INTERVAL[0],
        "interval high": round(sq.distance, 5) == INTERVAL[1],
        "perturbation P P'": pert["split_PP'"] > pert["base"],
        "perturbation P Q": pert["split_PQ"] > pert["base"],
    }
    failures = [k for k, v in checks.items() if not v]
    return ConstantsReport(tri, sq, pert, tol, not failures, failures)
