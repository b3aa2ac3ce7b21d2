"""Explicit curve families: the necked curves C_n, the strip curve D, the
near-axes curves G_n, and a few simple test curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bigons import arc_bigons_clear
from .curves import (
    DisjointCircles,
    JordanCurve,
    SphereCircle,
    arc_through,
    crossing_angle,
    plane_arc,
    plane_segment,
)
from .moebius import MobiusMap, mobius_to_lorentz, stereo_to_sphere


class ConstructionError(ValueError):
    pass


def _plane_circle(center, radius) -> SphereCircle:
    pts = complex(center) + radius * np.exp(1j * np.array([0.0, 2.0, 4.0]))
    return SphereCircle.through(*stereo_to_sphere(pts))


def cn_height(n: int) -> float:
    """Height of the Q-circle intersection points ``+-i h_n``; tends to 1."""
    return 1.0 - 1.0 / (n + 2)


@dataclass
class CnCertificate:
    n: int
    eps: float
    angles: dict  # pair name -> crossing angle, or inversive distance for disjoint pairs
    bigons: list  # (arc, left clear, right clear)
    vertices: dict = field(default_factory=dict)
    ok: bool = True
    failures: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "eps": self.eps,
            "angles": self.angles,
            "bigons": [{"arc": a, "left_clear": l, "right_clear": r} for a, l, r in self.bigons],
            "vertices": {k: [v.real, v.imag] for k, v in self.vertices.items()},
            "ok": self.ok,
            "failures": self.failures,
        }


def _cn_plane_data(n):
    h = cn_height(n)
    xa = (1 - h * h) / 6
    xb = (4 - h * h) / 6
    a = complex(xa, np.sqrt(1 - xa * xa))
    b = complex(xb, np.sqrt(4 - xb * xb))
    return h, a, b, complex(-b.real, b.imag), complex(-a.real, a.imag)


def build_Cn(n: int, eps: float = 0.2, check_bigons=True, n_check=4000):
    """The curve C_n and its construction certificate.

    Circles: F1 = {|z| = 1}, F2 = {|z| = 2} and Q_A, Q_B centred at -3, +3
    through ``+-i h_n``.  The curve runs a -> b along Q_B, over the top of F2
    to d, down Q_A to e and back to a the long way round F1.  Both beta and
    delta are split at their midpoints.  The neck
    ``|a - e|`` closes up as ``n`` grows while F1 keeps its size.
    """
    if n < 1 or eps <= 0:
        raise ValueError("need n >= 1 and eps > 0")
    h, a, b, d, e = _cn_plane_data(n)
    r = np.sqrt(9 + h * h)
    deg = lambda z, c=0: float(np.degrees(np.angle(z - c)))
    alpha = plane_arc(3, r, deg(a, 3), deg(b, 3), ccw=False)
    beta = plane_arc(0, 2, deg(b), deg(d), ccw=True)
    beta_r, beta_l = beta.split(0.5)
    gamma = plane_arc(-3, r, deg(d, -3), deg(e, -3), ccw=False)
    # delta is halved too: with its endpoints closing in on each other the
    # whole arc's bigons would swallow the bump
    delta_1, delta_2 = plane_arc(0, 1, deg(e), deg(a) + 360.0, ccw=True).split(0.5)
    C = JordanCurve([alpha, beta_r, beta_l, gamma, delta_1, delta_2],
                    names=["alpha", "beta_r", "beta_l", "gamma", "delta_1", "delta_2"])

    circles = {"F1": _plane_circle(0, 1), "F2": _plane_circle(0, 2),
               "QA": _plane_circle(-3, r), "QB": _plane_circle(3, r)}
    angles, failures = {}, []
    keys = list(circles)
    for i, k1 in enumerate(keys):
        for k2 in keys[i + 1:]:
            ang = crossing_angle(circles[k1], circles[k2])
            if isinstance(ang, DisjointCircles):
                angles[f"{k1}-{k2}"] = {"disjoint": True, "inversive_distance": ang.inversive_distance}
                continue
            angles[f"{k1}-{k2}"] = ang
            if not ang > 2 * eps:
                failures.append(f"angle {k1}-{k2} = {ang:.6f} <= 2 eps = {2 * eps}")
    bigons = arc_bigons_clear(C, eps, n_check) if check_bigons else []
    for name, left, right in bigons:
        if not (left and right):
            failures.append(f"{eps}-bigon of {name} meets the curve")
    if not C.is_simple():
        failures.append("curve is not simple")
    cert = CnCertificate(n, eps, angles, bigons,
                         {"a": a, "b": b, "d": d, "e": e, "p_plus": 1j * h, "p_minus": -1j * h},
                         not failures, failures)
    if failures:
        raise ConstructionError("; ".join(failures))
    return C, cert


def build_D(n_max: int, check=True):
    """Real axis with a scaled copy of C_n minus delta_n grafted near 3n.

    Each copy is rescaled so its top reaches Im z = 1 and its feet a_n, e_n
    land on the real axis, so the whole curve lives in the strip 0 <= Im z <= 1.
    The real axis left of the first copy (f_0) and right of the last one
    (f_{n_max}) are two arcs meeting at infinity.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    arcs, names = [], []
    feet = []
    for n in range(1, n_max + 1):
        C, _ = build_Cn(n, check_bigons=False)
        ya = _cn_plane_data(n)[1].imag
        s = 1.0 / (2.0 - ya)
        L = mobius_to_lorentz(MobiusMap(s, 3 * n - 1j * ya * s, 0, 1))
        bump = [arc.transformed(L).reversed() for arc in C.arcs[:4]][::-1]
        bump_names = [f"{nm}_{n}" for nm in C.names[:4]][::-1]
        if feet:
            p, q = feet[-1][1], bump[0].start
            mid = stereo_to_sphere(0.5 * (_re(p) + _re(q)))
            arcs.append(arc_through(p, mid, q))
            names.append(f"f_{n - 1}")
        arcs.extend(bump)
        names.extend(bump_names)
        feet.append((bump[0].start, bump[-1].end))
    # the two half-lines of the real axis, joined at infinity
    north = np.array([0.0, 0.0, 1.0])
    last, first = feet[-1][1], feet[0][0]
    arcs.append(arc_through(last, stereo_to_sphere(_re(last) + 1.0), north))
    names.append(f"f_{n_max}")
    arcs.append(arc_through(north, stereo_to_sphere(_re(first) - 1.0), first))
    names.append("f_0")
    C = JordanCurve(arcs, names)
    if check and not C.is_simple():
        raise ConstructionError("D is not simple")
    return C


def _re(p) -> float:
    return p[0] / (1.0 - p[2])


GN_BULGE = 2.5


def build_Gn(n: int, bulge: float = GN_BULGE) -> JordanCurve:
    """The four axis segments with ``1/n <= |coordinate| <= n`` joined by circular arcs.

    Connectors near 0 sit in quadrants I and III, connectors near infinity in
    quadrants II and IV, which leaves a single closed curve.  Each connector
    passes through the diagonal point at modulus ``bulge * n`` (or
    ``1 / (bulge * n)``); ``bulge = 1`` gives quarter circles, whose corners
    cost a boundary width of about ``arccosh(sqrt(5))`` at every scale.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if bulge < 1:
        raise ValueError("bulge must be >= 1")
    s, t = 1.0 / n, float(n)
    w = np.exp(1j * np.pi / 4)

    def through(a, m, b):
        return arc_through(*stereo_to_sphere([a, m, b]))

    arcs = [
        plane_segment(s, t),
        through(t, bulge * t / w, -1j * t),
        plane_segment(-1j * t, -1j * s),
        through(-1j * s, -s * w / bulge, -s),
        plane_segment(-s, -t),
        through(-t, bulge * t * w ** 3, 1j * t),
        plane_segment(1j * t, 1j * s),
        through(1j * s, s * w / bulge, s),
    ]
    names = ["pos_real", "inf_IV", "neg_imag", "zero_III", "neg_real", "inf_II", "pos_imag", "zero_I"]
    return JordanCurve(arcs, names)


def build_circle() -> JordanCurve:
    return JordanCurve([plane_arc(0, 1, 0, 0)], names=["circle"])


def build_perturbed_circle(m: int = 6, amp: float = 0.15, seed: int = 0) -> JordanCurve:
    """Closed chain of ``m`` arcs through radially jittered points near the unit circle."""
    rng = np.random.default_rng(seed)
    ang = 2 * np.pi * np.arange(2 * m) / (2 * m)
    rad = 1.0 + amp * rng.uniform(-1, 1, size=2 * m)
    pts = stereo_to_sphere(rad * np.exp(1j * ang))
    arcs = [arc_through(pts[2 * k], pts[2 * k + 1], pts[(2 * k + 2) % (2 * m)]) for k in range(m)]
    return JordanCurve(arcs)


def build_square() -> JordanCurve:
    corners = [0, 1, 1 + 1j, 1j]
    return JordanCurve([plane_segment(corners[k], corners[(k + 1) % 4]) for k in range(4)])


FAMILIES = ("cn", "d", "gn", "circle", "perturbed", "square")
