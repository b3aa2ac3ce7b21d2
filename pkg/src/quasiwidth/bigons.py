"""Theta-bigons of oriented circular arcs and their disjointness from a curve."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Arc, JordanCurve, SphereCircle, sample_curve
from .moebius import MobiusMap, mobius_apply, sphere_to_plane, stereo_to_sphere


def _normalizer(arc: Arc) -> MobiusMap:
    """A Mobius map sending the arc's start to 0 and its end to infinity."""
    zs, ze = sphere_to_plane(arc.start), sphere_to_plane(arc.end)
    if not np.isfinite(zs):
        return MobiusMap(0, 1, 1, -ze)
    if not np.isfinite(ze):
        return MobiusMap(1, -zs, 0, 1)
    return MobiusMap(1, -zs, 1, -ze)


@dataclass(frozen=True, eq=False)
class Bigon:
    """Open region between ``arc`` and the circle through its endpoints at angle ``theta``.

    In the chart where the arc runs from 0 to infinity it is the sector of
    opening ``theta`` on the given side of the arc's ray.
    """

    arc: Arc
    side: str
    theta: float

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        if not 0 < self.theta < np.pi / 2:
            raise ValueError("theta must lie in (0, pi/2)")
        if self.arc.is_full:
            raise ValueError("a full circle has no bigons")

    @property
    def _frame(self):
        T = _normalizer(self.arc)
        phi0 = float(np.angle(mobius_apply(T, sphere_to_plane(self.arc.midpoint))))
        return T, phi0

    def _offsets(self, P):
        T, phi0 = self._frame
        w = mobius_apply(T, np.atleast_1d(sphere_to_plane(np.atleast_2d(P))))
        ok = np.isfinite(w) & (np.abs(w) > 1e-300)
        off = np.angle(np.where(ok, w, 1.0)) - phi0
        off = np.mod(off + np.pi, 2 * np.pi) - np.pi
        return np.where(ok, off, 0.0)

    def contains(self, P, tol=1e-9) -> np.ndarray:
        P = np.atleast_2d(P)
        off = self._offsets(P)
        if self.side == "right":
            off = -off
        # the vertices themselves are on the boundary
        away = np.minimum(np.linalg.norm(P - self.arc.start, axis=1),
                          np.linalg.norm(P - self.arc.end, axis=1)) > 1e-9
        return away & (off > tol) & (off < self.theta - tol)

    def side_circle(self) -> SphereCircle:
        """The second boundary circle of the bigon."""
        T, phi0 = self._frame
        sgn = 1.0 if self.side == "left" else -1.0
        w = np.exp(1j * (phi0 + sgn * self.theta))
        z = mobius_apply(T.inverse(), np.array([w]))[0]
        return SphereCircle.through(self.arc.start, stereo_to_sphere(z), self.arc.end)


def make_bigon(arc: Arc, side: str, theta: float) -> Bigon:
    return Bigon(arc, side, theta)


def bigon_disjoint(b: Bigon, C, n_samples=4000) -> bool:
    """True iff no sample of ``C`` (a curve or a point array) lies strictly inside ``b``."""
    P = sample_curve(C, n_samples) if isinstance(C, JordanCurve) else np.asarray(C)
    return not bool(np.any(b.contains(P)))


def arc_bigons_clear(C: JordanCurve, theta: float, n_samples=4000) -> list:
    """For every arc, ``(name, left_clear, right_clear)``; a full circle has no arcs to check."""
    P = sample_curve(C, n_samples)
    P = np.vstack([P] + [a.at(np.linspace(0, 1, 33)) for a in C.arcs])
    out = []
    for name, arc in zip(C.names, C.arcs):
        if arc.is_full:
            continue
        out.append((name, bigon_disjoint(Bigon(arc, "left", theta), P),
                    bigon_disjoint(Bigon(arc, "right", theta), P)))
    return out
