"""Point-in-region tests for the two complementary regions of a sampled curve on S^2."""

from __future__ import annotations

import numpy as np

from .moebius import rotation_to_north


class RegionError(RuntimeError):
    pass


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (1 + 5 ** 0.5) * i
    r = np.sqrt(1 - z * z)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def far_point(samples, n_candidates=2000) -> np.ndarray:
    """A point of S^2 roughly as far as possible from the sampled curve."""
    cand = fibonacci_sphere(n_candidates)
    # min over samples of chordal distance, via max of dot products
    best = np.full(len(cand), -np.inf)
    for k in range(0, len(samples), 2048):
        best = np.maximum(best, (cand @ samples[k:k + 2048].T).max(axis=1))
    return cand[int(np.argmin(best))]


class RegionTester:
    """Winding-number test after stereographic projection from a point off the curve.

    ``side(x)`` is 0 for points in the region containing the projection
    centre and 1 for the other region.
    """

    def __init__(self, samples, center=None):
        self.samples = np.asarray(samples, dtype=float)
        self.center = far_point(self.samples) if center is None else np.asarray(center, dtype=float)
        self.R = rotation_to_north(self.center)
        self.poly = self._project(self.samples)
        gaps = np.linalg.norm(np.diff(np.vstack([self.samples, self.samples[:1]]), axis=0), axis=1)
        self.max_gap = float(gaps.max())

    def _project(self, X):
        Y = X @ self.R.T
        den = np.maximum(1.0 - Y[:, 2], 1e-15)
        return (Y[:, 0] + 1j * Y[:, 1]) / den

    def winding(self, X) -> np.ndarray:
        w = self._project(np.atleast_2d(X))
        out = np.empty(len(w))
        p0 = self.poly
        p1 = np.roll(self.poly, -1)
        step = max(1, 4_000_000 // len(p0))
        for k in range(0, len(w), step):
            z = w[k:k + step, None]
            out[k:k + step] = np.angle((p1 - z) / (p0 - z)).sum(axis=1) / (2 * np.pi)
        return out

    def near_curve(self, X, tol=1e-6) -> np.ndarray:
        X = np.atleast_2d(X)
        d = np.full(len(X), np.inf)
        for k in range(0, len(self.samples), 2048):
            S = self.samples[k:k + 2048]
            d = np.minimum(d, np.sqrt(np.maximum(0, 2 - 2 * (X @ S.T))).min(axis=1))
        return d < tol

    def side(self, X, tol=1e-6, rng=None) -> np.ndarray:
        X = np.array(np.atleast_2d(X), dtype=float)
        rng = np.random.default_rng(0) if rng is None else rng
        bad = self.near_curve(X, tol)
        for _ in range(5):
            if not bad.any():
                break
            Y = X[bad] + 1e-4 * rng.normal(size=(bad.sum(), 3))
            X[bad] = Y / np.linalg.norm(Y, axis=1, keepdims=True)
            bad = self.near_curve(X, tol)
        if bad.any():
            raise RegionError("query point persistently within tolerance of the curve")
        w = self.winding(X)
        k = np.rint(w)
        if np.any(np.abs(w - k) > 1e-3) or np.any(np.abs(k) > 1):
            raise RegionError("winding number is not an integer in {-1, 0, 1}")
        return (k != 0).astype(int)
