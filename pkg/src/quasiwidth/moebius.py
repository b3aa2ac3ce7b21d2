"""CP^1 arithmetic: stereographic chart, Mobius maps and their Lorentz extensions.

Convention shared by the whole package: ``infinity`` goes to the north pole
``(0, 0, 1)``, ``0`` to the south pole and the unit circle to the equator.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .hypcore import (
    GeodesicSegment,
    HPlane,
    HPoint,
    IdealPoint,
    normalize_timelike,
)

INF = complex(np.inf, 0.0)


def is_inf(z) -> bool:
    return cmath.isinf(complex(z))


def stereo_to_sphere(z):
    """Complex number(s) to unit 3-vectors; ``INF`` (or any infinite value) maps to the north pole."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,))
    inf = ~np.isfinite(z)
    zf = np.where(inf, 0, z)
    r2 = np.abs(zf) ** 2
    out[..., 0] = 2 * zf.real / (r2 + 1)
    out[..., 1] = 2 * zf.imag / (r2 + 1)
    out[..., 2] = (r2 - 1) / (r2 + 1)
    out[inf] = (0.0, 0.0, 1.0)
    return out


def sphere_to_plane(u, tol=1e-9):
    """Inverse of :func:`stereo_to_sphere`; rejects vectors off the unit sphere."""
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(np.linalg.norm(u, axis=-1) - 1.0) > tol):
        raise ValueError("sphere_to_plane expects unit vectors")
    den = 1.0 - u[..., 2]
    pole = den < 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (u[..., 0] + 1j * u[..., 1]) / np.where(pole, 1.0, den)
    z = np.where(pole, INF, z)
    return z[()] if z.ndim == 0 else z


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (a z + b) / (c z + d)`` normalized to determinant 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det) < 1e-300:
            raise ValueError("singular Mobius map")
        s = cmath.sqrt(det)
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)) / s)

    @classmethod
    def from_matrix(cls, m) -> "MobiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return MobiusMap.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def __call__(self, z):
        return mobius_apply(self, z)


def mobius_apply(M: MobiusMap, z):
    """Fractional-linear action with infinity handled explicitly (vectorized)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    inf = ~np.isfinite(z)
    zf = z[~inf]
    num = M.a * zf + M.b
    den = M.c * zf + M.d
    pole = np.abs(den) < 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        res = np.where(pole, INF, num / np.where(pole, 1.0, den))
    out[~inf] = res
    out[inf] = INF if abs(M.c) < 1e-300 else M.a / M.c
    return out[0] if scalar else out


def _hermitian(v):
    t, x, y, z = v
    return np.array([[t + z, x + 1j * y], [x - 1j * y, t - z]])


def _from_hermitian(H):
    t = 0.5 * (H[0, 0] + H[1, 1]).real
    z = 0.5 * (H[0, 0] - H[1, 1]).real
    return np.array([t, H[0, 1].real, H[0, 1].imag, z])


def mobius_to_lorentz(M: MobiusMap) -> np.ndarray:
    """Spinor map: the Lorentz matrix acting on Hermitian matrices by ``H -> M H M*``."""
    A = M.matrix
    L = np.empty((4, 4))
    for k in range(4):
        e = np.zeros(4)
        e[k] = 1.0
        L[:, k] = _from_hermitian(A @ _hermitian(e) @ A.conj().T)
    return L


def is_lorentz(L, tol=1e-9) -> bool:
    J = np.diag([-1.0, 1, 1, 1])
    return np.allclose(L.T @ J @ L, J, atol=tol * max(1.0, np.abs(L).max() ** 2)) and L[0, 0] > 0


def apply_to_sphere(L, U):
    """Boundary action of a Lorentz matrix on unit vectors (..., 3)."""
    U = np.asarray(U, dtype=float)
    V = np.concatenate([np.ones(U.shape[:-1] + (1,)), U], axis=-1) @ L.T
    W = V[..., 1:] / V[..., 0:1]
    return W / np.linalg.norm(W, axis=-1, keepdims=True)


def isometry_apply(L, obj):
    """Act by a Lorentz matrix on points, planes, ideal points or segments."""
    if isinstance(obj, HPoint):
        return HPoint(normalize_timelike(L @ obj.v))
    if isinstance(obj, IdealPoint):
        return IdealPoint(L @ obj.v)
    if isinstance(obj, HPlane):
        return HPlane.normalized(L @ obj.n)
    if isinstance(obj, GeodesicSegment):
        return GeodesicSegment(isometry_apply(L, obj.a), isometry_apply(L, obj.b))
    raise TypeError(f"cannot apply an isometry to {type(obj).__name__}")


def random_mobius(rng, scale=1.0) -> MobiusMap:
    """A random Mobius map with Gaussian entries; ``scale`` controls distance from the identity."""
    m = np.eye(2) + scale * (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / 2
    return MobiusMap.from_matrix(m)


def rotation_to_north(p) -> np.ndarray:
    """A rotation matrix of R^3 taking the unit vector ``p`` to ``(0, 0, 1)``."""
    p = np.asarray(p, dtype=float)
    p = p / np.linalg.norm(p)
    n = np.array([0.0, 0.0, 1.0])
    v = np.cross(p, n)
    s, c = np.linalg.norm(v), float(p @ n)
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]]) / s
    th = np.arctan2(s, c)
    return np.eye(3) + np.sin(th) * K + (1 - np.cos(th)) * K @ K


def boost_to_origin(x) -> np.ndarray:
    """Lorentz boost taking the hyperboloid point ``x`` to ``(1, 0, 0, 0)``."""
    x = np.asarray(x, dtype=float)
    t, v = x[0], x[1:]
    r = np.linalg.norm(v)
    L = np.eye(4)
    if r < 1e-15:
        return L
    u = v / r
    L[0, 0] = t
    L[0, 1:] = -v
    L[1:, 0] = -v
    L[1:, 1:] += (t - 1.0) * np.outer(u, u)
    return L


def conformal_barycenter(U, iters=100, tol=1e-13) -> np.ndarray:
    """Point of H^3 minimizing the mean of ``log(-<x, (1, u_i)>)`` over sphere points ``U``.

    The objective is geodesically convex and Mobius-equivariant, so the
    minimizer moves with the point cloud.  Solved by Newton steps in the
    tangent space at the current point, re-centring after every step.
    """
    U = np.asarray(U, dtype=float)
    L = np.eye(4)  # current frame: points seen from the current centre
    for _ in range(iters):
        W = apply_to_sphere(L, U)
        g = -W.mean(axis=0)  # gradient at the origin
        H = np.eye(3) - (W.T @ W) / len(W)
        # Hessian of mean log(1 - v.w) at v = 0 is I - mean(w w^T) (positive for spread clouds)
        step = -np.linalg.solve(H + 1e-12 * np.eye(3), g)
        s = np.linalg.norm(step)
        if s < tol:
            break
        s_clamped = min(s, 1.0)
        x = np.concatenate([[np.cosh(s_clamped)], np.sinh(s_clamped) * step / s])
        L = boost_to_origin(x) @ L
    return np.linalg.inv(L) @ np.array([1.0, 0.0, 0.0, 0.0])
