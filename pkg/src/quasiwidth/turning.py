"""Ahlfors bounded-turning constant of a sampled closed curve."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moebius import sphere_to_plane


@dataclass
class TurningReport:
    K: float
    witness: tuple  # sample indices (i, j)
    witness_points: np.ndarray
    subarc_diameter: float
    n_samples: int


def _as_coords(samples, metric):
    X = np.asarray(samples)
    if metric == "chordal":
        if np.iscomplexobj(X) or X.shape[-1] != 3:
            raise ValueError("chordal metric expects unit 3-vectors")
        return X.astype(float)
    if metric != "planar":
        raise ValueError(f"unknown metric {metric!r}")
    if np.iscomplexobj(X):
        z = X
    elif X.shape[-1] == 3:
        z = sphere_to_plane(X)
    else:
        return X.astype(float)
    if not np.all(np.isfinite(z)):
        raise ValueError("planar metric cannot handle the point at infinity")
    return np.column_stack([z.real, z.imag])


def turning_constant(samples, metric="chordal") -> TurningReport:
    """``K = max diam(smaller subarc between x, y) / d(x, y)`` over sample pairs.

    Subarc diameters are taken over the samples.  The scan is O(N^2): for each
    end index ``b`` the diameters of all cyclic ranges ending at ``b`` follow
    from those ending at ``b - 1`` by one running maximum.
    """
    X = _as_coords(samples, metric)
    N = len(X)
    if N < 8:
        raise ValueError("need at least 8 samples")
    fwd = np.zeros((N, N))
    diam = np.zeros(N + 1)
    best = (1.0, (0, 1), 0.0)
    for b in range(2 * N):
        smax = min(b, N)
        idx = (b - np.arange(smax + 1)) % N
        reach = np.maximum.accumulate(np.linalg.norm(X[idx] - X[b % N], axis=1))
        new = reach.copy()
        new[1:] = np.maximum(diam[:smax], reach[1:])
        diam[: smax + 1] = new
        if b < N:
            fwd[:b, b] = new[b:0:-1]
            continue
        i = b - N
        if i >= N - 1:
            continue
        js = np.arange(i + 1, N)
        back = new[i + 1 : N][::-1]
        sub = np.minimum(fwd[i, i + 1 :], back)
        dist = np.linalg.norm(X[js] - X[i], axis=1)
        ok = dist > 1e-12
        if not np.any(ok):
            continue
        ratio = np.where(ok, sub / np.where(ok, dist, 1.0), 0.0)
        k = int(np.argmax(ratio))
        if ratio[k] > best[0]:
            best = (float(ratio[k]), (i, int(js[k])), float(sub[k]))
    K, (i, j), dsub = best
    return TurningReport(K, (i, j), np.asarray(samples)[[i, j]], dsub, N)
