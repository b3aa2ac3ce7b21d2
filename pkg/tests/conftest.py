import functools
import sys

import numpy as np
import pytest

from quasiwidth.analysis import labeled_hull
from quasiwidth.constructions import build_circle, build_Cn, build_D, build_Gn, build_perturbed_circle, build_square
from quasiwidth.curves import sample_curve


@functools.lru_cache(maxsize=None)
def curve(name):
    if name == "circle":
        return build_circle()
    if name == "perturbed":
        return build_perturbed_circle()
    if name == "square":
        return build_square()
    if name.startswith("cn"):
        return build_Cn(int(name[2:]))[0]
    if name.startswith("gn"):
        return build_Gn(int(name[2:]))
    if name.startswith("d"):
        return build_D(int(name[1:]))
    raise KeyError(name)


@functools.lru_cache(maxsize=None)
def samples(name, N):
    return sample_curve(curve(name), N)


@functools.lru_cache(maxsize=None)
def hull(name, N=400, centre=True):
    return labeled_hull(samples(name, N), centre=centre)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sphere(rng, k):
    U = rng.normal(size=(k, 3))
    return U / np.linalg.norm(U, axis=1)[:, None]


def random_hpoint(rng, k=None, scale=1.5):
    from quasiwidth.hypcore import normalize_timelike

    shape = (1 if k is None else k, 3)
    v = rng.normal(size=shape) * scale
    p = np.concatenate([np.sqrt(1 + np.sum(v * v, axis=1))[:, None], v], axis=1)
    p = normalize_timelike(p)
    return p[0] if k is None else p


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
