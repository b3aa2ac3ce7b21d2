"""End-to-end pipelines: sample, hull, classify, widths, turning and QI fit."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .bigons import arc_bigons_clear
from .curves import JordanCurve, sample_curve
from .hull import MINUS, PLUS, LabeledHull, classify_faces, convex_hull_3d
from .moebius import MobiusMap, apply_to_sphere, boost_to_origin, conformal_barycenter, mobius_to_lorentz
from .pathmetric import DevelopedMetric, PathMetric, qi_fit
from .turning import turning_constant
from .width import WidthReport, boundary_width, estimate_widths, nearest_projection

CSV_COLUMNS = ("family", "n", "N", "K", "width_est", "boundary_width_est", "L", "A", "refinement_delta")


@dataclass
class ExperimentConfig:
    experiment: str = "analyze"
    N: int = 2000
    M: int = 5
    refine: int = 2
    n_values: tuple = ()
    n_max: int | None = None
    eps: float = 0.2
    seed: int | None = None
    tol: float = 1e-9
    out: str | None = None
    qi_pairs: int = 200

    def __post_init__(self):
        if self.N < 16:
            raise ValueError("N must be >= 16")
        if not 1 <= self.M <= 16:
            raise ValueError("M must lie in [1, 16]")
        if self.refine < 0:
            raise ValueError("refine must be >= 0")
        if self.qi_pairs < 10:
            raise ValueError("qi_pairs must be >= 10")

    def to_json(self) -> dict:
        d = asdict(self)
        d["n_values"] = list(self.n_values)
        return d


def centring_boost(P) -> np.ndarray:
    """Boost taking the conformal barycentre of the samples to the origin.

    Widths are isometry invariant; centring only improves conditioning when a
    Mobius map has crowded the samples near one point of the sphere.
    """
    return boost_to_origin(conformal_barycenter(P))


def labeled_hull(P, centre=True) -> LabeledHull:
    """Labeled hull of the (optionally centred) samples.

    ``hull.to_input`` maps hyperboloid points of the hull frame back to the
    frame of ``P``.
    """
    B = centring_boost(P) if centre else np.eye(4)
    mesh = convex_hull_3d(apply_to_sphere(B, P))
    hull = LabeledHull(mesh, classify_faces(mesh))
    hull.to_input = np.linalg.inv(B)
    return hull


def widths_of_samples(P, M=5, boundary_only=False) -> WidthReport:
    hull = labeled_hull(P)
    if boundary_only:
        bw, sides = boundary_width(hull, M)
        return WidthReport(float("nan"), bw.value, np.full(4, np.nan), bw.point, len(P), M,
                           one_sided={("plus" if s.source == PLUS else "minus"): s.value for s in sides})
    return estimate_widths(hull, len(P), M)


def refinement_deltas(full: WidthReport, half: WidthReport) -> tuple:
    """``(width change, boundary width change, larger of the two)`` between N/2 and N."""
    dw = abs(full.width_est - half.width_est)
    db = abs(full.boundary_width_est - half.boundary_width_est)
    both = db if np.isnan(dw) else max(dw, db)
    return dw, db, both


def sample_pair(C: JordanCurve, N: int, g: MobiusMap | None = None):
    """Samples at ``N`` and ``N // 2``, optionally pushed forward by ``g``."""
    out = []
    for n in (N, N // 2):
        P = sample_curve(C, n)
        if g is not None:
            P = apply_to_sphere(mobius_to_lorentz(g), P)
        out.append(P)
    return out


@dataclass
class AnalysisResult:
    family: str
    n: int | None
    N: int
    K: float
    report: WidthReport
    turning_witness: list
    L: float
    A: float
    qi_pairs: int
    path_metric_excess: float  # median graph / exact ratio on the QI pool
    config: dict = field(default_factory=dict)

    @property
    def width_est(self) -> float:
        return self.report.width_est

    @property
    def boundary_width_est(self) -> float:
        return self.report.boundary_width_est

    @property
    def refinement_delta(self) -> float:
        return self.report.refinement_delta

    def row(self) -> dict:
        vals = {
            "family": self.family,
            "n": "" if self.n is None else self.n,
            "N": self.N,
            "K": self.K,
            "width_est": self.width_est,
            "boundary_width_est": self.boundary_width_est,
            "L": self.L,
            "A": self.A,
            "refinement_delta": self.refinement_delta,
        }
        return {k: vals[k] for k in CSV_COLUMNS}

    def to_json(self) -> dict:
        out = dict(self.row())
        out.update({
            "curve": self.family,
            "lower_bounds": True,
            "argmax": [float(v) for v in self.report.width_argmax],
            "boundary_argmax": [float(v) for v in self.report.boundary_width_argmax],
            "report": self.report.to_json(),
            "turning": {"K": self.K, "witness": self.turning_witness},
            "qi": {"L": self.L, "A": self.A, "pairs": self.qi_pairs},
            "path_metric_excess": self.path_metric_excess,
            "config": self.config,
        })
        return out


def fit_projection(hull: LabeledHull, refine=2, pairs=200, seed=0):
    """QI constants of the nearest-point projection from PLUS to MINUS, and the graph excess."""
    proj = nearest_projection(hull, PLUS)
    exact = [DevelopedMetric(hull, s) for s in (PLUS, MINUS)]
    fit = qi_fit(exact[0], exact[1], proj, pairs, seed)
    # graph metric on a small pool, as a diagnostic of its discretization error
    rng = np.random.default_rng(seed)
    pool = np.sort(rng.choice(len(proj.points), size=min(12, len(proj.points)), replace=False))
    G = PathMetric(hull, PLUS, refine).pairwise(proj.points[pool], proj.source_faces[pool])
    D = exact[0].pairwise(proj.points[pool], proj.source_faces[pool])
    off = ~np.eye(len(pool), dtype=bool) & (D > 1e-12)
    excess = float(np.median(G[off] / D[off])) if off.any() else 1.0
    return fit, excess


def analyze_curve(C: JordanCurve, cfg: ExperimentConfig, family="custom", n=None,
                  g: MobiusMap | None = None, with_qi=True) -> AnalysisResult:
    P, P_half = sample_pair(C, cfg.N, g)
    hull = labeled_hull(P)
    report = estimate_widths(hull, len(P), cfg.M)
    report.width_argmax = hull.to_input @ report.width_argmax
    report.boundary_width_argmax = hull.to_input @ report.boundary_width_argmax
    half = widths_of_samples(P_half, cfg.M)
    report.width_delta, report.boundary_width_delta, report.refinement_delta = refinement_deltas(report, half)
    tr = turning_constant(P)
    if with_qi:
        fit, excess = fit_projection(hull, cfg.refine, cfg.qi_pairs, 0 if cfg.seed is None else cfg.seed)
        L, A = fit.L, fit.A
    else:
        L, A, excess = float("nan"), float("nan"), float("nan")
    return AnalysisResult(family, n, cfg.N, tr.K, report, [[float(v) for v in w] for w in tr.witness_points],
                          L, A, cfg.qi_pairs, excess, cfg.to_json())


# ---------------------------------------------------------------------------
# Mobius probes


def zoom_translate_family(zooms=(1.0, 2.0, 4.0, 8.0), shifts=(0.0, -3.0, -6.0, -12.0)) -> list:
    """``z -> lam (z + t)`` for each zoom ``lam`` and shift ``t`` (identity first)."""
    return [MobiusMap(lam, lam * t, 0, 1) for t in shifts for lam in zooms]


def transformed_curve(C: JordanCurve, g: MobiusMap) -> JordanCurve:
    L = mobius_to_lorentz(g)
    return JordanCurve([a.transformed(L) for a in C.arcs], names=list(C.names))


@dataclass
class ProbeEntry:
    matrix: list
    boundary_width_est: float
    width_est: float
    bigons_clear: bool


@dataclass
class ProbeReport:
    entries: list
    refinement_delta: float  # of the identity (first) entry
    max_boundary_width: float
    spread: float  # max - min boundary width over the family
    config: dict

    def to_json(self) -> dict:
        return {
            "entries": [asdict(e) for e in self.entries],
            "refinement_delta": self.refinement_delta,
            "max_boundary_width": self.max_boundary_width,
            "spread": self.spread,
            "config": self.config,
        }


def probe(C: JordanCurve, maps, cfg: ExperimentConfig, with_width=False, check_bigons=True) -> ProbeReport:
    """Recompute the estimates on ``g . C`` for every map, from pushed-forward samples."""
    P0, P0h = sample_pair(C, cfg.N)
    base = widths_of_samples(P0, cfg.M, boundary_only=not with_width)
    half = widths_of_samples(P0h, cfg.M, boundary_only=not with_width)
    delta = refinement_deltas(base, half)[2]
    entries = []
    for g in maps:
        P = apply_to_sphere(mobius_to_lorentz(g), P0)
        rep = widths_of_samples(P, cfg.M, boundary_only=not with_width)
        clear = True
        if check_bigons:
            res = arc_bigons_clear(transformed_curve(C, g), cfg.eps, n_samples=2000)
            clear = all(l and r for _, l, r in res)
        m = g.matrix
        entries.append(ProbeEntry([[[z.real, z.imag] for z in row] for row in m.tolist()],
                                  rep.boundary_width_est, rep.width_est, clear))
    bws = np.array([e.boundary_width_est for e in entries])
    return ProbeReport(entries, delta, float(bws.max()), float(bws.max() - bws.min()), cfg.to_json())
