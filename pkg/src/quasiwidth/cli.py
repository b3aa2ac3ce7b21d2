"""Command-line front end: gen, analyze, probe and verify.

Exit codes: 0 ok, 2 invalid input, 3 construction-certificate failure,
4 verification failure (including a failed internal geometric check).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .analysis import CSV_COLUMNS, ExperimentConfig, analyze_curve, probe, zoom_translate_family
from .constants import verify_constants
from .constructions import (
    ConstructionError,
    build_circle,
    build_Cn,
    build_D,
    build_Gn,
    build_perturbed_circle,
    build_square,
)
from .curves import CurveError, JordanCurve
from .hull import ClassificationError, HullError
from .moebius import MobiusMap
from .pathmetric import PathMetricError

EXIT_OK, EXIT_INPUT, EXIT_CERT, EXIT_VERIFY = 0, 2, 3, 4
GEN_FAMILIES = ("cn", "d", "gn", "circle", "perturbed", "square", "custom")


class InputError(ValueError):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def dump_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(_jsonable(r))
    return buf.getvalue()


def emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_family(family, n=None, n_max=None, eps=0.2, seed=None):
    """Curve and certificate (or ``None``) for a named family."""
    if family == "cn":
        return build_Cn(n or 1, eps)
    if family == "d":
        return build_D(n_max or 1), None
    if family == "gn":
        return build_Gn(n or 4), None
    if family == "circle":
        return build_circle(), None
    if family == "perturbed":
        return build_perturbed_circle(seed=0 if seed is None else seed), None
    if family == "square":
        return build_square(), None
    raise InputError(f"unknown family {family!r}")


def load_curve(path) -> JordanCurve:
    try:
        with open(path) as fh:
            return JordanCurve.loads(fh.read()).check()
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read curve {path}: {exc}") from exc


def load_maps(path) -> list:
    """Mobius maps from ``{"maps": [[[re, im], [re, im]], [[re, im], [re, im]]], ...}``."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        maps = []
        for m in data["maps"]:
            z = [[complex(*e) for e in row] for row in m]
            maps.append(MobiusMap.from_matrix(np.array(z)))
        return maps
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read maps {path}: {exc}") from exc


def _config(args, experiment) -> ExperimentConfig:
    return ExperimentConfig(
        experiment=experiment,
        N=args.samples,
        M=args.face_samples,
        refine=args.refine,
        n_values=tuple(getattr(args, "n", None) or ()),
        n_max=getattr(args, "nmax", None),
        eps=args.eps,
        seed=getattr(args, "seed", None),
        tol=args.tol,
        out=args.out,
    )


# ---------------------------------------------------------------------------
# commands


def cmd_gen(args) -> int:
    if args.family == "custom":
        if not args.curve:
            raise InputError("gen custom needs --curve FILE")
        C, cert = load_curve(args.curve), None
    else:
        n = args.n[0] if args.n else None
        n_max = args.nmax[0] if args.nmax else None
        C, cert = build_family(args.family, n, n_max, args.eps, args.seed)
    C.check()
    emit(dump_json(C.to_json()), args.out)
    summary = {"family": args.family, "arcs": len(C), "names": C.names, "simple": True}
    if cert is not None:
        summary["certificate"] = cert.to_json()
    sys.stderr.write(dump_json(summary))
    return EXIT_OK


def _targets(args):
    """``(family, n, curve)`` triples selected by the analyze/probe arguments."""
    if args.curve:
        return [("custom", None, load_curve(args.curve))]
    if not args.family:
        raise InputError("give a curve file or --family")
    if args.family == "d":
        return [("d", m, build_family("d", n_max=m)[0]) for m in (args.nmax or [1])]
    if args.family in ("cn", "gn"):
        default = [1] if args.family == "cn" else [4]
        return [(args.family, n, build_family(args.family, n, eps=args.eps)[0]) for n in (args.n or default)]
    return [(args.family, None, build_family(args.family, seed=args.seed)[0])]


def cmd_analyze(args) -> int:
    cfg = _config(args, "analyze")
    results = [analyze_curve(C, cfg, family, n) for family, n, C in _targets(args)]
    bws = [r.boundary_width_est for r in results]
    dominance = all(r.width_est >= r.boundary_width_est - 1e-9 for r in results)
    if args.format == "csv":
        emit(dump_csv([r.row() for r in results]), args.out)
    else:
        emit(dump_json({
            "config": cfg.to_json(),
            "results": [r.to_json() for r in results],
            "bound_M": 2.0 * bws[0],
            "below_bound": bool(all(b <= 2.0 * bws[0] for b in bws)),
            "width_dominates": dominance,
        }), args.out)
    return EXIT_OK if dominance else EXIT_VERIFY


def cmd_probe(args) -> int:
    cfg = _config(args, "probe")
    if args.maps:
        maps = load_maps(args.maps)
    elif args.zoom_translate:
        maps = zoom_translate_family()
    else:
        raise InputError("probe needs a maps file or --zoom-translate")
    out = []
    for family, n, C in _targets(args):
        rep = probe(C, maps, cfg, with_width=args.with_width)
        item = rep.to_json()
        item.update({"family": family, "n": n})
        out.append(item)
    emit(dump_json({"config": cfg.to_json(), "probes": out}), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = verify_constants(args.tol)
    lines = (f"cosh^-1(sqrt 2) = {rep.triangle.distance:.9f}\n"
             f"sinh^-1(sqrt 2) = {rep.square.distance:.9f}\n"
             f"{'ok' if rep.ok else 'FAILED: ' + ', '.join(rep.failures)}\n")
    if args.format == "json":
        sys.stderr.write(lines)
        emit(dump_json(rep.to_json()), args.out)
    else:
        emit(lines, args.out)
    return EXIT_OK if rep.ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--samples", type=int, default=2000, help="curve samples N")
    common.add_argument("--face-samples", type=int, default=5, help="samples per face M")
    common.add_argument("--refine", type=int, default=2, help="path-metric refinement level")
    common.add_argument("--eps", type=float, default=0.2, help="bigon angle for the C_n certificate")
    common.add_argument("--tol", type=float, default=1e-9, help="verification tolerance")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    def family_args(p, required_seed):
        p.add_argument("curve", nargs="?", help="curve JSON file")
        p.add_argument("--family", choices=GEN_FAMILIES[:-1])
        p.add_argument("--n", type=int, nargs="+", help="family index (several for a sweep)")
        p.add_argument("--nmax", type=int, nargs="+", help="surgeries in D (several for a sweep)")
        p.add_argument("--seed", type=int, required=required_seed)

    parser = _Parser(prog="quasiwidth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="write a curve JSON file")
    g.add_argument("family", choices=GEN_FAMILIES)
    g.add_argument("--n", type=int, nargs=1)
    g.add_argument("--nmax", type=int, nargs=1)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--curve", help="input file for the custom family (planar schema accepted)")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", parents=[common], help="widths, turning constant and QI fit")
    family_args(a, True)
    a.set_defaults(func=cmd_analyze)

    p = sub.add_parser("probe", parents=[common], help="recompute estimates on Mobius images")
    family_args(p, True)
    p.add_argument("--maps", help="JSON file of Mobius matrices")
    p.add_argument("--zoom-translate", action="store_true", help="use the built-in zoom/translate family")
    p.add_argument("--with-width", action="store_true", help="also estimate the width (slower)")
    p.set_defaults(func=cmd_probe)

    v = sub.add_parser("verify", parents=[common], help="recompute the two sharp constants")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.samples < 16 or args.face_samples < 1 or args.refine < 0:
        sys.stderr.write("quasiwidth: error: counts below their minimum\n")
        return EXIT_INPUT
    try:
        return args.func(args)
    except ConstructionError as exc:
        sys.stderr.write(f"quasiwidth: certificate failure: {exc}\n")
        return EXIT_CERT
    except (HullError, ClassificationError, PathMetricError) as exc:
        sys.stderr.write(f"quasiwidth: verification failure: {exc}\n")
        return EXIT_VERIFY
    except (InputError, CurveError, ValueError) as exc:
        sys.stderr.write(f"quasiwidth: invalid input: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
