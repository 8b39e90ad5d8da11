"""Command-line front end: ``horofunc <subcommand> [options]``.

Exit codes: 0 success, 2 input error, 3 verification failure, 4 inconclusive.
"""
from __future__ import annotations

import argparse
import io as _stdio
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import examples, io
from .convexfn import ConvexFnError, MaxAffine, uniform_distance
from .expressions import ExpressionError, parse_function
from .geometry import GeometryError, enumerate_faces
from .horoboundary import (
    HoroError,
    HoroEvidence,
    build_almost_geodesic,
    busemann_point,
    check_extreme_closure,
    identify_horofunction,
    limit_along_ray,
    verify_almost_geodesic,
    verify_min_decomposition,
)
from .normedspace import NormedSpace, PhiFunction, realize_ball

EXIT_OK, EXIT_INPUT, EXIT_VERIFY, EXIT_INCONCLUSIVE = 0, 2, 3, 4


class InputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration


def load_space(args) -> NormedSpace:
    if bool(args.ball) == bool(args.builtin):
        raise InputError("give exactly one of --ball and --builtin")
    if args.ball:
        spec = io.ballspec_from_json(io.load_json(args.ball))
        if args.m is not None:
            spec = spec.with_discretization(args.m)
        return realize_ball(spec, name=Path(args.ball).stem)
    name = args.builtin
    m = args.m if args.m is not None else 64
    if name.startswith("euclid-"):
        try:
            m = int(name.split("-", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad builtin {name!r}") from exc
        name = "euclid"
    if name in ("example2", "example3", "euclid"):
        return examples.BUILTINS[name](m)
    if name in ("linf", "l1"):
        return examples.BUILTINS[name](args.dim)
    raise InputError(f"unknown builtin {args.builtin!r}")


def parse_vector(text: str, d: int) -> tuple:
    parts = [t for t in text.replace(" ", "").split(",") if t]
    if len(parts) != d:
        raise InputError(f"expected {d} comma-separated coordinates, got {text!r}")
    return io._vector(parts)


def make_probe(space: NormedSpace, args):
    return space.probe(radius=args.radius, density=args.density, seed=args.seed)


class Output:
    """Collects named documents; writes them to ``--out`` or to stdout."""

    def __init__(self, args):
        self.out = Path(args.out) if args.out else None
        self.format = args.format
        self.gnuplot = args.gnuplot
        self.docs: dict = {}
        self.tables: dict = {}

    def add(self, name: str, doc) -> None:
        self.docs[name] = doc

    def table(self, name: str, header: list[str], rows: np.ndarray) -> None:
        self.tables[name] = (header, np.atleast_2d(rows))

    @staticmethod
    def _table_text(header, rows, gnuplot: bool) -> str:
        buf = _stdio.StringIO()
        if gnuplot:
            buf.write("# " + " ".join(header) + "\n")
            np.savetxt(buf, rows, fmt="%.17g", delimiter=" ")
        else:
            buf.write(",".join(header) + "\n")
            np.savetxt(buf, rows, fmt="%.17g", delimiter=",")
        return buf.getvalue()

    def flush(self) -> None:
        if self.out is not None:
            self.out.mkdir(parents=True, exist_ok=True)
            for name, doc in self.docs.items():
                (self.out / f"{name}.json").write_text(io.dumps(doc))
            for name, (header, rows) in self.tables.items():
                ext = "dat" if self.gnuplot else "csv"
                (self.out / f"{name}.{ext}").write_text(self._table_text(header, rows, self.gnuplot))
            return
        if (self.format == "csv" or self.gnuplot) and self.tables:
            for header, rows in self.tables.values():
                sys.stdout.write(self._table_text(header, rows, self.gnuplot))
            return
        doc = next(iter(self.docs.values())) if len(self.docs) == 1 else self.docs
        sys.stdout.write(io.dumps(doc))


# ---------------------------------------------------------------------------
# subcommands


def cmd_dual_ball(args, out: Output) -> int:
    space = load_space(args)
    out.add("B", io.polytope_to_json(space.ball))
    out.add("Bdual", io.polytope_to_json(space.dual))
    return EXIT_OK


def cmd_faces(args, out: Output) -> int:
    space = load_space(args)
    faces = enumerate_faces(space.dual)
    by_dim = Counter(F.dim for F in faces)
    out.add("faces", {"count": len(faces), "by_dim": {str(k): by_dim[k] for k in sorted(by_dim)},
                      "faces": [io.face_to_json(F) for F in faces]})
    return EXIT_OK


def _evidence_for(space: NormedSpace, f: MaxAffine, probe) -> HoroEvidence | None:
    family = space.family
    if family is None or not hasattr(family, "evidence"):
        return None
    ev = family.evidence()
    if uniform_distance(f, ev["target"], probe) > 1e-9:
        return None
    return HoroEvidence(tuple(ev["approximants"]), ev["decomposition"])


def cmd_classify(args, out: Output) -> int:
    space = load_space(args)
    probe = make_probe(space, args)
    pairs = space.sample_pairs(args.pairs, radius=args.radius, seed=args.seed)
    if bool(args.function) == bool(args.direction):
        raise InputError("give exactly one of --function and --direction")
    if args.direction:
        ray = limit_along_ray(space, parse_vector(args.direction, space.dimension), probe=probe)
        out.add("ray", {"report": ray.report, "converged": ray.converged,
                        "residuals": list(ray.residuals)})
        if not ray.converged or not isinstance(ray.limit, MaxAffine):
            out.add("classification", {"kind": "undetermined", "reason": ray.report})
            return EXIT_INCONCLUSIVE
        f = ray.limit
    else:
        f = parse_function(args.function, space.dimension)
    evidence = _evidence_for(space, f, probe)
    c = identify_horofunction(space, f, evidence, probe=probe, pairs=pairs)
    out.add("classification", io.classification_to_json(c))
    if c.certificate is not None and not c.certificate.valid:
        return EXIT_VERIFY
    if c.kind in ("undetermined", "not-busemann-undetermined"):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _select_face(space: NormedSpace, args):
    if args.face is not None:
        faces = enumerate_faces(space.dual)
        if not 0 <= args.face < len(faces):
            raise InputError(f"face index out of range (0..{len(faces) - 1})")
        return faces[args.face]
    if args.point:
        return [parse_vector(t, space.dimension) for t in args.point]
    raise InputError("give --face INDEX or --point COORDS")


def cmd_almost_geodesic(args, out: Output) -> int:
    space = load_space(args)
    E = _select_face(space, args)
    p = parse_vector(args.p, space.dimension) if args.p else (0,) * space.dimension
    normal = [float(x) for x in parse_vector(args.normal, space.dimension)] if args.normal else None
    ag = build_almost_geodesic(space, E, p, args.n, maximal=args.maximal, seed=args.seed, normal=normal)
    rep = verify_almost_geodesic(space, ag, seed=args.seed)
    probe = make_probe(space, args)
    dist = uniform_distance(PhiFunction(space, ag.points[-1]), busemann_point(ag.target), probe)
    out.add("almost_geodesic", io.almost_geodesic_to_json(ag))
    out.add("verification", dict(rep.to_json(), probe_distance=dist))
    lam = np.array(ag.lambdas[-1])
    rows = np.column_stack([np.arange(len(lam)), lam, np.concatenate([[0.0], rep.prefix_slack])])
    out.table("schedule", ["n", "lambda", "slack"], rows)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_check_closure(args, out: Output) -> int:
    space = load_space(args)
    r = check_extreme_closure(space)
    out.add("closure", io.closure_report_to_json(r))
    return EXIT_INCONCLUSIVE if r.verdict == "inconclusive" else EXIT_OK


def cmd_limit_ray(args, out: Output) -> int:
    space = load_space(args)
    probe = make_probe(space, args)
    ray = limit_along_ray(space, parse_vector(args.direction, space.dimension), probe=probe)
    doc = {"report": ray.report, "converged": ray.converged, "radii": list(ray.radii),
           "residuals": list(ray.residuals), "tolerance": ray.tolerance}
    if ray.face is not None:
        doc["E"] = io.extreme_set_to_json(ray.face)
    if isinstance(ray.limit, MaxAffine):
        doc["limit"] = io.max_affine_to_json(ray.limit)
    out.add("ray", doc)
    header = [f"x{i + 1}" for i in range(space.dimension)] + ["f"]
    out.table("probe", header, np.column_stack([probe.samples, ray.values]))
    return EXIT_OK if ray.converged else EXIT_INCONCLUSIVE


def cmd_verify_min(args, out: Output) -> int:
    space = load_space(args)
    probe = make_probe(space, args)
    pairs = space.sample_pairs(args.pairs, radius=args.radius, seed=args.seed)
    if args.function:
        if not (args.f1 and args.f2):
            raise InputError("--function needs --f1 and --f2")
        f, f1, f2 = (parse_function(t, space.dimension) for t in (args.function, args.f1, args.f2))
    else:
        if space.family is None:
            raise InputError("give --function, --f1 and --f2")
        ev = space.family.evidence()
        f, (f1, f2) = ev["target"], ev["decomposition"]
    cert = verify_min_decomposition(space, f, f1, f2, probe, pairs)
    out.add("certificate", cert.to_json())
    return EXIT_OK if cert.valid else EXIT_VERIFY


COMMANDS = {
    "dual-ball": cmd_dual_ball,
    "faces": cmd_faces,
    "classify": cmd_classify,
    "almost-geodesic": cmd_almost_geodesic,
    "check-closure": cmd_check_closure,
    "limit-ray": cmd_limit_ray,
    "verify-min": cmd_verify_min,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ball", help="BallSpec JSON file")
    common.add_argument("--builtin", help="example2, example3, linf, l1, euclid or euclid-M")
    common.add_argument("--dim", type=int, default=2, help="dimension for linf/l1 (default 2)")
    common.add_argument("--m", type=int, default=None, help="circle discretization (default 64)")
    common.add_argument("--radius", type=float, default=2.0, help="probe radius (default 2)")
    common.add_argument("--density", type=int, default=None, help="probe grid points per axis")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output directory (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--gnuplot", action="store_true", help="emit tables as plain columns")

    parser = argparse.ArgumentParser(prog="horofunc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dual-ball", parents=[common], help="emit the ball and its dual")
    sub.add_parser("faces", parents=[common], help="face lattice of the dual ball")
    p = sub.add_parser("classify", parents=[common], help="classify a function or a ray limit")
    p.add_argument("--function", help='max-affine expression, e.g. "max(x - w, x + w)"')
    p.add_argument("--direction", help="comma-separated direction of a ray")
    p.add_argument("--pairs", type=int, default=10_000, help="sampled pairs for Lipschitz checks")
    p = sub.add_parser("almost-geodesic", parents=[common], help="build and verify an almost-geodesic")
    p.add_argument("--face", type=int, help="index into the face list of `faces`")
    p.add_argument("--point", action="append", help="extreme point (repeatable)")
    p.add_argument("--normal", help="exposing direction for closed-form spaces")
    p.add_argument("--p", help="base point p (default 0)")
    p.add_argument("--n", type=int, default=2000, help="number of points")
    p.add_argument("--maximal", action="store_true", help="descend one dimension per step")
    sub.add_parser("check-closure", parents=[common], help="closure test for extreme sets")
    p = sub.add_parser("limit-ray", parents=[common], help="limit of distance functions along a ray")
    p.add_argument("--direction", required=True)
    p = sub.add_parser("verify-min", parents=[common], help="check a minimum decomposition")
    p.add_argument("--function")
    p.add_argument("--f1")
    p.add_argument("--f2")
    p.add_argument("--pairs", type=int, default=10_000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args)
    try:
        code = COMMANDS[args.command](args, out)
    except (InputError, io.FormatError, GeometryError, HoroError, ConvexFnError, ExpressionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
