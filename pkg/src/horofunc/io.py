"""JSON (de)serialisation. Scalars are written as exact ``"p/q"`` strings and
accepted as numbers, decimal strings or ``"p/q"`` strings."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from ._rational import fraction_str, to_fraction, vec
from .convexfn import AffineOnPolytope, MaxAffine
from .geometry import Face, GeometryError, Polytope, convex_hull


class FormatError(ValueError):
    pass


def scalar_str(q) -> str:
    return fraction_str(to_fraction(q))


def scalar_list(v) -> list[str]:
    return [scalar_str(x) for x in v]


def _scalar(value) -> Fraction:
    try:
        return to_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad scalar {value!r}") from exc


def _vector(values) -> tuple:
    if not isinstance(values, (list, tuple)):
        raise FormatError(f"expected a list of scalars, got {values!r}")
    return tuple(_scalar(v) for v in values)


def _require(obj: dict, key: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    return obj[key]


# polytopes and faces --------------------------------------------------------

def polytope_to_json(P: Polytope) -> dict:
    return {
        "dimension": P.dimension,
        "vertices": [scalar_list(v) for v in P.vertices],
        "facets": [{"normal": scalar_list(a), "offset": scalar_str(b)} for a, b in P.facets],
    }


def polytope_from_json(obj: dict) -> Polytope:
    d = int(_require(obj, "dimension"))
    verts = [_vector(v) for v in _require(obj, "vertices")]
    if any(len(v) != d for v in verts):
        raise FormatError("vertex dimension does not match")
    return convex_hull(verts)


def face_to_json(F: Face) -> dict:
    return {"tight_facets": list(F.tight_facets), "vertices": list(F.vertices), "dim": F.dim}


def face_from_json(obj: dict, parent: Polytope) -> Face:
    from .geometry import face_containing
    idx = [int(i) for i in _require(obj, "vertices")]
    if not idx or any(i < 0 or i >= len(parent.vertices) for i in idx):
        raise FormatError("face vertex index out of range")
    return face_containing(parent, [parent.vertices[i] for i in idx])


# functions -----------------------------------------------------------------

def max_affine_to_json(f: MaxAffine) -> dict:
    return {"pieces": [{"gradient": scalar_list(g), "offset": scalar_str(c)} for g, c in f.pieces]}


def max_affine_from_json(obj: dict) -> MaxAffine:
    pieces = _require(obj, "pieces")
    return MaxAffine([(_vector(_require(p, "gradient")), _scalar(_require(p, "offset")))
                      for p in pieces])


def affine_on_polytope_to_json(h: AffineOnPolytope) -> dict:
    return {"domain": polytope_to_json(h.domain), "gradient": scalar_list(h.gradient),
            "offset": scalar_str(h.offset)}


def affine_on_polytope_from_json(obj: dict) -> AffineOnPolytope:
    return AffineOnPolytope(polytope_from_json(_require(obj, "domain")),
                            _vector(_require(obj, "gradient")), _scalar(_require(obj, "offset")))


# ball specifications -------------------------------------------------------

def ballspec_to_json(spec) -> dict:
    return {"dimension": spec.dimension, "kind": spec.kind, "dual_side": spec.dual_side,
            "pieces": [p.to_json() for p in spec.pieces], "discretization": spec.discretization,
            "circle_mode": spec.circle_mode}


def ballspec_from_json(obj: dict):
    from .normedspace import BallSpec, CirclePiece, PointsPiece
    d = int(_require(obj, "dimension"))
    pieces = []
    for p in _require(obj, "pieces"):
        kind = _require(p, "kind")
        if kind == "circle":
            piece = CirclePiece(_vector(_require(p, "center")), _vector(_require(p, "axis1")),
                                _vector(_require(p, "axis2")), _scalar(_require(p, "radius")))
            if not (len(piece.center) == len(piece.axis1) == len(piece.axis2) == d):
                raise FormatError("circle dimension does not match")
            pieces.append(piece)
        elif kind == "points":
            pieces.append(PointsPiece(tuple(_vector(q) for q in _require(p, "points"))))
        else:
            raise FormatError(f"unknown piece kind {kind!r}")
    try:
        return BallSpec(d, _require(obj, "kind"), tuple(pieces), bool(obj.get("dual_side", False)),
                        int(obj.get("discretization", 64)), obj.get("circle_mode", "inner"))
    except GeometryError as exc:
        raise FormatError(str(exc)) from exc


# files ---------------------------------------------------------------------

def dumps(obj: Any) -> str:
    """Deterministic JSON text."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


# horoboundary objects ------------------------------------------------------

def extreme_set_to_json(E) -> dict:
    """Faces of a polytope use index form; closed-form extreme sets list their points."""
    if isinstance(E, Face):
        return face_to_json(E)
    return {"points": [scalar_list(p) for p in E.points], "dim": E.dim}


def _float_points(points) -> list:
    return [[scalar_str(float(x)) for x in p] for p in points]


def classification_to_json(c) -> dict:
    out = {"kind": c.kind, "reason": c.reason,
           "domain": [scalar_list(p) for p in c.domain]}
    if c.horodata is not None:
        out["E"] = extreme_set_to_json(c.horodata.E)
        out["p"] = scalar_list(c.horodata.p)
    if c.z is not None:
        out["z"] = scalar_list(c.z)
    if c.distances:
        out["approximant_distances"] = list(c.distances)
    if c.certificate is not None:
        out["certificate"] = c.certificate.to_json()
    return out


def almost_geodesic_to_json(ag) -> dict:
    return {"points": [scalar_list(p) for p in ag.points], "epsilon": ag.epsilon,
            "target": {"E": extreme_set_to_json(ag.target.E), "p": scalar_list(ag.target.p)}}


def closure_report_to_json(r) -> dict:
    out = {"verdict": r.verdict, "reason": r.reason,
           "witness": [{"points": _float_points(f), "dim": int(np.linalg.matrix_rank(f - f[0]))}
                       for f in r.witness]}
    if r.limit is not None:
        out["limit"] = polytope_to_json(convex_hull([tuple(float(x) for x in p) for p in r.limit]))
    if r.details:
        out["details"] = r.details
    return out
