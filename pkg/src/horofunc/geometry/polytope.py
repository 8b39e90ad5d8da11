"""Exact V/H polytopes: hulls, vertex enumeration, polarity, faces, extreme sets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .._rational import (
    Vec,
    affine_rank,
    as_float_array,
    dot,
    primitive_int,
    row_reduce,
    sub,
    to_fraction,
    vec,
)
from .dd import extreme_rays


class GeometryError(ValueError):
    """Invalid geometric input (empty set, unbounded region, origin on the boundary...)."""


Halfspace = tuple  # (normal: Vec, offset: Fraction) meaning <normal, x> <= offset


def _canonical_halfspace(normal: Sequence, offset) -> Halfspace:
    ints = primitive_int(list(normal) + [offset])
    return tuple(Fraction(v) for v in ints[:-1]), Fraction(ints[-1])


@dataclass(frozen=True, eq=False)
class Polytope:
    """A bounded convex polytope carrying both representations.

    ``facets`` are halfspaces ``<normal, x> <= offset``; ``equations`` are the
    hyperplanes ``<normal, x> = offset`` cutting out the affine hull (empty when
    the polytope is full-dimensional). ``incidence[i]`` is the set of vertex
    indices lying on facet ``i``.
    """

    dimension: int
    vertices: tuple
    facets: tuple = ()
    incidence: tuple = ()
    equations: tuple = ()
    dim: int = field(default=-1)

    def __post_init__(self):
        if not self.vertices:
            raise GeometryError("empty point set")
        if self.dim < 0:
            object.__setattr__(self, "dim", affine_rank(list(self.vertices)))

    @property
    def is_full_dimensional(self) -> bool:
        return self.dim == self.dimension

    @cached_property
    def vertex_array(self) -> np.ndarray:
        return as_float_array(self.vertices)

    @cached_property
    def facet_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.facets:
            return np.zeros((0, self.dimension)), np.zeros(0)
        return (as_float_array([a for a, _ in self.facets]),
                np.array([float(b) for _, b in self.facets]))

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def contains(self, point: Sequence) -> bool:
        """Exact membership test."""
        x = vec(point)
        if len(x) != self.dimension:
            raise GeometryError("dimension mismatch")
        if any(dot(a, x) != b for a, b in self.equations):
            return False
        return all(dot(a, x) <= b for a, b in self.facets)

    def contains_float(self, points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        ok = np.ones(len(pts), dtype=bool)
        A, b = self.facet_arrays
        if len(b):
            ok &= np.all(pts @ A.T <= b + tol * (1 + np.abs(b)), axis=1)
        for a, c in self.equations:
            av = np.array([float(t) for t in a])
            ok &= np.abs(pts @ av - float(c)) <= tol * (1 + abs(float(c)))
        return ok

    def tight_facets(self, point: Sequence) -> frozenset:
        x = vec(point)
        return frozenset(i for i, (a, b) in enumerate(self.facets) if dot(a, x) == b)

    def __repr__(self) -> str:
        return (f"Polytope(dimension={self.dimension}, dim={self.dim}, "
                f"vertices={len(self.vertices)}, facets={len(self.facets)})")


# ---------------------------------------------------------------------------
# vertex / facet enumeration

def vertex_enumeration(normals: Sequence[Sequence], offsets: Sequence) -> list[Vec]:
    """Vertices of the bounded H-polytope ``{x : <a_i, x> <= b_i}``.

    Raises ``GeometryError`` for unbounded or empty regions.
    """
    normals = [vec(a) for a in normals]
    offsets = [to_fraction(b) for b in offsets]
    if not normals:
        raise GeometryError("unbounded region: no constraints")
    d = len(normals[0])
    rows = [primitive_int([b] + [-x for x in a]) for a, b in zip(normals, offsets)]
    rows.append(tuple([1] + [0] * d))
    try:
        rays = extreme_rays(rows)
    except ValueError as exc:
        raise GeometryError("unbounded region") from exc
    verts = []
    for r in rays:
        if r[0] == 0:
            raise GeometryError("unbounded region")
        t = Fraction(r[0])
        verts.append(tuple(Fraction(v) / t for v in r[1:]))
    if not verts:
        raise GeometryError("empty region")
    return sorted(set(verts))


def _affine_frame(points: list[Vec]):
    """Equations of the affine hull and pivot coordinates parameterising it."""
    p0 = points[0]
    dirs = [sub(p, p0) for p in points[1:]]
    red, piv = row_reduce(dirs) if dirs else ([], [])
    d = len(p0)
    # equations: orthogonal complement of the direction space
    eqs = []
    free = [c for c in range(d) if c not in piv]
    for c in free:
        normal = [Fraction(0)] * d
        normal[c] = Fraction(1)
        for r, pc in zip(red, piv):
            normal[pc] = -r[c]
        normal = tuple(normal)
        eqs.append(_canonical_halfspace(normal, dot(normal, p0)))
    return eqs, piv


def convex_hull(points: Iterable[Sequence]) -> Polytope:
    """Exact convex hull with irredundant vertex and facet lists.

    Lower-dimensional hulls carry the equations of their affine hull; their
    facets are ambient halfspaces that cut out the relative facets inside it.
    """
    pts = sorted({vec(p) for p in points})
    if not pts:
        raise GeometryError("empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise GeometryError("points have mixed dimensions")
    if len(pts) == 1:
        return Polytope(d, tuple(pts), (), (), tuple(_affine_frame(pts)[0]), 0)
    eqs, piv = _affine_frame(pts)
    k = len(piv)
    proj = [tuple(p[c] for c in piv) for p in pts]
    # interior point of the projected hull: centroid of an affinely independent subset
    basis = [proj[0]]
    for p in proj[1:]:
        if affine_rank(basis + [p]) == len(basis):
            basis.append(p)
        if len(basis) == k + 1:
            break
    centre = tuple(sum(c) / len(basis) for c in zip(*basis))
    shifted = [sub(p, centre) for p in proj]
    polar_verts = vertex_enumeration(shifted, [Fraction(1)] * len(shifted))
    facets = []
    for a in polar_verts:
        normal = [Fraction(0)] * d
        for c, val in zip(piv, a):
            normal[c] = val
        facets.append(_canonical_halfspace(normal, 1 + dot(a, centre)))
    facets = sorted(set(facets))
    return _from_halfspaces(d, pts, facets, eqs, k)


def _homogeneous(p: Vec) -> tuple[tuple[int, ...], int]:
    den = 1
    for x in p:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return tuple(int(x * den) for x in p), den


def _int_halfspaces(facets) -> list[tuple[tuple[int, ...], int]]:
    return [(tuple(int(x) for x in a), int(b)) for a, b in facets]


def _tight_sets(points: list[Vec], facets) -> list[frozenset]:
    """Exact facet incidences; facets are in primitive integer form."""
    ifac = _int_halfspaces(facets)
    out = []
    for p in points:
        num, den = _homogeneous(p)
        out.append(frozenset(i for i, (a, b) in enumerate(ifac)
                             if sum(x * y for x, y in zip(a, num)) == b * den))
    return out


def _from_halfspaces(d: int, candidates: list[Vec], facets: list, eqs: list, k: int) -> Polytope:
    tight = _tight_sets(candidates, facets)
    chosen = {}
    for p, t in zip(candidates, tight):
        if len(t) < k:
            continue
        if k == 0 or _rank_of_normals(facets, t) == k:
            chosen[p] = t
    verts = sorted(chosen)
    incidence = [set() for _ in facets]
    for j, v in enumerate(verts):
        for i in chosen[v]:
            incidence[i].add(j)
    return Polytope(d, tuple(verts), tuple(facets), tuple(frozenset(s) for s in incidence),
                    tuple(eqs), k)


def _rank_of_normals(facets, idx) -> int:
    from .._rational import rank
    return rank([facets[i][0] for i in sorted(idx)])


def from_hrep(normals: Sequence[Sequence], offsets: Sequence) -> Polytope:
    """Full-dimensional polytope from an H-representation (redundancy removed)."""
    verts = vertex_enumeration(normals, offsets)
    hull = convex_hull(verts)
    if not hull.is_full_dimensional:
        raise GeometryError("H-representation is not full-dimensional")
    return hull


def polar(ball: Polytope) -> Polytope:
    """Polar body ``{y : <y, x> >= -1 for all x in ball}``.

    Requires the origin in the interior. Vertices of the polar are the points
    ``-a/b`` of the facets ``<a, x> <= b``; facets are ``<-v, y> <= 1`` for
    vertices ``v``; incidences transpose.
    """
    if not ball.is_full_dimensional or any(b <= 0 for _, b in ball.facets):
        raise GeometryError("origin not interior")
    new_vertices = [tuple(-x / b for x in a) for a, b in ball.facets]
    order = sorted(range(len(new_vertices)), key=lambda i: new_vertices[i])
    new_vertices = [new_vertices[i] for i in order]
    rank_of = {old: new for new, old in enumerate(order)}
    facets = [_canonical_halfspace(tuple(-x for x in v), Fraction(1)) for v in ball.vertices]
    forder = sorted(range(len(facets)), key=lambda i: facets[i])
    new_facets = [facets[i] for i in forder]
    incidence = []
    for vi in forder:
        incidence.append(frozenset(rank_of[fi] for fi, inc in enumerate(ball.incidence) if vi in inc))
    return Polytope(ball.dimension, tuple(new_vertices), tuple(new_facets), tuple(incidence), (),
                    ball.dimension)
