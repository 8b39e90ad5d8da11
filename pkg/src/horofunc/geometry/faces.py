"""Face lattices, extreme-set tests and exposed-face chains for exact polytopes."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .._rational import Vec, dot, rank, vec
from .polytope import GeometryError, Polytope, convex_hull


@dataclass(frozen=True)
class Face:
    """A nonempty face of ``parent``, keyed by the facets tight on it."""

    parent: Polytope = field(compare=False, repr=False)
    tight_facets: tuple
    vertices: tuple
    dim: int

    @property
    def points(self) -> tuple:
        return tuple(self.parent.vertices[i] for i in self.vertices)

    @cached_property
    def point_array(self) -> np.ndarray:
        return self.parent.vertex_array[list(self.vertices)]

    @cached_property
    def polytope(self) -> Polytope:
        return convex_hull(self.points)

    @property
    def is_whole(self) -> bool:
        return len(self.vertices) == len(self.parent.vertices)


@dataclass(frozen=True)
class AffineFunctional:
    """``x -> <gradient, x> + constant``."""

    gradient: Vec
    constant: Fraction

    def __call__(self, x: Sequence):
        return dot(self.gradient, vec(x)) + self.constant


@dataclass(frozen=True)
class ExposedChain:
    """Faces ``F_0 = C ⊋ F_1 ⊋ ... ⊋ F_n = E`` with certificates.

    ``functionals[i]`` vanishes on ``faces[i + 1]`` and is strictly positive on
    the vertices of ``faces[i]`` outside it.
    """

    faces: tuple
    functionals: tuple

    def __len__(self) -> int:
        return len(self.functionals)


def _closure(P: Polytope, vset: frozenset) -> tuple[tuple, frozenset]:
    tight = tuple(i for i, inc in enumerate(P.incidence) if vset <= inc)
    if not tight:
        return (), frozenset(range(len(P.vertices)))
    out = P.incidence[tight[0]]
    for i in tight[1:]:
        out = out & P.incidence[i]
    return tight, out


def _face_dim(P: Polytope, tight: tuple) -> int:
    normals = [a for a, _ in P.equations] + [P.facets[i][0] for i in tight]
    if not normals:
        return P.dimension
    return P.dimension - rank(normals)


def _make_face(P: Polytope, tight: tuple, vset: frozenset) -> Face:
    return Face(P, tight, tuple(sorted(vset)), _face_dim(P, tight))


def enumerate_faces(P: Polytope) -> list[Face]:
    """All nonempty faces of ``P`` (including ``P``), sorted by tight-facet set."""
    nv = len(P.vertices)
    vertex_facets = [[] for _ in range(nv)]
    for i, inc in enumerate(P.incidence):
        for v in inc:
            vertex_facets[v].append(i)
    top_tight, top = _closure(P, frozenset(range(nv)))
    seen = {top: top_tight}
    stack = [(top_tight, top)]
    while stack:
        tight, vset = stack.pop()
        tset = set(tight)
        cand = set()
        for v in vset:
            cand.update(vertex_facets[v])
        for i in cand - tset:
            w = vset & P.incidence[i]
            if not w or w == vset or w in seen:
                continue
            t2, w2 = _closure(P, w)
            if w2 in seen:
                continue
            seen[w2] = t2
            stack.append((t2, w2))
    faces = [_make_face(P, t, v) for v, t in seen.items()]
    faces.sort(key=lambda f: f.tight_facets)
    return faces


def _points_of(E) -> list[Vec]:
    if isinstance(E, Face):
        return list(E.points)
    if isinstance(E, Polytope):
        return list(E.vertices)
    return [vec(p) for p in E]


def face_containing(C: Polytope, E) -> Face:
    """Smallest face of ``C`` containing ``E`` (a Face, Polytope or point list)."""
    pts = _points_of(E)
    if not pts:
        raise GeometryError("empty point set")
    for p in pts:
        if not C.contains(p):
            raise GeometryError("set is not contained in the polytope")
    tight = tuple(i for i, (a, b) in enumerate(C.facets) if all(dot(a, p) == b for p in pts))
    if tight:
        vset = C.incidence[tight[0]]
        for i in tight[1:]:
            vset = vset & C.incidence[i]
    else:
        vset = frozenset(range(len(C.vertices)))
    return _make_face(C, tight, vset)


def is_extreme_set(C: Polytope, E) -> bool:
    """Whether the convex hull of ``E`` is an extreme set of ``C``.

    For polytopes this means it coincides with the smallest face containing
    it; since face vertices are extreme points of ``C`` they must then occur
    among the given points.
    """
    if isinstance(E, Face) and E.parent is C:
        return True
    pts = set(_points_of(E))
    F = face_containing(C, pts)
    return all(v in pts for v in F.points)


def _certificate(C: Polytope, outer: Face, inner: Face) -> AffineFunctional:
    extra = [i for i in inner.tight_facets if i not in set(outer.tight_facets)]
    d = C.dimension
    grad = [Fraction(0)] * d
    const = Fraction(0)
    for i in extra:
        a, b = C.facets[i]
        grad = [g - x for g, x in zip(grad, a)]
        const += b
    return AffineFunctional(tuple(grad), const)


def exposed_face_chain(C: Polytope, E, maximal: bool = False) -> ExposedChain:
    """Chain of exposed faces from ``C`` down to the extreme set ``E``.

    Every face of a polytope is exposed, so by default the chain has a single
    step (none when ``E`` is ``C``). With ``maximal=True`` the chain descends
    one dimension at a time through faces containing ``E``.
    """
    if not is_extreme_set(C, E):
        raise GeometryError("not an extreme set")
    target = face_containing(C, _points_of(E))
    top = face_containing(C, C.vertices)
    faces = [top]
    if target.vertices != top.vertices:
        if maximal:
            current = top
            target_set = set(target.vertices)
            while current.dim > target.dim + 1:
                step = None
                for i in target.tight_facets:
                    if i in current.tight_facets:
                        continue
                    vset = frozenset(current.vertices) & C.incidence[i]
                    tight, vset = _closure(C, vset)
                    if not target_set <= vset:
                        continue
                    cand = _make_face(C, tight, vset)
                    if cand.dim == current.dim - 1:
                        step = cand
                        break
                if step is None:
                    break
                faces.append(step)
                current = step
        faces.append(target)
    functionals = tuple(_certificate(C, a, b) for a, b in zip(faces, faces[1:]))
    return ExposedChain(tuple(faces), functionals)


def verify_chain(chain: ExposedChain) -> bool:
    """Sign checks: each functional is >= 0 on its face and zero exactly on the next."""
    for outer, inner, f in zip(chain.faces, chain.faces[1:], chain.functionals):
        inner_set = set(inner.vertices)
        for idx, p in zip(outer.vertices, outer.points):
            val = f(p)
            if idx in inner_set:
                if val != 0:
                    return False
            elif val <= 0:
                return False
    return True
