"""Balls, gauges (possibly asymmetric norms), metrics and the distance functions
``phi_z(x) = ||z - x|| - ||z||``.

Sign convention: the dual ball is ``{y : <y, x> >= -1 for x in B}`` and the
gauge is ``||z|| = max_{y in dual} -<y, z>``. Distances are oriented,
``d(x, y) = ||y - x||``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from ._rational import Vec, dot, to_fraction, vec
from .convexfn import AffineOnPolytope, FnGridProbe, MaxAffine, grid_probe
from .geometry import Face, GeometryError, Polytope, convex_hull, polar
from .lp import linprog_exact

# ---------------------------------------------------------------------------
# ball specifications


@dataclass(frozen=True)
class CirclePiece:
    center: Vec
    axis1: Vec
    axis2: Vec
    radius: Fraction

    def to_json(self) -> dict:
        from .io import scalar_list, scalar_str
        return {"kind": "circle", "center": scalar_list(self.center), "axis1": scalar_list(self.axis1),
                "axis2": scalar_list(self.axis2), "radius": scalar_str(self.radius)}


@dataclass(frozen=True)
class PointsPiece:
    points: tuple

    def to_json(self) -> dict:
        from .io import scalar_list
        return {"kind": "points", "points": [scalar_list(p) for p in self.points]}


BALL_KINDS = ("vpolytope", "hull", "hpolytope-intersection")


@dataclass(frozen=True)
class BallSpec:
    """Description of a unit ball (or, with ``dual_side``, of its dual ball).

    ``hpolytope-intersection`` reads every piece as a family of constraint
    normals ``q`` with ``<q, x> >= -1``; circles then become tangent
    half-spaces, i.e. the primal ball circumscribes the smooth body.
    ``circle_mode`` "inner" puts polygon vertices on the circle, "outer" makes
    the polygon circumscribe it.
    """

    dimension: int
    kind: str
    pieces: tuple
    dual_side: bool = False
    discretization: int = 64
    circle_mode: str = "inner"

    def __post_init__(self):
        if self.kind not in BALL_KINDS:
            raise GeometryError(f"unknown ball kind {self.kind!r}")
        if self.circle_mode not in ("inner", "outer"):
            raise GeometryError(f"unknown circle mode {self.circle_mode!r}")
        if self.discretization < 3:
            raise GeometryError("circle discretization needs at least 3 points")

    @property
    def has_smooth_pieces(self) -> bool:
        return any(isinstance(p, CirclePiece) for p in self.pieces)

    def with_discretization(self, m: int) -> "BallSpec":
        return BallSpec(self.dimension, self.kind, self.pieces, self.dual_side, m, self.circle_mode)


def rational_unit_vector(theta: float, max_den: int = 10_000) -> tuple[Fraction, Fraction]:
    """A rational point exactly on the unit circle near angle ``theta``.

    Uses ``((1 - t^2)/(1 + t^2), 2t/(1 + t^2))`` with ``t`` a rational
    approximation of ``tan`` of the half angle. Angles are first folded into
    ``[0, pi/4]`` by axis and diagonal reflections, so the discretization is
    exactly symmetric under the coordinate reflections (a rational point can
    never lie on the diagonal itself).
    """
    theta = math.fmod(theta, 2 * math.pi)
    if theta < 0:
        theta += 2 * math.pi
    eps = 1e-12
    sx = sy = 1
    if theta > math.pi + eps:
        theta, sy = 2 * math.pi - theta, -1
    if theta > math.pi / 2 + eps:
        theta, sx = math.pi - theta, -1
    theta = min(max(theta, 0.0), math.pi / 2)
    swap = theta > math.pi / 4 + eps
    beta = math.pi / 2 - theta if swap else theta
    t = Fraction(math.tan(max(beta, 0.0) / 2)).limit_denominator(max_den)
    c = (1 - t * t) / (1 + t * t)
    s = 2 * t / (1 + t * t)
    if swap:
        c, s = s, c
    return sx * c, sy * s


def discretize_circle(piece: CirclePiece, m: int, mode: str = "inner") -> list[Vec]:
    scale_r = piece.radius
    if mode == "outer":
        scale_r = scale_r * Fraction(1 / math.cos(math.pi / m))
    out = []
    for k in range(m):
        c, s = rational_unit_vector(2 * math.pi * k / m)
        out.append(tuple(o + scale_r * (c * a + s * b)
                         for o, a, b in zip(piece.center, piece.axis1, piece.axis2)))
    return out


def spec_points(spec: BallSpec) -> list[Vec]:
    pts: list[Vec] = []
    for piece in spec.pieces:
        if isinstance(piece, CirclePiece):
            pts.extend(discretize_circle(piece, spec.discretization, spec.circle_mode))
        else:
            pts.extend(piece.points)
    if not pts:
        raise GeometryError("empty point set")
    if any(len(p) != spec.dimension for p in pts):
        raise GeometryError("piece dimension does not match the ball dimension")
    return pts


# ---------------------------------------------------------------------------
# the normed space


def default_density(dimension: int) -> int:
    """33 grid points per axis up to dimension 3, then about 33^3 grid points in total."""
    if dimension <= 3:
        return 33
    return max(3, int(round(33 ** (3 / dimension))))


class NormedSpace:
    """A finite-dimensional space normed by a polytope ball ``B`` and its polar.

    ``family`` optionally carries a closed-form description of a smooth body
    (built-in examples); its gauge then replaces the polytope gauge for
    analytic evaluation while ``ball``/``dual`` remain the discretized bodies.
    Polytopes may be supplied lazily through ``realize``.
    """

    def __init__(self, ball: Polytope | None = None, dual: Polytope | None = None, *,
                 realize: Callable[[], tuple[Polytope, Polytope]] | None = None,
                 dimension: int | None = None, family=None, spec: BallSpec | None = None,
                 name: str = ""):
        if ball is None and realize is None:
            raise GeometryError("a ball or a realization is required")
        self._ball, self._dual, self._realize = ball, dual, realize
        self.dimension = dimension if dimension is not None else ball.dimension
        self.family = family
        self.spec = spec
        self.name = name

    def _ensure(self) -> None:
        if self._ball is None:
            self._ball, self._dual = self._realize()
        if self._dual is None:
            self._dual = polar(self._ball)

    @property
    def ball(self) -> Polytope:
        self._ensure()
        return self._ball

    @property
    def dual(self) -> Polytope:
        self._ensure()
        return self._dual

    @property
    def is_polyhedral(self) -> bool:
        return self.family is None

    def __repr__(self) -> str:
        return f"NormedSpace({self.name or 'anonymous'}, dimension={self.dimension})"

    # gauges ---------------------------------------------------------------

    def gauge(self, z):
        """Float gauge, vectorised over rows of ``z``."""
        if self.family is not None:
            return self.family.gauge(z)
        return self.polytope_gauge(z)

    def polytope_gauge(self, z):
        pts = np.asarray(z, dtype=float)
        single = pts.ndim == 1
        vals = np.max(-(np.atleast_2d(pts) @ self.dual.vertex_array.T), axis=1)
        return float(vals[0]) if single else vals

    def gauge_exact(self, z: Sequence) -> Fraction:
        z = vec(z)
        return max(-dot(y, z) for y in self.dual.vertices)

    def primal_gauge(self, z: Sequence) -> Fraction:
        """``min {t >= 0 : z in tB}`` from the facets ``<a, x> <= b`` of ``B``."""
        z = vec(z)
        return max([Fraction(0)] + [dot(a, z) / b for a, b in self.ball.facets])

    def lp_gauge(self, z: Sequence) -> Fraction:
        """Gauge by exact LP: ``min sum mu`` with ``z = sum mu_j v_j``, ``mu >= 0``."""
        z = vec(z)
        verts = self.ball.vertices
        A = [[v[k] for v in verts] for k in range(self.dimension)]
        res = linprog_exact([1] * len(verts), A, list(z))
        if res.status != "optimal":
            raise GeometryError("gauge LP failed; origin may not be interior")
        return res.value

    def metric(self, x, y):
        """Oriented distance ``d(x, y) = ||y - x||``."""
        return self.gauge(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))

    # sampling -------------------------------------------------------------

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.family is not None:
            return self.family.box
        V = self.ball.vertex_array
        return V.min(axis=0), V.max(axis=0)

    def probe(self, radius: float = 2.0, density: int | None = None, n_random: int = 1000,
              seed: int = 0) -> FnGridProbe:
        """Probe of the gauge ball; ``density`` defaults to :func:`default_density`."""
        if density is None:
            density = default_density(self.dimension)
        return grid_probe(self.gauge, self.bounding_box(), radius, density, n_random, seed)

    def sample_points(self, n: int, radius: float = 2.0, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        lo, hi = (b * radius for b in self.bounding_box())
        out = []
        count = 0
        while count < n:
            batch = rng.uniform(lo, hi, size=(max(64, 2 * n), self.dimension))
            batch = batch[self.gauge(batch) <= radius]
            out.append(batch[: n - count])
            count += len(out[-1])
        return np.vstack(out)

    def sample_pairs(self, n: int, radius: float = 2.0, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
        pts = self.sample_points(2 * n, radius, seed)
        return pts[:n], pts[n:]


def realize_ball(spec: BallSpec, name: str = "", family=None) -> NormedSpace:
    """Build ``B`` and its dual from a :class:`BallSpec`."""
    pts = spec_points(spec)
    hull = convex_hull(pts)
    if not hull.is_full_dimensional:
        raise GeometryError("degenerate pieces: hull is not full-dimensional")
    if spec.kind == "hpolytope-intersection" or spec.dual_side:
        dual = hull
        ball = polar(dual)
    else:
        ball = hull
        dual = polar(ball)
    return NormedSpace(ball, dual, spec=spec, family=family, name=name)


def support_neg(C, p, exact: bool = False):
    """``|p|_C = -min_{q in C} <q, p>`` for a polytope, face or vertex list ``C``."""
    if isinstance(C, Face):
        verts = C.points
    elif isinstance(C, Polytope):
        verts = C.vertices
    else:
        verts = [vec(q) for q in C]
    if not verts:
        raise GeometryError("empty set")
    if exact:
        p = vec(p)
        return max(-dot(q, p) for q in verts)
    V = np.array([[float(x) for x in q] for q in verts])
    pts = np.asarray(p, dtype=float)
    vals = np.max(-(np.atleast_2d(pts) @ V.T), axis=1)
    return float(vals[0]) if pts.ndim == 1 else vals


class PhiFunction:
    """``x -> ||z - x|| - ||z||``.

    On polyhedral spaces this is evaluated as ``max_v (<v, x> - s_v)`` over
    dual vertices with the shifts ``s_v = <v, z> + ||z||`` computed exactly,
    which keeps far base points free of cancellation.
    """

    def __init__(self, space: NormedSpace, z: Sequence):
        self.space = space
        self.z = vec(z)

    @cached_property
    def _shifts(self) -> tuple[Fraction, ...]:
        n = self.space.gauge_exact(self.z)
        return tuple(dot(v, self.z) + n for v in self.space.dual.vertices)

    def __call__(self, x):
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        X = np.atleast_2d(pts)
        if self.space.family is not None:
            zf = np.array([float(t) for t in self.z])
            vals = self.space.gauge(zf - X) - self.space.gauge(zf)
        else:
            s = np.array([float(t) for t in self._shifts])
            vals = np.max(X @ self.space.dual.vertex_array.T - s, axis=1)
        return float(vals[0]) if single else vals

    def exact(self, x: Sequence) -> Fraction:
        x = vec(x)
        return max(dot(v, x) - s for v, s in zip(self.space.dual.vertices, self._shifts))

    def to_max_affine(self) -> MaxAffine:
        return MaxAffine(list(zip(self.space.dual.vertices, (-s for s in self._shifts))))


def phi(space: NormedSpace, z: Sequence) -> PhiFunction:
    return PhiFunction(space, z)


def phi_star_closed_form(space: NormedSpace, z: Sequence) -> AffineOnPolytope:
    """``y -> <y, z> + ||z||`` on the dual ball, ``+inf`` elsewhere."""
    return AffineOnPolytope(space.dual, vec(z), space.gauge_exact(z))
