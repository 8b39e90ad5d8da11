"""Built-in spaces: the smooth three- and four-dimensional families with their
closed-form gauges and extremality oracles, plus polyhedral test balls."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ._rational import vec
from .convexfn import MaxAffine
from .geometry import convex_hull
from .normedspace import BallSpec, CirclePiece, NormedSpace, PointsPiece, realize_ball

TOL = 1e-9

E1, E2, E3, E4 = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def _rows(z) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=float)
    return np.atleast_2d(arr), arr.ndim == 1


def _out(vals: np.ndarray, single: bool):
    return float(vals[0]) if single else vals


def _unique(points, tol: float = TOL) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for p in np.atleast_2d(np.asarray(points, dtype=float)):
        if all(np.max(np.abs(p - q)) > tol for q in out):
            out.append(p)
    return out


def _in_hull(x: np.ndarray, verts: Sequence[np.ndarray], tol: float = 1e-7) -> bool:
    """Whether ``x`` is a convex combination of a few ``verts`` (least squares)."""
    V = np.array(verts, dtype=float)
    A = np.vstack([V.T, np.ones(len(V))])
    b = np.append(x, 1.0)
    lam, *_ = np.linalg.lstsq(A, b, rcond=None)
    return bool(np.all(lam >= -tol) and np.max(np.abs(A @ lam - b)) <= tol)


@dataclass(frozen=True)
class WitnessSequence:
    """Extreme sets ``E_k`` (as vertex arrays) and the set they converge to."""

    faces: tuple
    limit: np.ndarray
    normals: tuple
    label: str


class SmoothFamily:
    """Interface for a dual ball described in closed form."""

    name: str = ""
    dimension: int = 0

    @property
    def box(self) -> tuple[np.ndarray, np.ndarray]:
        return -np.ones(self.dimension), np.ones(self.dimension)

    def gauge(self, z):
        raise NotImplementedError

    def dual_contains(self, q, tol: float = TOL) -> bool:
        """Support test: ``<q, x> >= -1`` for all ``x`` in ``B``, i.e. ``-<q,x> <= ||x||``."""
        raise NotImplementedError

    def exposed_face(self, u, tol: float = TOL) -> list[np.ndarray] | None:
        """Extreme points of the face where ``<., u>`` is maximal on the dual ball,
        or None when that face contains a whole circle."""
        raise NotImplementedError

    def is_extreme(self, points, tol: float = TOL, normal=None):
        """True / False, or None when the oracle cannot decide."""
        raise NotImplementedError

    def witness(self, count: int = 12) -> WitnessSequence:
        raise NotImplementedError


# ---------------------------------------------------------------------------
# three dimensions: prism intersected with a cylinder


class Example2Family(SmoothFamily):
    """Ball ``{|x| + |z| <= 1, x^2 + y^2 <= 1}``.

    Its dual ball is the hull of the square with corners ``(+-1, 0, +-1)`` and
    the unit circle in the plane ``z = 0``. Its proper faces are listed
    explicitly in :meth:`is_extreme`.
    """

    name = "example2"
    dimension = 3
    corners = tuple(np.array(c, dtype=float) for c in ((-1, 0, -1), (-1, 0, 1), (1, 0, -1), (1, 0, 1)))

    def gauge(self, z):
        Z, single = _rows(z)
        x, y, w = Z[:, 0], Z[:, 1], Z[:, 2]
        return _out(np.maximum(np.abs(x) + np.abs(w), np.hypot(x, y)), single)

    def dual_contains(self, q, tol: float = TOL) -> bool:
        # q = |c| * (a', 0, sign c) + (1 - |c|) * k with |a'| <= 1 and k in the unit disc
        a, b, c = (float(v) for v in q)
        t = abs(c)
        if t > 1 + tol:
            return False
        shift = t * min(max(a / t, -1.0), 1.0) if t > 0 else 0.0
        return math.hypot(a - shift, b) <= max(1 - t, 0.0) + tol

    def is_circle_point(self, q, tol: float = TOL) -> bool:
        return abs(q[2]) <= tol and abs(math.hypot(q[0], q[1]) - 1) <= tol

    def is_extreme_point(self, q, tol: float = TOL) -> bool:
        if any(np.max(np.abs(q - c)) <= tol for c in self.corners):
            return True
        return self.is_circle_point(q, tol) and abs(q[1]) > tol

    def exposed_face(self, u, tol: float = TOL):
        u = np.asarray(u, dtype=float)
        r = math.hypot(u[0], u[1])
        cand = [(float(c @ u), c) for c in self.corners]
        if r > 0:
            q = np.array([u[0] / r, u[1] / r, 0.0])
            cand.append((r, q))
        top = max(v for v, _ in cand)
        if r == 0 and top <= tol:
            return None
        pts = [q for v, q in cand if v >= top - tol]
        return [q for q in pts if self.is_extreme_point(q, tol)]

    def _pair_is_face(self, a: np.ndarray, b: np.ndarray, tol: float) -> bool:
        ca = any(np.max(np.abs(a - c)) <= tol for c in self.corners)
        cb = any(np.max(np.abs(b - c)) <= tol for c in self.corners)
        if ca and cb:
            # edges of the square lying on the boundary: x = const or z = const
            return abs(a[0] - b[0]) <= tol or abs(a[2] - b[2]) <= tol
        if ca or cb:
            circ, corner = (b, a) if ca else (a, b)
            return abs(circ[0]) <= tol or np.sign(circ[0]) == np.sign(corner[0])
        return False

    def is_extreme(self, points, tol: float = TOL, normal=None) -> bool:
        """Exact-structure test for the hull of finitely many points.

        Proper faces: extreme points; segments joining a circle point
        ``(c, s, 0)`` (``s != 0``) to a corner ``(sign c, 0, +-1)`` or, when
        ``c = 0``, to any corner; the edges ``x = +-1`` and ``z = +-1`` of the
        square; and the four triangles ``conv{(-1,0,t), (1,0,t), (0,+-1,0)}``.
        """
        pts = _unique(points, tol)
        if not pts:
            return True
        ext = [q for q in pts if self.is_extreme_point(q, tol)]
        if not ext:
            return False
        if not all(_in_hull(q, ext) for q in pts):
            return False
        if len(ext) == 1:
            return True
        if len(ext) == 2:
            return self._pair_is_face(ext[0], ext[1], tol)
        if len(ext) == 3:
            apex = [q for q in ext if self.is_circle_point(q, tol) and abs(q[0]) <= tol]
            base = [q for q in ext if not (self.is_circle_point(q, tol) and abs(q[0]) <= tol)]
            return (len(apex) == 1 and len(base) == 2 and self._pair_is_face(base[0], base[1], tol)
                    and abs(base[0][2] - base[1][2]) <= tol)
        return False

    @staticmethod
    def p(n: int) -> np.ndarray:
        return np.array([math.cos(1 / n), math.sin(1 / n), 0.0])

    def xi(self, n: int) -> MaxAffine:
        """``x -> -<p_n, x>``."""
        return MaxAffine([(-self.p(n), 0)])

    @staticmethod
    def f() -> MaxAffine:
        return MaxAffine([((-1, 0, 0), 0)])

    @staticmethod
    def f1() -> MaxAffine:
        return MaxAffine([((-1, 0, 1), 0), ((-1, 0, 0), 0)])

    @staticmethod
    def f2() -> MaxAffine:
        return MaxAffine([((-1, 0, 0), 0), ((-1, 0, -1), 0)])

    def witness(self, count: int = 12) -> WitnessSequence:
        ns = [2 ** k for k in range(count)]
        faces = tuple(np.array([self.p(n)]) for n in ns)
        return WitnessSequence(faces, np.array([[1.0, 0.0, 0.0]]), tuple(self.p(n) for n in ns),
                               "{p_n} with p_n = (cos 1/n, sin 1/n, 0), n = 2^k")

    def evidence(self):
        """Approximants and a min-decomposition for ``(x, y, z) -> -x``."""
        return {"target": self.f(), "approximants": [self.xi(2 ** k) for k in range(14)],
                "decomposition": (self.f1(), self.f2())}


# ---------------------------------------------------------------------------
# four dimensions: hull of four circles


class Example3Family(SmoothFamily):
    """Dual ball ``conv(S1+ u S1- u S2+ u S2-)`` with
    ``S1+- = {(x, y, +-1, 0) : x^2 + y^2 = 1}`` and ``S2+- = {(+-1, 0, w, z) : w^2 + z^2 = 1}``.
    """

    name = "example3"
    dimension = 4

    def gauge(self, z):
        Z, single = _rows(z)
        a, b, c, d = Z.T
        return _out(np.maximum(np.hypot(a, b) + np.abs(c), np.abs(a) + np.hypot(c, d)), single)

    def support(self, u) -> float:
        """``max <q, u>`` over the dual ball."""
        a, b, c, d = np.asarray(u, dtype=float)
        return max(math.hypot(a, b) + abs(c), abs(a) + math.hypot(c, d))

    def dual_contains(self, q, tol: float = TOL) -> bool:
        raise NotImplementedError("membership in this dual ball is not available in closed form")

    @staticmethod
    def circles():
        """(fixed coordinates, free axes, fixed values) for S1+, S1-, S2+, S2-."""
        return (((2, 3), (0, 1), (1.0, 0.0)), ((2, 3), (0, 1), (-1.0, 0.0)),
                ((0, 1), (2, 3), (1.0, 0.0)), ((0, 1), (2, 3), (-1.0, 0.0)))

    def on_circle(self, q, tol: float = TOL) -> int | None:
        q = np.asarray(q, dtype=float)
        for k, (fixed, free, vals) in enumerate(self.circles()):
            if (abs(q[fixed[0]] - vals[0]) <= tol and abs(q[fixed[1]] - vals[1]) <= tol
                    and abs(math.hypot(q[free[0]], q[free[1]]) - 1) <= tol):
                return k
        return None

    def disc_of(self, q, tol: float = TOL) -> set:
        """Indices of the circle discs (each a face of the dual ball) containing ``q``."""
        q = np.asarray(q, dtype=float)
        out = set()
        for k, (fixed, free, vals) in enumerate(self.circles()):
            if (abs(q[fixed[0]] - vals[0]) <= tol and abs(q[fixed[1]] - vals[1]) <= tol
                    and math.hypot(q[free[0]], q[free[1]]) <= 1 + tol):
                out.add(k)
        return out

    def exposed_face(self, u, tol: float = TOL):
        u = np.asarray(u, dtype=float)
        top = self.support(u)
        pts = []
        for fixed, free, vals in self.circles():
            r = math.hypot(u[free[0]], u[free[1]])
            base = vals[0] * u[fixed[0]] + vals[1] * u[fixed[1]]
            if base + r < top - tol:
                continue
            if r == 0:
                return None
            q = np.zeros(4)
            q[fixed[0]], q[fixed[1]] = vals
            q[free[0]], q[free[1]] = u[free[0]] / r, u[free[1]] / r
            pts.append(q)
        return _unique(pts, tol)

    def is_extreme(self, points, tol: float = TOL, normal=None):
        """True / False when decidable, None otherwise.

        Decided cases: sets inside one of the four discs (each disc is an
        exposed face, whose proper extreme subsets are its boundary points);
        single points; and sets matched exactly by the face exposed by ``normal``.
        """
        pts = _unique(points, tol)
        if not pts:
            return True
        if len(pts) == 1:
            return self.on_circle(pts[0], tol) is not None
        common = set.intersection(*(self.disc_of(q, tol) for q in pts))
        if common:
            return False
        if normal is not None:
            face = self.exposed_face(normal, tol)
            if face is not None:
                ext = [q for q in pts if self.on_circle(q, tol) is not None]
                same = len(ext) == len(face) and all(
                    any(np.max(np.abs(a - b)) <= tol for b in ext) for a in face)
                if same and all(_in_hull(q, face) for q in pts):
                    return True
        return None

    @staticmethod
    def f_theta(theta: float) -> np.ndarray:
        return np.array([math.cos(theta), math.sin(theta), 0.0, 1 - math.cos(theta)])

    @staticmethod
    def t_theta(theta: float) -> np.ndarray:
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[c, s, -1.0, 0.0], [c, s, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]])

    limit_triangle = np.array([[1.0, 0.0, -1.0, 0.0], [1.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]])

    @staticmethod
    def g() -> MaxAffine:
        return MaxAffine([((1, 0, -1, 0), 0), ((1, 0, 1, 0), 0), ((1, 0, 0, 1), 0)])

    @staticmethod
    def g1() -> MaxAffine:
        h = 1 / math.sqrt(2)
        return MaxAffine([((1, 0, -1, 0), 0), ((1, 0, 1, 0), 0), ((1, 0, 0, 1), 0), ((1, 0, h, h), 0)])

    @staticmethod
    def g2() -> MaxAffine:
        h = 1 / math.sqrt(2)
        return MaxAffine([((1, 0, -1, 0), 0), ((1, 0, 1, 0), 0), ((1, 0, 0, 1), 0), ((1, 0, -h, h), 0)])

    def witness(self, count: int = 12) -> WitnessSequence:
        thetas = [0.5 / 2 ** k for k in range(count)]
        return WitnessSequence(tuple(self.t_theta(t) for t in thetas), self.limit_triangle,
                               tuple(self.f_theta(t) for t in thetas),
                               "T_theta with theta = 2^-k / 2")

    def theta_busemann(self, theta: float) -> MaxAffine:
        """``x -> max_{v in T_theta} <v, x>``, the Busemann point ``h*_{T_theta, 0}``."""
        return MaxAffine([(v, 0) for v in self.t_theta(theta)])

    def evidence(self):
        """Approximants and a min-decomposition for ``max(x - w, x + w, x + z)``."""
        return {"target": self.g(),
                "approximants": [self.theta_busemann(0.5 / 2 ** k) for k in range(20)],
                "decomposition": (self.g1(), self.g2())}


# ---------------------------------------------------------------------------
# constructors


def example2_spec(m: int = 64) -> BallSpec:
    square = PointsPiece(tuple(vec(c) for c in ((-1, 0, -1), (-1, 0, 1), (1, 0, -1), (1, 0, 1))))
    circle = CirclePiece(vec((0, 0, 0)), vec((1, 0, 0)), vec((0, 1, 0)), Fraction(1))
    return BallSpec(3, "hpolytope-intersection", (square, circle), discretization=m)


def example3_spec(m: int = 64) -> BallSpec:
    pieces = (
        CirclePiece(vec((0, 0, 1, 0)), vec(E1), vec(E2), Fraction(1)),
        CirclePiece(vec((0, 0, -1, 0)), vec(E1), vec(E2), Fraction(1)),
        CirclePiece(vec((1, 0, 0, 0)), vec(E3), vec(E4), Fraction(1)),
        CirclePiece(vec((-1, 0, 0, 0)), vec(E3), vec(E4), Fraction(1)),
    )
    return BallSpec(4, "hull", pieces, dual_side=True, discretization=m)


def _lazy(spec: BallSpec, family: SmoothFamily, name: str) -> NormedSpace:
    def realize():
        s = realize_ball(spec)
        return s.ball, s.dual
    return NormedSpace(realize=realize, dimension=spec.dimension, family=family, spec=spec, name=name)


def example2(m: int = 64) -> NormedSpace:
    return _lazy(example2_spec(m), Example2Family(), "example2")


def example3(m: int = 64) -> NormedSpace:
    return _lazy(example3_spec(m), Example3Family(), "example3")


def _points_space(points, name: str) -> NormedSpace:
    d = len(points[0])
    return realize_ball(BallSpec(d, "vpolytope", (PointsPiece(tuple(vec(p) for p in points)),)), name)


def linf(d: int = 2) -> NormedSpace:
    pts = [tuple(1 if (k >> i) & 1 else -1 for i in range(d)) for k in range(2 ** d)]
    return _points_space(pts, f"linf{d}")


def l1(d: int = 2) -> NormedSpace:
    pts = []
    for i in range(d):
        for s in (1, -1):
            pts.append(tuple(s if j == i else 0 for j in range(d)))
    return _points_space(pts, f"l1_{d}")


def euclid(m: int = 64) -> NormedSpace:
    """Disc in the plane, discretized as an ``m``-gon inscribed in the unit circle."""
    spec = BallSpec(2, "vpolytope", (CirclePiece(vec((0, 0)), vec((1, 0)), vec((0, 1)), Fraction(1)),),
                    discretization=m)
    return realize_ball(spec, f"euclid{m}")


def random_polytope_ball(d: int, n_vertices: int, seed: int, denominator: int = 8) -> NormedSpace:
    """Hull of random rational points in ``[-1, 1]^d``, redrawn until 0 is interior.

    The result is usually not symmetric.
    """
    rng = np.random.default_rng(seed)
    while True:
        raw = rng.integers(-denominator, denominator + 1, size=(n_vertices, d))
        pts = [tuple(Fraction(int(v), denominator) for v in row) for row in raw]
        try:
            P = convex_hull(pts)
        except ValueError:
            continue
        if P.is_full_dimensional and all(b > 0 for _, b in P.facets):
            return realize_ball(BallSpec(d, "vpolytope", (PointsPiece(P.vertices),)),
                                f"random{d}d_seed{seed}")


BUILTINS: dict[str, Callable[..., NormedSpace]] = {
    "example2": example2,
    "example3": example3,
    "linf": linf,
    "l1": l1,
    "euclid": euclid,
}
