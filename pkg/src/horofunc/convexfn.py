"""Piecewise-affine convex functions, their Legendre-Fenchel transforms, and
sample-based comparisons standing in for uniform convergence on compacts."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from ._rational import Vec, dot, solve_affine, to_fraction, vec
from .geometry import Polytope, convex_hull
from .lp import linprog_exact

ABS_TOL = 1e-9


def close(a, b, tol: float = ABS_TOL) -> bool:
    """Absolute tolerance scaled by ``1 + |value|``."""
    return abs(a - b) <= tol * (1 + max(abs(a), abs(b)))


class ConvexFnError(ValueError):
    pass


def _as_points(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    return np.atleast_2d(arr), single


class MaxAffine:
    """``x -> max_i (<gradient_i, x> + offset_i)`` with exact rational pieces.

    Calling with a float array evaluates in double precision (vectorised over
    rows); ``exact`` evaluates a single rational point.
    """

    def __init__(self, pieces: Sequence[tuple[Sequence, object]]):
        if not pieces:
            raise ConvexFnError("a max-affine function needs at least one piece")
        self.pieces = tuple((vec(g), to_fraction(c)) for g, c in pieces)
        dims = {len(g) for g, _ in self.pieces}
        if len(dims) != 1:
            raise ConvexFnError("pieces have mixed dimensions")
        self.dimension = dims.pop()

    @classmethod
    def from_arrays(cls, gradients, offsets) -> "MaxAffine":
        return cls(list(zip(np.asarray(gradients).tolist(), np.asarray(offsets).tolist())))

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        G = np.array([[float(x) for x in g] for g, _ in self.pieces])
        c = np.array([float(o) for _, o in self.pieces])
        return G, c

    @property
    def gradients(self) -> np.ndarray:
        return self._arrays[0]

    def __call__(self, x):
        pts, single = _as_points(x)
        G, c = self._arrays
        vals = np.max(pts @ G.T + c, axis=1)
        return float(vals[0]) if single else vals

    def exact(self, x: Sequence) -> Fraction:
        x = vec(x)
        return max(dot(g, x) + c for g, c in self.pieces)

    def active(self, x: Sequence) -> tuple[int, ...]:
        """Sorted indices of the pieces attaining the maximum at ``x`` (exact)."""
        x = vec(x)
        vals = [dot(g, x) + c for g, c in self.pieces]
        top = max(vals)
        return tuple(i for i, v in enumerate(vals) if v == top)

    def reduced(self) -> "MaxAffine":
        """Same function with duplicate gradients merged (largest offset kept)."""
        best: dict = {}
        for g, c in self.pieces:
            if g not in best or c > best[g]:
                best[g] = c
        return MaxAffine(sorted(best.items()))

    def __repr__(self) -> str:
        return f"MaxAffine({len(self.pieces)} pieces, dimension={self.dimension})"


class AffineOnPolytope:
    """``q -> <q, gradient> + offset`` on ``domain`` and ``+inf`` elsewhere."""

    def __init__(self, domain: Polytope, gradient: Sequence, offset):
        self.domain = domain
        self.gradient = vec(gradient)
        self.offset = to_fraction(offset)
        if len(self.gradient) != domain.dimension:
            raise ConvexFnError("gradient dimension does not match the domain")

    def exact(self, q: Sequence):
        q = vec(q)
        if not self.domain.contains(q):
            return math.inf
        return dot(q, self.gradient) + self.offset

    def __call__(self, q, tol: float = ABS_TOL):
        pts, single = _as_points(q)
        g = np.array([float(x) for x in self.gradient])
        vals = pts @ g + float(self.offset)
        vals = np.where(self.domain.contains_float(pts, tol), vals, np.inf)
        return float(vals[0]) if single else vals

    def vertex_values(self) -> list[Fraction]:
        return [dot(v, self.gradient) + self.offset for v in self.domain.vertices]

    def infimum(self) -> Fraction:
        return min(self.vertex_values())

    def __repr__(self) -> str:
        return f"AffineOnPolytope(domain={self.domain!r}, gradient={self.gradient}, offset={self.offset})"


def lf_transform_dual(h: AffineOnPolytope) -> MaxAffine:
    """Conjugate of an affine function on a polytope: max over domain vertices."""
    if not h.domain.vertices:
        raise ConvexFnError("improper function")
    return MaxAffine([(v, -(dot(v, h.gradient) + h.offset)) for v in h.domain.vertices])


@dataclass(frozen=True)
class ConjugateValue:
    """Value of ``f*`` at a query, with a point ``x`` attaining the supremum."""

    value: object
    witness: Vec | None


class Conjugate:
    """Legendre-Fenchel transform of a :class:`MaxAffine` function.

    Point queries are answered exactly by the LP
    ``min -sum lam_i b_i  s.t.  sum lam_i a_i = q, sum lam_i = 1, lam >= 0``,
    whose dual optimum is a point of the subdifferential of ``f*`` at ``q``.
    """

    closed_form_limit = 64

    def __init__(self, f: MaxAffine):
        self.source = f
        self._reduced = f.reduced()

    def query(self, q: Sequence) -> ConjugateValue:
        q = vec(q)
        pieces = self._reduced.pieces
        d = self._reduced.dimension
        if len(q) != d:
            raise ConvexFnError("dimension mismatch")
        A = [[g[k] for g, _ in pieces] for k in range(d)]
        A.append([Fraction(1)] * len(pieces))
        res = linprog_exact([-c for _, c in pieces], A, list(q) + [Fraction(1)])
        if res.status == "infeasible":
            return ConjugateValue(math.inf, None)
        if res.status != "optimal":
            raise ConvexFnError("conjugate LP did not solve")
        return ConjugateValue(res.value, tuple(res.dual[:d]))

    def __call__(self, q: Sequence):
        return self.query(q).value

    @cached_property
    def domain(self) -> Polytope | None:
        """Polytope where ``f*`` is finite (the hull of the gradients)."""
        if len(self._reduced.pieces) > self.closed_form_limit:
            return None
        return convex_hull([g for g, _ in self._reduced.pieces])

    @cached_property
    def affine(self) -> AffineOnPolytope | None:
        """``f*`` as an affine function on its domain, or None if it is not affine there."""
        dom = self.domain
        if dom is None:
            return None
        values = dict((g, -c) for g, c in self._reduced.pieces)
        verts = list(dom.vertices)
        sol = solve_affine(verts, [values[v] for v in verts])
        if sol is None:
            return None
        p, c = sol
        for g, val in values.items():
            if dot(g, p) + c > val:
                return None
        return AffineOnPolytope(dom, p, c)

    @property
    def is_affine(self) -> bool:
        return self.affine is not None


def lf_transform_primal(f: MaxAffine, D: Polytope | None = None) -> Conjugate:
    """Conjugate of ``f``; with ``D`` given, require ``dom f*`` inside ``D``.

    A gradient outside ``D`` means ``f`` is not 1-Lipschitz for the norm whose
    dual ball is ``D``, and the conjugate is finite beyond ``D``.
    """
    if D is not None:
        outside = [g for g, _ in f.pieces if not D.contains(g)]
        if outside:
            raise ConvexFnError(
                f"unbounded conjugate: {len(outside)} gradient(s) lie outside the dual ball")
    return Conjugate(f)


# ---------------------------------------------------------------------------
# sample-based comparisons

@dataclass(frozen=True)
class FnGridProbe:
    """Sample points covering a gauge ball of radius ``radius``."""

    radius: float
    samples: np.ndarray
    values: np.ndarray | None = None

    def with_values(self, f: Callable) -> "FnGridProbe":
        return FnGridProbe(self.radius, self.samples, np.asarray(f(self.samples), dtype=float))

    def to_csv(self, path) -> None:
        if self.values is None:
            raise ValueError("probe has no values")
        d = self.samples.shape[1]
        header = ",".join([f"x{i + 1}" for i in range(d)] + ["f"])
        data = np.column_stack([self.samples, self.values])
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")


def grid_probe(gauge: Callable, box: tuple[np.ndarray, np.ndarray], radius: float = 2.0,
               density: int = 33, n_random: int = 1000, seed: int = 0) -> FnGridProbe:
    """Grid of ``density`` points per axis over ``radius * box`` plus ``n_random``
    scrambled Halton points, all filtered to ``gauge(x) <= radius``; the origin is included.
    """
    lo, hi = (np.asarray(b, dtype=float) * radius for b in box)
    d = len(lo)
    axes = [np.linspace(lo[i], hi[i], density) for i in range(d)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d) if density > 1 \
        else np.zeros((0, d))
    slack = radius * (1 + 1e-12)
    grid = grid[gauge(grid) <= slack] if len(grid) else grid
    rnd = []
    if n_random > 0:
        sampler = qmc.Halton(d, scramble=True, seed=seed)
        count = 0
        while count < n_random:
            batch = qmc.scale(sampler.random(max(256, 2 * n_random)), lo, hi)
            batch = batch[gauge(batch) <= slack]
            rnd.append(batch[: n_random - count])
            count += len(rnd[-1])
    samples = np.vstack([np.zeros((1, d)), grid] + rnd)
    return FnGridProbe(float(radius), samples)


def _values(f: Callable, probe: FnGridProbe) -> np.ndarray:
    vals = np.asarray(f(probe.samples), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ConvexFnError("function is not finite on every probe sample")
    return vals


def uniform_distance(f: Callable, g: Callable, probe: FnGridProbe) -> float:
    """``max |f - g|`` over the probe samples."""
    return float(np.max(np.abs(_values(f, probe) - _values(g, probe))))


def lipschitz_check(f: Callable, metric: Callable, pairs: tuple[np.ndarray, np.ndarray],
                    tol: float = ABS_TOL) -> tuple[bool, float]:
    """Oriented 1-Lipschitz test ``f(x) - f(y) <= d(x, y)`` on sampled pairs.

    Returns (passed, worst ratio ``(f(x) - f(y)) / d(x, y)``).
    """
    X, Y = (np.atleast_2d(np.asarray(a, dtype=float)) for a in pairs)
    fx, fy = np.asarray(f(X), dtype=float), np.asarray(f(Y), dtype=float)
    dist = np.asarray(metric(X, Y), dtype=float)
    diff = fx - fy
    ok = diff <= dist + tol * (1 + np.abs(fx) + np.abs(fy))
    nz = dist > 0
    worst = float(np.max(diff[nz] / dist[nz])) if np.any(nz) else 0.0
    return bool(np.all(ok)), worst


class MinFunction:
    """Pointwise minimum of two evaluators (need not be convex)."""

    def __init__(self, f1: Callable, f2: Callable):
        self.f1, self.f2 = f1, f2

    def __call__(self, x):
        return np.minimum(self.f1(x), self.f2(x))


def min_eval(f1: Callable, f2: Callable) -> MinFunction:
    return MinFunction(f1, f2)
