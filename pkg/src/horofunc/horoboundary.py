"""Busemann points ``h*_{E,p}``, classification of horofunctions, ray limits,
almost-geodesics and the closure test for the extreme sets of the dual ball.

Extreme sets of polyhedral dual balls are :class:`~horofunc.geometry.Face`
objects; for the closed-form families they are :class:`PointFace` vertex sets.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from ._rational import dot, solve_affine, to_fraction, vec
from .convexfn import (
    ABS_TOL,
    Conjugate,
    ConvexFnError,
    FnGridProbe,
    MaxAffine,
    lipschitz_check,
    uniform_distance,
)
from .geometry import (
    ExposedChain,
    Face,
    GeometryError,
    convex_hull,
    exposed_face_chain,
    face_containing,
    hausdorff_distance,
    is_extreme_set,
    pk_lower_limit,
    pk_upper_limit,
)
from .normedspace import NormedSpace, PhiFunction, support_neg

SMOOTH_TOL = 1e-6
LIMIT_TOL = 1e-3


class HoroError(ValueError):
    pass


@dataclass(frozen=True)
class PointFace:
    """Extreme set of a closed-form dual ball, given by its extreme points."""

    points: tuple
    dim: int

    @property
    def point_array(self) -> np.ndarray:
        return np.array([[float(x) for x in p] for p in self.points])


def _is_whole(space: NormedSpace, E) -> bool:
    if isinstance(E, Face):
        return E.is_whole
    return False


# ---------------------------------------------------------------------------
# dual horodata and Busemann points


@dataclass(frozen=True)
class DualHorodata:
    """``h_{E,p}(q) = I_E(q) + <q, p> - inf_E <., p>``."""

    E: object
    p: tuple
    canonical_offset: Fraction

    @property
    def is_proper(self) -> bool:
        return not (isinstance(self.E, Face) and self.E.is_whole)

    def __call__(self, q: Sequence):
        """Exact value (``inf`` off ``E``); only available for polytope faces."""
        if not isinstance(self.E, Face):
            raise HoroError("exact evaluation needs a polytope face")
        q = vec(q)
        if not self.E.polytope.contains(q):
            return math.inf
        return dot(q, self.p) - self.canonical_offset

    def to_affine(self):
        from .convexfn import AffineOnPolytope
        if not isinstance(self.E, Face):
            raise HoroError("affine form needs a polytope face")
        return AffineOnPolytope(self.E.polytope, self.p, -self.canonical_offset)


def _check_extreme(space: NormedSpace, E, normal=None):
    """Resolve ``E`` to a Face (polyhedral) or a PointFace (closed-form family)."""
    if space.family is None:
        if isinstance(E, Face):
            if E.parent != space.dual:
                raise GeometryError("face belongs to a different polytope")
            return E
        pts = [vec(q) for q in E]
        if not is_extreme_set(space.dual, pts):
            raise GeometryError("not an extreme set")
        return face_containing(space.dual, pts)
    pts = [tuple(float(x) for x in q) for q in (E.points if isinstance(E, (Face, PointFace)) else E)]
    family = space.family
    verdict = family.is_extreme(pts, normal=normal)
    if verdict is None:
        raise GeometryError("extremality undetermined for this set")
    if not verdict:
        raise GeometryError("not an extreme set")
    uniq = []
    for p in pts:
        if p not in uniq:
            uniq.append(p)
    arr = np.array(uniq)
    dim = int(np.linalg.matrix_rank(arr - arr[0])) if len(arr) > 1 else 0
    return PointFace(tuple(vec(p) for p in uniq), dim)


def build_dual_horodata(space: NormedSpace, E, p: Sequence, normal=None) -> DualHorodata:
    """``E``: a face of the dual ball, or a list of points whose hull is extreme."""
    face = _check_extreme(space, E, normal)
    p = vec(p)
    if len(p) != space.dimension:
        raise HoroError("dimension mismatch")
    offset = min(dot(q, p) for q in face.points)
    return DualHorodata(face, p, offset)


class BusemannPoint:
    """``x -> |p - x|_E - |p|_E``."""

    def __init__(self, source: DualHorodata):
        self.source = source
        pts = source.E.points
        self._V = np.array([[float(x) for x in q] for q in pts])
        self._pf = np.array([float(x) for x in source.p])
        # stable form: max_v (<v, x> - s_v) with s_v = <v, p> - min_E <., p>
        self._shifts = np.array([float(dot(q, source.p) - source.canonical_offset) for q in pts])

    def __call__(self, x):
        pts = np.asarray(x, dtype=float)
        single = pts.ndim == 1
        vals = np.max(np.atleast_2d(pts) @ self._V.T - self._shifts, axis=1)
        return float(vals[0]) if single else vals

    def exact(self, x: Sequence) -> Fraction:
        x = vec(x)
        p = self.source.p
        E = self.source.E.points
        return support_neg(E, tuple(a - b for a, b in zip(p, x)), exact=True) - \
            support_neg(E, p, exact=True)

    def to_max_affine(self) -> MaxAffine:
        s = self.source
        return MaxAffine([(q, s.canonical_offset - dot(q, s.p)) for q in s.E.points])


def busemann_point(data: DualHorodata, allow_whole: bool = False) -> BusemannPoint:
    if not allow_whole and not data.is_proper:
        raise HoroError("E must be a proper extreme set")
    return BusemannPoint(data)


def eval_busemann(bp: BusemannPoint, x):
    return bp(x)


def busemann_equal(a: DualHorodata, b: DualHorodata, probe: FnGridProbe | None = None,
                   tol: float = ABS_TOL) -> bool:
    """Same face and ``<., p_a - p_b>`` constant on its vertices.

    With a probe, the verdict is cross-checked against the evaluators and a
    disagreement is reported as a warning.
    """
    same_face = set(a.E.points) == set(b.E.points)
    verdict = False
    if same_face:
        diff = tuple(x - y for x, y in zip(a.p, b.p))
        vals = {dot(q, diff) for q in a.E.points}
        verdict = len(vals) == 1
    if probe is not None:
        dist = uniform_distance(BusemannPoint(a), BusemannPoint(b), probe)
        if (dist <= tol * (1 + probe.radius)) != verdict:
            warnings.warn(f"busemann_equal: parameter test says {verdict} but probe distance is {dist:.3g}")
    return verdict


# ---------------------------------------------------------------------------
# minimum decompositions


@dataclass(frozen=True)
class MinCertificate:
    """A witness that ``f = min(f1, f2)`` with both ``f_i`` 1-Lipschitz and different from ``f``."""

    valid: bool
    min_error: float
    lipschitz: tuple
    worst_ratios: tuple
    differences: tuple
    tolerance: float
    reason: str

    def to_json(self) -> dict:
        return {"valid": self.valid, "min_error": self.min_error, "lipschitz": list(self.lipschitz),
                "worst_ratios": list(self.worst_ratios), "differences": list(self.differences),
                "tolerance": self.tolerance, "reason": self.reason}


def verify_min_decomposition(space: NormedSpace, f: Callable, f1: Callable, f2: Callable,
                             probe: FnGridProbe, pairs: tuple, tol: float = ABS_TOL) -> MinCertificate:
    vals = np.asarray(f(probe.samples), dtype=float)
    v1 = np.asarray(f1(probe.samples), dtype=float)
    v2 = np.asarray(f2(probe.samples), dtype=float)
    scale = 1 + np.abs(vals)
    min_err = float(np.max(np.abs(np.minimum(v1, v2) - vals) / scale))
    ok1, w1 = lipschitz_check(f1, space.metric, pairs, tol)
    ok2, w2 = lipschitz_check(f2, space.metric, pairs, tol)
    d1 = float(np.max(np.abs(v1 - vals)))
    d2 = float(np.max(np.abs(v2 - vals)))
    reasons = []
    if min_err > tol:
        reasons.append(f"min(f1, f2) differs from f by {min_err:.3g}")
    if not ok1:
        reasons.append("f1 is not 1-Lipschitz")
    if not ok2:
        reasons.append("f2 is not 1-Lipschitz")
    if d1 <= tol:
        reasons.append("f1 coincides with f on the probe")
    if d2 <= tol:
        reasons.append("f2 coincides with f on the probe")
    valid = not reasons
    return MinCertificate(valid, min_err, (ok1, ok2), (w1, w2), (d1, d2), tol,
                          "certificate valid" if valid else "; ".join(reasons))


# ---------------------------------------------------------------------------
# classification


KINDS = ("busemann", "interior", "horofunction-not-busemann", "not-in-compactification",
         "not-busemann-undetermined", "undetermined")


@dataclass(frozen=True)
class HoroEvidence:
    """Caller-supplied evidence: functions known to be horofunctions (Busemann
    points or distance functions) converging to the input, and optionally a
    minimum decomposition."""

    approximants: tuple = ()
    decomposition: tuple | None = None


@dataclass(frozen=True)
class Classification:
    kind: str
    horodata: DualHorodata | None = None
    z: tuple | None = None
    domain: tuple = ()
    reason: str = ""
    distances: tuple = ()
    certificate: MinCertificate | None = None

    @property
    def is_busemann(self) -> bool:
        return self.kind in ("busemann", "interior")


def _dual_contains(space: NormedSpace, g: tuple) -> bool:
    if space.family is None:
        return space.dual.contains(g)
    try:
        return space.family.dual_contains([float(x) for x in g], SMOOTH_TOL)
    except NotImplementedError:
        # fall back to the gauge inequality on the probe directions
        return None


def _extremality(space: NormedSpace, pts: list):
    if space.family is None:
        return is_extreme_set(space.dual, pts)
    return space.family.is_extreme([[float(x) for x in p] for p in pts])


def identify_horofunction(space: NormedSpace, f: MaxAffine, evidence: HoroEvidence | None = None,
                          probe: FnGridProbe | None = None, pairs: tuple | None = None,
                          include_whole: bool = True) -> Classification:
    """Classify a max-affine function through its conjugate.

    Pre-checks (errors): ``f(0) = 0`` and every gradient in the dual ball.
    Busemann iff ``dom f*`` is an extreme set and ``f*`` is affine on it.
    Otherwise ``f`` is not a Busemann point; it is reported as a horofunction
    only when ``evidence`` shows it is a limit of horofunctions, and as outside
    the compactification on polyhedral spaces, where every horofunction is a
    Busemann point.
    """
    if f.dimension != space.dimension:
        raise HoroError("dimension mismatch")
    if f.exact([0] * f.dimension) != 0:
        raise HoroError("f(0) != 0: horofunctions are normalised to vanish at the origin")
    red = f.reduced()
    lip_unknown = False
    for g, _ in red.pieces:
        inside = _dual_contains(space, g)
        if inside is None:
            lip_unknown = True
        elif not inside:
            raise HoroError("f is not 1-Lipschitz: a gradient lies outside the dual ball")
    if lip_unknown:
        if pairs is None:
            pairs = space.sample_pairs(2000, seed=0)
        ok, worst = lipschitz_check(f, space.metric, pairs, SMOOTH_TOL)
        if not ok:
            raise HoroError(f"f is not 1-Lipschitz (worst ratio {worst:.6g})")

    conj = Conjugate(red)
    dom = conj.domain
    if dom is None:
        raise HoroError("too many pieces for a closed-form conjugate domain")
    dom_pts = list(dom.vertices)
    extreme = _extremality(space, dom_pts)
    affine = conj.affine
    if extreme and affine is not None:
        data = build_dual_horodata(space, dom_pts, affine.gradient) if space.family is None else \
            DualHorodata(PointFace(tuple(dom_pts), dom.dim), affine.gradient,
                         min(dot(q, affine.gradient) for q in dom_pts))
        if _is_whole(space, data.E):
            if not include_whole:
                raise HoroError("conjugate domain is the whole dual ball")
            return Classification("interior", data, affine.gradient, tuple(dom_pts),
                                  "f* is affine on the whole dual ball: f is a distance function")
        return Classification("busemann", data, None, tuple(dom_pts),
                              "dom f* is an extreme set and f* is affine on it")

    reasons = []
    proof = False
    if extreme is False:
        reasons.append("dom f* is not an extreme set of the dual ball")
        proof = True
    if affine is None:
        reasons.append("f* is not affine on its domain")
        proof = True
    cert = None
    distances: tuple = ()
    if evidence is not None:
        if probe is None:
            probe = space.probe()
        if evidence.decomposition is not None:
            if pairs is None:
                pairs = space.sample_pairs(2000, seed=0)
            cert = verify_min_decomposition(space, f, *evidence.decomposition, probe, pairs)
            if cert.valid:
                reasons.append("f is the minimum of two 1-Lipschitz functions different from it")
                proof = True
        if evidence.approximants:
            distances = tuple(uniform_distance(f, g, probe) for g in evidence.approximants)
    horo = bool(distances) and distances[-1] <= LIMIT_TOL and distances[-1] < distances[0]
    if horo:
        reasons.append(f"limit of known horofunctions (final distance {distances[-1]:.3g})")
    if proof and horo:
        kind = "horofunction-not-busemann"
    elif proof and space.family is None:
        kind = "not-in-compactification"
        reasons.append("polyhedral norm: every horofunction is a Busemann point")
    elif proof:
        kind = "not-busemann-undetermined"
        reasons.append("no evidence that f is a horofunction")
    else:
        kind = "undetermined"
        reasons.append("extremality of dom f* could not be decided")
    return Classification(kind, None, None, tuple(dom_pts), "; ".join(reasons), distances, cert)


# ---------------------------------------------------------------------------
# limits along rays


@dataclass(frozen=True)
class RayLimit:
    direction: tuple
    radii: tuple
    residuals: tuple
    converged: bool
    limit: Callable
    face: object
    values: np.ndarray
    tolerance: float
    report: str


def limit_along_ray(space: NormedSpace, direction: Sequence, radii: Sequence | None = None,
                    probe: FnGridProbe | None = None, tol: float | None = None,
                    progress: Callable | None = None) -> RayLimit:
    """Evaluate ``phi_{t d}`` on the probe along a schedule of ``t``.

    On polyhedral spaces the evaluation uses exact per-vertex shifts
    ``t * gap_v`` with ``gap_v = <v, d> + ||d||``; the fitted limit keeps the
    pieces whose offsets stop moving (``gap_v = 0``), i.e. ``h*_{E,0}`` with
    ``E`` the face exposed by ``d``.
    """
    d = vec(direction)
    if len(d) != space.dimension:
        raise HoroError("dimension mismatch")
    if all(x == 0 for x in d):
        raise HoroError("direction must be nonzero")
    if probe is None:
        probe = space.probe()
    X = probe.samples
    if space.family is None:
        radii = tuple(radii) if radii is not None else tuple(2.0 ** k for k in range(0, 41, 4))
        tol = ABS_TOL if tol is None else tol
        norm = space.gauge_exact(d)
        verts = space.dual.vertices
        gaps = [dot(v, d) + norm for v in verts]
        G = np.array([float(g) for g in gaps])
        base = X @ space.dual.vertex_array.T
        evals = []
        for t in radii:
            evals.append(np.max(base - float(t) * G, axis=1))
            if progress:
                progress(t)
        face_pts = [v for v, g in zip(verts, gaps) if g == 0]
        face = face_containing(space.dual, face_pts)
        limit = MaxAffine([(v, 0) for v in face.points])
    else:
        radii = tuple(radii) if radii is not None else tuple(10.0 ** k for k in range(1, 7))
        tol = LIMIT_TOL if tol is None else tol
        df = np.array([float(x) for x in d])
        evals = []
        for t in radii:
            evals.append(PhiFunction(space, t * df)(X))
            if progress:
                progress(t)
        limit = None
        face = None
        exposed = space.family.exposed_face(-df)
        if exposed is not None:
            face = PointFace(tuple(vec(q) for q in exposed), len(exposed) - 1)
            limit = MaxAffine([(q, 0) for q in face.points])
    residuals = tuple(float(np.max(np.abs(a - b))) for a, b in zip(evals, evals[1:]))
    converged = bool(residuals) and residuals[-1] <= tol
    final = evals[-1]
    fit_err = float(np.max(np.abs(limit(X) - final))) if limit is not None else math.inf
    if not converged:
        report = f"no convergence at this schedule (last residual {residuals[-1] if residuals else math.nan:.3g})"
    elif fit_err > tol:
        report = f"converged, but the piecewise-affine fit is off by {fit_err:.3g}"
    else:
        report = f"converged: last residual {residuals[-1]:.3g}, fit error {fit_err:.3g}"
    if limit is None:
        limit = _Tabulated(X, final)
    return RayLimit(d, tuple(radii), residuals, converged, limit, face, final, tol, report)


class _Tabulated:
    """Values known only on the probe samples."""

    def __init__(self, samples: np.ndarray, values: np.ndarray):
        self.samples, self.values = samples, values

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape == self.samples.shape and np.array_equal(x, self.samples):
            return self.values
        raise ValueError("tabulated limit is only known on its probe")


# ---------------------------------------------------------------------------
# almost-geodesics


@dataclass(frozen=True)
class AlmostGeodesic:
    points: tuple
    epsilon: float
    target: DualHorodata
    lambdas: tuple = ()
    chain: ExposedChain | None = None

    def point_array(self) -> np.ndarray:
        return np.array([[float(x) for x in p] for p in self.points])


def z_schedule(space: NormedSpace, count: int, seed: int = 0) -> np.ndarray:
    """``z_0 = 0`` then scrambled Halton points, ``z_n`` drawn from the gauge ball of
    radius ``2 log2(2 + n)``, so that the union is dense in the whole space."""
    d = space.dimension
    lo, hi = space.bounding_box()
    sampler = qmc.Halton(d, scramble=True, seed=seed)
    out = [np.zeros(d)]
    pool = np.empty((0, d))
    while len(out) < count:
        if len(pool) == 0:
            pool = sampler.random(256) * 2 - 1
        u, pool = pool[0], pool[1:]
        n = len(out)
        r = 2 * math.log2(2 + n)
        # map the unit cube onto r * box around the origin
        z = np.where(u >= 0, u * hi, -u * lo) * r
        if space.gauge(z) <= r:
            out.append(z)
    return np.array(out[:count])


def _support_rows(V: np.ndarray, R: np.ndarray) -> np.ndarray:
    return np.max(-(R @ V.T), axis=1)


def _level_lift(P: list, C: list, F: list, fhat: tuple, f0: Fraction, Z: np.ndarray,
                constant_p: bool, gauge_C=None, lam_cap: float = 2.0 ** 60,
                progress: Callable | None = None) -> tuple[list, list]:
    """One application of the lifting step: ``q_n = p_n + lam_n * fhat``.

    ``C``/``F`` are vertex lists (``gauge_C`` overrides ``|.|_C`` by a closed
    form). ``lam_n`` starts at ``max(1, lam_{n-1})``, doubles until both
    conditions hold and is then refined by 20 bisection steps.
    """
    N = len(P)
    VC = np.array([[float(x) for x in v] for v in C]) if C else None
    VF = np.array([[float(x) for x in v] for v in F])
    others = [v for v in C if v not in set(F)]
    VO = np.array([[float(x) for x in v] for v in others]) if others else None
    g = np.array([float(x) for x in fhat])
    Pf = np.array([[float(x) for x in p] for p in P])

    def norm_C(R):
        return gauge_C(R) if gauge_C is not None else _support_rows(VC, R)

    def gap(R):
        return norm_C(R) - _support_rows(VF, R)

    exact = gauge_C is None

    def it1(prev_q, p, lam, n):
        # |q_n - q_{n-1}|_C - |q_n - q_{n-1}|_F < 2^-(n-1)
        rf = Pf[n] + float(lam) * g - np.array([float(a) for a in prev_q])
        val = float(gap(rf[None, :])[0])
        if not exact:
            return val < max(2.0 ** -(n - 1), 1e-12 * (1 + np.max(np.abs(rf))))
        # float screening; the exact comparison decides the narrow band
        slack = 1e-9 * (1 + float(np.max(np.abs(rf))))
        if val > 2.0 ** -(n - 1) + slack:
            return False
        if VO is None or np.max(-(VO @ rf)) < np.max(-(VF @ rf)) - slack:
            return True   # the maximum over C is attained only on F: the gap is exactly 0
        lam = Fraction(lam)
        r = tuple(a + lam * b - c for a, b, c in zip(p, fhat, prev_q))
        dc = max(-dot(v, r) for v in C)
        df = max(-dot(v, r) for v in F)
        return dc - df < Fraction(1, 2 ** (n - 1))

    cached = np.full(len(Z), np.inf)   # upper bounds on the gap at the current lambda

    def it2(p, lam, n, idx):
        if n == 0:
            return True, None
        R = Pf[n][None, :] + float(lam) * g - Z[idx]
        vals = gap(R)
        return bool(np.all(vals < (1.0 / n) * (1 - 1e-9))), vals

    Q: list = []
    lams: list = []
    prev_lam = 1.0
    for n in range(N):
        p = P[n]
        if constant_p:
            idx = np.nonzero(cached[: n + 1] >= (1.0 / max(n, 1)) * (1 - 1e-9))[0]
        else:
            idx = np.arange(n + 1)

        def ok(lam):
            if n > 0 and not it1(Q[-1], p, lam, n):
                return False
            return it2(p, lam, n, idx)[0]

        lam = max(1.0, prev_lam)
        if not ok(lam):
            lo = lam
            hi = lam * 2
            while not ok(hi):
                lo, hi = hi, hi * 2
                if hi > lam_cap:
                    raise HoroError(f"lambda search diverged at n={n} (lambda > 2^60)")
            for _ in range(20):
                mid = (lo + hi) / 2
                if ok(mid):
                    hi = mid
                else:
                    lo = mid
            lam = hi
        if constant_p and n > 0:
            _, vals = it2(p, lam, n, idx)
            if vals is not None:
                cached[idx] = vals
        lam_q = Fraction(lam)
        Q.append(tuple(a + lam_q * b for a, b in zip(p, fhat)))
        lams.append(lam)
        prev_lam = lam
        if progress:
            progress(n)
    return Q, lams


def build_almost_geodesic(space: NormedSpace, E, p: Sequence, n_points: int = 2000,
                          maximal: bool = False, seed: int = 0, epsilon_in: float = 0.0,
                          normal=None, progress: Callable | None = None) -> AlmostGeodesic:
    """Lift the constant sequence ``p`` through an exposed-face chain ending at ``E``.

    Each level ``F = F_{i+1}`` inside ``C = F_i`` uses the certificate
    ``f`` (zero on ``F``, positive on ``C \\ F``) with gradient ``fhat``.
    On closed-form families ``E`` must be a single extreme point exposed by
    ``normal`` (or by ``-E`` when omitted) and the chain is direct.
    """
    data = build_dual_horodata(space, E, p, normal=normal)
    if not data.is_proper:
        raise HoroError("E must be a proper extreme set")
    if n_points < 2:
        raise HoroError("need at least two points")
    Z = z_schedule(space, n_points, seed)
    P = [data.p] * n_points
    if space.family is None:
        chain = exposed_face_chain(space.dual, list(data.E.points), maximal=maximal)
        levels = list(zip(chain.faces, chain.faces[1:], chain.functionals))[::-1]
        lambdas = []
        for k, (outer, inner, fn) in enumerate(levels):
            # the constant starting sequence only lives at the innermost level
            Q, lams = _level_lift(P, list(outer.points), list(inner.points), tuple(fn.gradient),
                                  fn.constant, Z, constant_p=(k == 0), progress=progress)
            P = Q
            lambdas.append(tuple(lams))
        eps = 2.0 * len(levels) + epsilon_in
        return AlmostGeodesic(tuple(P), eps, data, tuple(lambdas), chain)
    pts = data.E.points
    if len(pts) != 1:
        raise HoroError("on closed-form spaces only exposed extreme points are supported")
    q0 = tuple(pts[0])
    u = [float(x) for x in (normal if normal is not None else q0)]
    exposed = space.family.exposed_face(u)
    q0f = np.array([float(x) for x in q0])
    if exposed is None or len(exposed) != 1 or np.max(np.abs(exposed[0] - q0f)) > SMOOTH_TOL:
        raise HoroError("E is not exposed by the given normal")
    # affine certificate: f(q) = support(u) - <q, u>, zero on E and positive elsewhere
    fhat = tuple(-to_fraction(float(x)) for x in u)
    Q, lams = _level_lift(P, [], [q0], fhat, Fraction(0), Z, constant_p=True,
                          gauge_C=space.gauge, progress=progress)
    return AlmostGeodesic(tuple(Q), 2.0 + epsilon_in, data, (tuple(lams),), None)


@dataclass(frozen=True)
class GeodesicReport:
    minimal_epsilon: float
    budget: float
    passed: bool
    prefix_slack: np.ndarray
    rieffel_residual: float
    rieffel_pairs: int

    def to_json(self) -> dict:
        return {"minimal_epsilon": self.minimal_epsilon, "budget": self.budget, "passed": self.passed,
                "rieffel_residual": self.rieffel_residual, "rieffel_pairs": self.rieffel_pairs}


def verify_almost_geodesic(space: NormedSpace, ag, budget: float | None = None,
                           n_pairs: int = 2000, seed: int = 0, tol: float = 1e-6) -> GeodesicReport:
    """Check ``sum_{i<n} d(q_i, q_{i+1}) <= d(q_0, q_n) + eps`` for every prefix.

    The minimal feasible ``eps`` is reported. The two-parameter form is
    checked with the cumulative-length parameterization on sampled pairs
    ``s <= t`` from the second half of the sequence, read in the forward
    orientation ``d(q_0, q_s) + d(q_s, q_t) ~ t``.
    """
    pts = ag.points if isinstance(ag, AlmostGeodesic) else ag
    if len(pts) < 2:
        raise HoroError("need at least two points")
    if budget is None:
        budget = ag.epsilon if isinstance(ag, AlmostGeodesic) else 0.0
    if space.family is None and all(isinstance(x, Fraction) for x in pts[0]):
        # exact prefix sums, converted once
        total = Fraction(0)
        length_exact = [total]
        slack_exact = []
        for x, y in zip(pts, pts[1:]):
            total += space.gauge_exact(tuple(b - a for a, b in zip(x, y)))
            length_exact.append(total)
            slack_exact.append(total - space.gauge_exact(tuple(b - a for a, b in zip(pts[0], y))))
        length = np.array([float(v) for v in length_exact])
        slack = np.array([float(v) for v in slack_exact])
    else:
        A = np.array([[float(x) for x in p] for p in pts])
        length = np.concatenate([[0.0], np.cumsum(space.gauge(A[1:] - A[:-1]))])
        slack = length[1:] - space.gauge(A[1:] - A[0])
    min_eps = max(0.0, float(np.max(slack)))
    # two-parameter form on the tail
    n = len(pts)
    rng = np.random.default_rng(seed)
    lo = n // 2
    s_idx = rng.integers(lo, n, size=n_pairs)
    t_idx = rng.integers(lo, n, size=n_pairs)
    s_idx, t_idx = np.minimum(s_idx, t_idx), np.maximum(s_idx, t_idx)
    A = np.array([[float(x) for x in p] for p in pts])
    d0s = space.gauge(A[s_idx] - A[0])
    dst = space.gauge(A[t_idx] - A[s_idx])
    resid = float(np.max(np.abs(d0s + dst - length[t_idx]))) if n_pairs else 0.0
    passed = min_eps <= budget + tol
    return GeodesicReport(min_eps, float(budget), bool(passed), slack, resid, int(n_pairs))


# ---------------------------------------------------------------------------
# closure of the set of extreme sets


@dataclass(frozen=True)
class ClosureReport:
    verdict: str
    witness: tuple = ()
    limit: np.ndarray | None = None
    reason: str = ""
    details: dict = field(default_factory=dict)


def check_extreme_closure(space: NormedSpace, count: int = 20, resolution: float = 1e-2) -> ClosureReport:
    """Closed / not-closed / inconclusive verdict on the extreme sets of the dual ball."""
    family = space.family
    if family is None:
        if space.spec is not None and space.spec.has_smooth_pieces and space.dimension >= 3:
            return ClosureReport("inconclusive", reason=(
                "discretized smooth pieces in dimension >= 3: the polytope has finitely many faces, "
                "but the smooth body it approximates is not decided by sampling"))
        if space.dimension <= 2:
            return ClosureReport("closed", reason="dimension two: extreme sets are always closed")
        return ClosureReport("closed", reason="finite face lattice")
    if space.dimension <= 2:
        return ClosureReport("closed", reason="dimension two: extreme sets are always closed")
    wit = family.witness(count)
    face_ok = []
    for pts, u in zip(wit.faces, wit.normals):
        face_ok.append(bool(family.is_extreme(pts, normal=u)))
    upper = pk_upper_limit(list(wit.faces), resolution)
    lower = pk_lower_limit(list(wit.faces), resolution)
    dist = hausdorff_distance(wit.faces[-1], wit.limit)
    limit_extreme = family.is_extreme(wit.limit)
    details = {"witness_extreme": face_ok, "hausdorff_last": dist,
               "pk_upper_size": len(upper.points), "pk_lower_size": len(lower.points),
               "pk_agree": (not upper.empty and not lower.empty
                            and hausdorff_distance(upper.points, wit.limit) <= resolution
                            and hausdorff_distance(lower.points, wit.limit) <= resolution),
               "label": wit.label}
    if all(face_ok) and limit_extreme is False and dist <= resolution:
        return ClosureReport("not-closed", tuple(wit.faces), wit.limit,
                             "extreme sets converge to a set that is not extreme", details)
    return ClosureReport("inconclusive", tuple(wit.faces), wit.limit,
                         "witness could not be certified", details)
