"""Acceptance criteria 1-7, one test each; every test prints a pass/fail line."""
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from horofunc import examples
from horofunc._rational import dot
from horofunc.convexfn import (
    AffineOnPolytope,
    Conjugate,
    MaxAffine,
    lf_transform_dual,
    lf_transform_primal,
    lipschitz_check,
    min_eval,
    uniform_distance,
)
from horofunc.geometry import (
    convex_hull,
    enumerate_faces,
    exposed_face_chain,
    hausdorff_distance,
    is_extreme_set,
    polar,
    verify_chain,
)
from horofunc.horoboundary import (
    BusemannPoint,
    HoroEvidence,
    build_almost_geodesic,
    build_dual_horodata,
    check_extreme_closure,
    eval_busemann,
    identify_horofunction,
    limit_along_ray,
    verify_almost_geodesic,
    verify_min_decomposition,
)
from horofunc.normedspace import PhiFunction, phi_star_closed_form


def _exact_weights(rng, n: int) -> list:
    """Random positive rational weights summing to exactly 1."""
    raw = [Fraction(int(k)) for k in rng.integers(1, 100, size=n)]
    total = sum(raw)
    return [r / total for r in raw]


def _directions(d: int, count: int, seed: int) -> list[tuple]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        v = rng.integers(-9, 10, size=d)
        if np.any(v):
            out.append(tuple(Fraction(int(x), 3) for x in v))
    return out


def _random_rational_polytope(rng, d: int, n: int, den: int = 6):
    """Hull of random rational points; redrawn until 0 is interior."""
    while True:
        raw = rng.integers(-den, den + 1, size=(n, d))
        pts = [tuple(Fraction(int(v), den) for v in row) for row in raw]
        try:
            P = convex_hull(pts)
        except ValueError:
            continue
        if P.is_full_dimensional and all(b > 0 for _, b in P.facets):
            return P


# ---------------------------------------------------------------------------


def test_criterion_1_example2(report):
    t0 = time.perf_counter()
    space = examples.example2(128)
    fam = space.family
    probe = space.probe(radius=2.0)
    problems = []
    finals = {}
    for n in (1, 2, 5):
        xi = fam.xi(n)
        dists = [uniform_distance(PhiFunction(space, t * fam.p(n)), xi, probe) for t in (1e2, 1e3, 1e4)]
        finals[n] = dists[-1]
        if not (dists[0] > dists[1] > dists[2]):
            problems.append(f"n={n}: distances not decreasing {dists}")
        if dists[-1] > 1e-2:
            problems.append(f"n={n}: final distance {dists[-1]:.3g}")
    f, f1, f2 = fam.f(), fam.f1(), fam.f2()
    if not np.array_equal(min_eval(f1, f2)(probe.samples), f(probe.samples)):
        problems.append("min(f1, f2) != f on the probe")
    pairs = space.sample_pairs(10_000, seed=1)
    for name, g in (("f1", f1), ("f2", f2)):
        ok, worst = lipschitz_check(g, space.metric, pairs)
        if not ok:
            problems.append(f"{name} not 1-Lipschitz (worst ratio {worst})")
    ev = fam.evidence()
    evidence = HoroEvidence(tuple(ev["approximants"]), ev["decomposition"])
    c = identify_horofunction(space, f, evidence, probe=probe, pairs=pairs)
    dom = [tuple(float(x) for x in q) for q in c.domain]
    if c.kind != "horofunction-not-busemann" or dom != [(-1.0, 0.0, 0.0)] \
            or fam.is_extreme(dom) is not False:
        problems.append(f"classification {c.kind} with domain {dom}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60:
        problems.append(f"runtime {elapsed:.1f}s")
    ok = not problems
    report(1, ok, f"example2 space: final distances {', '.join(f'n={k}: {v:.2e}' for k, v in finals.items())}; "
                  f"{c.kind}; {elapsed:.1f}s" + ("" if ok else f"; {problems}"))
    assert ok, problems


def test_criterion_2_example3(report):
    t0 = time.perf_counter()
    space = examples.example3(16)
    fam = space.family
    problems = []
    phis = np.linspace(0, 2 * math.pi, 2001)
    circle_pts = []
    for fixed, free, vals in fam.circles():
        Q = np.zeros((len(phis), 4))
        Q[:, fixed[0]], Q[:, fixed[1]] = vals
        Q[:, free[0]], Q[:, free[1]] = np.cos(phis), np.sin(phis)
        circle_pts.append(Q)
    circle_pts = np.vstack(circle_pts)
    for theta in (0.1, 0.5, 1.0):
        ft = fam.f_theta(theta)
        top = float(np.max(circle_pts @ ft))
        on_t = fam.t_theta(theta) @ ft
        if top > 1 + 1e-9:
            problems.append(f"theta={theta}: f_theta reaches {top}")
        if np.max(np.abs(on_t - 1)) > 1e-9:
            problems.append(f"theta={theta}: f_theta != 1 on T_theta")
    worst_ratio = 0.0
    for theta in (0.1, 0.05, 0.01, 1e-3):
        h = hausdorff_distance(fam.t_theta(theta), fam.limit_triangle)
        worst_ratio = max(worst_ratio, h / theta)
        if h > 2 * theta:
            problems.append(f"theta={theta}: Hausdorff {h}")
    if fam.is_extreme(fam.limit_triangle) is not False:
        problems.append("limit triangle reported extreme")
    probe = space.probe(radius=2.0, density=9)
    pairs = space.sample_pairs(10_000, seed=2)
    cert = verify_min_decomposition(space, fam.g(), fam.g1(), fam.g2(), probe, pairs)
    if not cert.valid:
        problems.append(cert.reason)
    elapsed = time.perf_counter() - t0
    if elapsed >= 120:
        problems.append(f"runtime {elapsed:.1f}s")
    ok = not problems
    report(2, ok, f"example3 space: max Hausdorff/theta {worst_ratio:.3f}; limit triangle not extreme; "
                  f"min-decomposition {cert.reason}; {elapsed:.1f}s" + ("" if ok else f"; {problems}"))
    assert ok, problems


def _ray_busemann_check(space, directions, probe, tol=1e-6):
    bad = []
    for d in directions:
        ray = limit_along_ray(space, d, probe=probe)
        if not ray.converged:
            bad.append((d, ray.report))
            continue
        c = identify_horofunction(space, ray.limit, probe=probe)
        if c.kind != "busemann":
            bad.append((d, c.kind))
            continue
        err = float(np.max(np.abs(eval_busemann(BusemannPoint(c.horodata), probe.samples) - ray.values)))
        if err > tol:
            bad.append((d, f"mismatch {err:.3g}"))
    return bad


def test_criterion_3_polyhedral_closure(report):
    spaces = [examples.l1(2), examples.linf(2), examples.l1(3), examples.linf(3)]
    spaces += [examples.random_polytope_ball(3, 10, seed=s) for s in range(3)]
    spaces += [examples.random_polytope_ball(4, 10, seed=s) for s in range(2)]
    problems = []
    for k, space in enumerate(spaces):
        verdict = check_extreme_closure(space).verdict
        if verdict != "closed":
            problems.append(f"{space.name}: {verdict}")
        probe = space.probe(radius=2.0)
        bad = _ray_busemann_check(space, _directions(space.dimension, 50, seed=100 + k), probe)
        problems += [f"{space.name}: {b}" for b in bad]
    ok = not problems
    report(3, ok, f"{len(spaces)} polyhedral spaces closed; {50 * len(spaces)} ray limits Busemann "
                  f"within 1e-6" + ("" if ok else f"; {problems[:5]}"))
    assert ok, problems


def test_criterion_4_almost_geodesics(report):
    space = examples.linf(3)
    probe = space.probe(radius=2.0)
    faces = [F for F in enumerate_faces(space.dual) if not F.is_whole]
    rng = np.random.default_rng(4)
    p_rand = tuple(Fraction(int(v), 7) for v in rng.integers(-14, 15, size=3))
    problems = []
    worst_eps = worst_dist = 0.0
    for F in faces:
        for p in ((0, 0, 0), p_rand):
            ag = build_almost_geodesic(space, F, p, n_points=2000)
            rep = verify_almost_geodesic(space, ag, budget=2.0)
            target = BusemannPoint(build_dual_horodata(space, F, p))
            dist = uniform_distance(PhiFunction(space, ag.points[-1]), target, probe)
            worst_eps, worst_dist = max(worst_eps, rep.minimal_epsilon), max(worst_dist, dist)
            if not rep.passed or rep.minimal_epsilon > 2 + 1e-6:
                problems.append(f"face {F.vertices}, p={p}: epsilon {rep.minimal_epsilon}")
            if dist > 1e-3:
                problems.append(f"face {F.vertices}, p={p}: distance {dist}")
    ok = len(faces) == 26 and not problems
    report(4, ok, f"{len(faces)} faces x 2 base points at N=2000: max minimal epsilon {worst_eps:.3g}, "
                  f"max probe distance {worst_dist:.3g}" + ("" if ok else f"; {problems[:5]}"))
    assert ok, problems


def test_criterion_5_convex_kernel(report):
    rng = np.random.default_rng(5)
    problems = []
    # LF involution on random affine functions over random polytopes
    for _ in range(100):
        d = int(rng.integers(1, 4))
        pts = [tuple(Fraction(int(v), 4) for v in rng.integers(-8, 9, size=d))
               for _ in range(int(rng.integers(d + 1, d + 6)))]
        try:
            D = convex_hull(pts)
        except ValueError:
            D = convex_hull([tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
                            + [(Fraction(0),) * d])
        h = AffineOnPolytope(D, tuple(Fraction(int(v), 3) for v in rng.integers(-6, 7, size=d)),
                             Fraction(int(rng.integers(-5, 6)), 2))
        back = lf_transform_primal(lf_transform_dual(h))
        if any(back(v) != h.exact(v) for v in D.vertices):
            problems.append("LF involution mismatch")
    # closed-form phi* against the generic transform
    spaces = [examples.linf(2), examples.l1(3)] + [examples.random_polytope_ball(d, 8, seed=s)
                                                     for d in (2, 3) for s in range(3)]
    worst = 0.0
    for k in range(100):
        space = spaces[k % len(spaces)]
        d = space.dimension
        z = tuple(Fraction(int(v), 5) for v in rng.integers(-15, 16, size=d))
        closed = phi_star_closed_form(space, z)
        conj = Conjugate(PhiFunction(space, z).to_max_affine())
        V = space.dual.vertices
        w = _exact_weights(rng, len(V))
        inner = tuple(sum(wi * v[i] for wi, v in zip(w, V)) for i in range(d))
        for q in list(V[:4]) + [inner]:
            worst = max(worst, abs(float(conj(q)) - float(closed.exact(q))))
        outside = tuple(2 * x for x in V[0])
        if conj(outside) != math.inf or closed.exact(outside) != math.inf:
            problems.append("phi* finite outside the dual ball")
    if worst > 1e-9:
        problems.append(f"phi* mismatch {worst}")
    # Fenchel-Young on 10^4 pairs, equality at LP subgradients
    space = examples.random_polytope_ball(3, 9, seed=7)
    f = PhiFunction(space, (Fraction(1, 2), Fraction(-1, 3), Fraction(1))).to_max_affine()
    conj = Conjugate(f)
    V = space.dual.vertices
    X = space.sample_points(100, seed=5)
    fx = f(X)
    gap_min = math.inf
    eq_worst = Fraction(0)
    for _ in range(100):
        w = _exact_weights(rng, len(V))
        q = tuple(sum(wi * v[i] for wi, v in zip(w, V)) for i in range(3))
        res = conj.query(q)
        qf = np.array([float(x) for x in q])
        gap_min = min(gap_min, float(np.min(fx + float(res.value) - X @ qf)))
        x_star = res.witness
        eq_worst = max(eq_worst, abs(f.exact(x_star) + res.value - dot(q, x_star)))
    if gap_min < -1e-9:
        problems.append(f"Fenchel-Young violated by {gap_min}")
    if eq_worst != 0:
        problems.append(f"Fenchel-Young equality off by {eq_worst}")
    ok = not problems
    report(5, ok, f"LF involution exact on 100 instances; phi* max deviation {worst:.2e}; "
                  f"Fenchel-Young min gap {gap_min:.2e} on 10^4 pairs, exact equality at LP subgradients"
                  + ("" if ok else f"; {problems[:5]}"))
    assert ok, problems


def _segment_violation(V: np.ndarray, eqs: np.ndarray, subset: list[int], rng, samples: int = 8) -> bool:
    """Sampled segment test: a segment of C through a relative-interior point of
    conv(subset) extending to a vertex of C outside the subset."""
    S = V[subset]
    outside = [j for j in range(len(V)) if j not in set(subset)]
    for _ in range(samples):
        e = rng.dirichlet(np.ones(len(S))) @ S
        for j in outside:
            b = e + 1e-3 * (e - V[j])
            if np.all(eqs[:, :-1] @ b + eqs[:, -1] <= 1e-9):
                return True
    return False


def test_criterion_6_geometry_kernel(report):
    rng = np.random.default_rng(6)
    problems = []
    for _ in range(50):
        d = int(rng.integers(2, 5))
        P = _random_rational_polytope(rng, d, int(rng.integers(d + 2, d + 8)))
        if polar(polar(P)).vertices != P.vertices or set(polar(polar(P)).facets) != set(P.facets):
            problems.append("polar involution failed")
    checked_faces = checked_other = chains = 0
    for _ in range(10):
        d = int(rng.integers(2, 4))
        C = _random_rational_polytope(rng, d, int(rng.integers(d + 2, 9)))
        V = C.vertex_array
        eqs = ConvexHull(V).equations
        faces = enumerate_faces(C)
        face_sets = {F.vertices for F in faces}
        for F in faces:
            checked_faces += 1
            if not is_extreme_set(C, list(F.points)) or _segment_violation(V, eqs, list(F.vertices), rng):
                problems.append(f"face {F.vertices} disagrees")
            for maximal in (False, True):
                chains += 1
                if not verify_chain(exposed_face_chain(C, F, maximal=maximal)):
                    problems.append(f"chain certificate for {F.vertices} failed")
        found = 0
        while found < 100:
            k = int(rng.integers(1, len(V)))
            subset = sorted(int(i) for i in rng.choice(len(V), size=k, replace=False))
            if tuple(subset) in face_sets:
                continue
            found += 1
            checked_other += 1
            pts = [C.vertices[i] for i in subset]
            if is_extreme_set(C, pts) or not _segment_violation(V, eqs, subset, rng):
                problems.append(f"non-face {subset} disagrees")
    ok = not problems
    report(6, ok, f"polar involution exact on 50 polytopes; extremality agrees with segment checks on "
                  f"{checked_faces} faces and {checked_other} non-faces; {chains} chain certificates verified"
                  + ("" if ok else f"; {problems[:5]}"))
    assert ok, problems


def test_criterion_7_dimension_two(report):
    spaces = [examples.random_polytope_ball(2, int(6 + s % 5), seed=200 + s) for s in range(10)]
    spaces.append(examples.euclid(64))
    problems = []
    total = 0
    for k, space in enumerate(spaces):
        probe = space.probe(radius=2.0)
        dirs = _directions(2, 50, seed=300 + k) + list(space.ball.vertices) + \
            [tuple(a) for a, _ in space.ball.facets]
        total += len(dirs)
        problems += [f"{space.name}: {b}" for b in _ray_busemann_check(space, dirs, probe)]
    ok = not problems
    report(7, ok, f"{len(spaces)} planar balls (10 random + 64-gon): {total} ray limits all Busemann"
                  + ("" if ok else f"; {problems[:5]}"))
    assert ok, problems
