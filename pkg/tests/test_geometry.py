from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from horofunc.geometry import (
    GeometryError,
    convex_hull,
    enumerate_faces,
    exposed_face_chain,
    face_containing,
    from_hrep,
    hausdorff_distance,
    is_extreme_set,
    pk_lower_limit,
    pk_upper_limit,
    polar,
    verify_chain,
)
from horofunc.lp import linprog_exact

F = Fraction
SQUARE = [(-1, -1), (-1, 1), (1, -1), (1, 1)]
CUBE = [(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)]


def test_hull_drops_interior_points():
    P = convex_hull(SQUARE + [(0, 0), (F(1, 2), F(1, 3))])
    assert len(P.vertices) == 4
    assert len(P.facets) == 4


def test_hull_matches_scipy_volume_vertices():
    rng = np.random.default_rng(0)
    pts = [tuple(F(int(v), 5) for v in row) for row in rng.integers(-10, 11, size=(20, 3))]
    P = convex_hull(pts)
    ref = ConvexHull(np.array(pts, dtype=float))
    assert {tuple(float(x) for x in v) for v in P.vertices} == \
        {tuple(ref.points[i]) for i in ref.vertices}


def test_polar_of_square_is_cross_polytope():
    D = polar(convex_hull(SQUARE))
    assert set(D.vertices) == {(-1, 0), (1, 0), (0, -1), (0, 1)}


def test_polar_regular_polygon_closed_form():
    # polar of the polygon with vertices at radius 1 is the polygon with vertex
    # radius 1 / cos(pi / n), rotated by pi / n
    n = 6
    ang = np.arange(n) * 2 * np.pi / n
    pts = [(F(np.cos(a)).limit_denominator(10**6), F(np.sin(a)).limit_denominator(10**6)) for a in ang]
    D = polar(convex_hull(pts))
    radii = sorted(np.hypot(*np.array(D.vertices, dtype=float).T))
    assert np.allclose(radii, 1 / np.cos(np.pi / n), atol=1e-5)


def test_polar_involution_exact():
    P = convex_hull([(F(1), F(0)), (F(0), F(2)), (F(-3, 2), F(-1)), (F(1, 3), F(-2))])
    assert polar(polar(P)).vertices == P.vertices


def test_polar_requires_interior_origin():
    with pytest.raises(GeometryError):
        polar(convex_hull([(1, 1), (2, 1), (1, 2)]))


def test_from_hrep_cube():
    normals = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    P = from_hrep(normals, [1] * 6)
    assert set(P.vertices) == set(CUBE)


def test_face_counts():
    assert len(enumerate_faces(convex_hull(SQUARE))) == 9
    faces = enumerate_faces(convex_hull(CUBE))
    assert len(faces) == 27
    assert sorted(f.dim for f in faces).count(0) == 8


def test_extreme_sets_of_square():
    C = convex_hull(SQUARE)
    assert is_extreme_set(C, [(1, 1)])
    assert is_extreme_set(C, [(1, 1), (1, -1)])
    assert not is_extreme_set(C, [(1, 1), (-1, -1)])
    assert not is_extreme_set(C, [(1, 0)])


def test_segment_extremality_brute_force():
    # segment definition: E extreme iff no segment of C has an interior point in E
    # unless both endpoints lie in E; checked on a grid of rational segments
    C = convex_hull(SQUARE)
    grid = [(F(i, 2), F(j, 2)) for i in range(-2, 3) for j in range(-2, 3)]

    def brute(E):
        EP = convex_hull(E)
        for a in grid:
            for b in grid:
                if a == b:
                    continue
                mid = tuple((x + y) / 2 for x, y in zip(a, b))
                if EP.contains(mid) and not (EP.contains(a) and EP.contains(b)):
                    return False
        return True

    for E in ([(1, 1)], [(1, 1), (1, -1)], [(1, 1), (-1, -1)], [(1, 0)], [(0, 0)], SQUARE):
        assert brute(E) == is_extreme_set(C, E)


def test_chain_to_cube_vertex():
    C = convex_hull(CUBE)
    direct = exposed_face_chain(C, [(1, 1, 1)])
    assert len(direct) == 1 and verify_chain(direct)
    maximal = exposed_face_chain(C, [(1, 1, 1)], maximal=True)
    assert [f.dim for f in maximal.faces] == [3, 2, 1, 0]
    assert verify_chain(maximal)


def test_chain_facet_and_whole():
    C = convex_hull(CUBE)
    facet = [v for v in CUBE if v[0] == 1]
    assert len(exposed_face_chain(C, facet)) == 1
    assert len(exposed_face_chain(convex_hull(SQUARE), SQUARE)) == 0


def test_chain_rejects_non_extreme():
    with pytest.raises(GeometryError):
        exposed_face_chain(convex_hull(SQUARE), [(1, 1), (-1, -1)])


def test_face_containing_point():
    C = convex_hull(CUBE)
    assert face_containing(C, [(1, 0, 0)]).dim == 2


def test_hausdorff_examples():
    assert hausdorff_distance([[0, 0, 0]], [[1, 0, 0]]) == 1.0
    A = np.random.default_rng(1).normal(size=(10, 3))
    assert hausdorff_distance(A, A) == 0.0
    for n in (1, 4, 16, 64):
        p = [[np.cos(1 / n), np.sin(1 / n), 0]]
        assert hausdorff_distance(p, [[1, 0, 0]]) <= 1 / n


def test_pk_limits():
    C = np.array([[0.0, 0.0], [1.0, 1.0]])
    up, lo = pk_upper_limit([C] * 5), pk_lower_limit([C] * 5)
    assert hausdorff_distance(up.points, C) == 0 and hausdorff_distance(lo.points, C) == 0
    alt = [np.array([[0.0, 0.0]]) if k % 2 else np.array([[1.0, 0.0]]) for k in range(10)]
    assert len(pk_upper_limit(alt).points) == 2
    assert pk_lower_limit(alt).empty
    seq = [np.array([[np.cos(1 / n), np.sin(1 / n), 0]]) for n in 2 ** np.arange(14)]
    for est in (pk_upper_limit(seq), pk_lower_limit(seq)):
        assert hausdorff_distance(est.points, [[1, 0, 0]]) <= 1e-2


def test_lp_against_scipy():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.integers(-3, 4, size=(3, 6))
        x0 = rng.integers(0, 3, size=6)
        b = A @ x0
        c = rng.integers(-2, 5, size=6)
        res = linprog_exact(c.tolist(), A.tolist(), b.tolist())
        ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
        assert res.status == ("optimal" if ref.status == 0 else "unbounded")
        if ref.status == 0:
            assert abs(float(res.value) - ref.fun) < 1e-7


def test_lp_infeasible():
    assert linprog_exact([1, 1], [[1, 1]], [-1]).status == "infeasible"
