import math
from fractions import Fraction

import numpy as np
import pytest

from horofunc import examples
from horofunc.convexfn import (
    AffineOnPolytope,
    ConvexFnError,
    MaxAffine,
    lf_transform_dual,
    lf_transform_primal,
    lipschitz_check,
    min_eval,
    uniform_distance,
)
from horofunc.geometry import convex_hull
from horofunc.normedspace import PhiFunction, phi_star_closed_form

F = Fraction
CROSS = convex_hull([(1, 0), (-1, 0), (0, 1), (0, -1)])


def test_max_affine_evaluation_and_ties():
    f = MaxAffine([((1, 0), 0), ((-1, 0), 0), ((0, 1), 1)])
    assert f([2.0, 0.0]) == 2.0
    assert f.exact((0, -1)) == 0
    assert f.active((0, -1)) == (0, 1, 2)


def test_reduced_merges_duplicate_gradients():
    f = MaxAffine([((1, 0), 0), ((1, 0), -1), ((-1, 0), 0)])
    r = f.reduced()
    assert len(r.pieces) == 2 and ((1, 0), 0) in r.pieces


def test_lf_dual_of_indicator_is_support():
    h = AffineOnPolytope(CROSS, (0, 0), 0)
    f = lf_transform_dual(h)
    assert f.exact((3, -2)) == 3


def test_lf_primal_grid_sup_oracle():
    # f*(q) = sup_x <q,x> - f(x), estimated by brute force on a fine grid
    f = MaxAffine([((1, 0), 0), ((0, 1), F(1, 2)), ((-1, -1), 1)])
    conj = lf_transform_primal(f)
    g = np.linspace(-30, 30, 601)
    X = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    fx = f(X)
    for q in [(F(1, 3), F(1, 3)), (F(0), F(1, 2)), (F(-1, 2), F(-1, 4))]:
        grid_sup = float(np.max(X @ np.array(q, dtype=float) - fx))
        assert abs(float(conj(q)) - grid_sup) < 1e-6
    assert conj((F(2), F(0))) == math.inf


def test_lf_primal_domain_and_affinity():
    f = MaxAffine([((1, 0), 0), ((0, 1), 0)])
    conj = lf_transform_primal(f)
    assert set(conj.domain.vertices) == {(1, 0), (0, 1)}
    assert conj.is_affine
    # three affinely independent gradients always admit an affine fit
    assert lf_transform_primal(MaxAffine([((1, 0), 0), ((-1, 0), 0), ((0, 1), -1)])).is_affine
    h = MaxAffine([((1, 0), 0), ((-1, 0), 0), ((0, 1), 0), ((0, -1), -1)])
    assert not lf_transform_primal(h).is_affine


def test_lf_primal_rejects_gradient_outside_dual():
    with pytest.raises(ConvexFnError):
        lf_transform_primal(MaxAffine([((2, 0), 0)]), CROSS)


def test_phi_star_linf_example():
    space = examples.linf(2)
    h = phi_star_closed_form(space, (1, 0))
    assert h.gradient == (1, 0) and h.offset == 1
    assert set(h.domain.vertices) == set(CROSS.vertices)
    conj = lf_transform_primal(PhiFunction(space, (1, 0)).to_max_affine())
    for q in [(0, 0), (F(1, 2), F(1, 4)), (-1, 0), (0, 1)]:
        assert conj(q) == h.exact(q)
    assert h.infimum() == 0


def test_phi_star_zero_is_indicator():
    space = examples.l1(3)
    h = phi_star_closed_form(space, (0, 0, 0))
    assert all(v == 0 for v in h.vertex_values())


def test_uniform_distance_and_min():
    space = examples.linf(2)
    probe = space.probe(density=9, n_random=50)
    f = MaxAffine([((1, 0), 0)])
    assert uniform_distance(f, f, probe) == 0
    assert uniform_distance(min_eval(f, f), f, probe) == 0


def test_lipschitz_orientation_asymmetric():
    space = examples.random_polytope_ball(2, 7, seed=3)
    pairs = space.sample_pairs(500, seed=0)
    for v in space.dual.vertices:
        assert lipschitz_check(MaxAffine([(v, 0)]), space.metric, pairs)[0]
    outside = tuple(2 * x for x in space.dual.vertices[0])
    assert not lipschitz_check(MaxAffine([(outside, 0)]), space.metric, pairs)[0]


def test_probe_csv(tmp_path):
    space = examples.linf(2)
    probe = space.probe(density=5, n_random=10).with_values(lambda X: X[:, 0])
    probe.to_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "x1,x2,f" and len(lines) == len(probe.samples) + 1
