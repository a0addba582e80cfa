import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_instance
from phiconv import boundary as bd
from phiconv import phi_space as ps
from phiconv import points
from phiconv.errors import EmptySet, HypothesisViolated, NotSubset
from phiconv.ground import build_ground_set


@pytest.fixture
def two_point():
    return ps.indicators(build_ground_set(points=[[0.0], [1.0]]))


def gens(poly):
    return sorted(tuple(float(v) + 0.0 for v in g.vector.coords) for g in poly.generators)


def test_dual_ball_cross_polytope(two_point):
    assert gens(bd.dual_ball(two_point)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_dual_ball_affine_line(line_affine):
    assert gens(bd.dual_ball(line_affine)) == sorted([(1, 0), (1, 1), (1, 2), (-1, 0), (-1, -1), (-1, -2)])


def test_dual_ball_warnings(line3):
    with pytest.warns(UserWarning):
        bd.dual_ball(ps.linear(line3))
    with pytest.warns(UserWarning):
        bd.dual_ball(ps.constants_only(line3))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bd.dual_ball(ps.affine(line3))


def test_dual_ball_empty(line_affine):
    with pytest.raises(EmptySet):
        bd.dual_ball(line_affine, [])


def test_support_identity(line_affine, rng):
    poly = bd.dual_ball(line_affine)
    for c in rng.standard_normal((50, 2)):
        assert poly.support(c) == pytest.approx(ps.sup_norm(line_affine, c), abs=1e-12)


def test_choquet_examples(line_affine, two_point, rng):
    assert list(bd.choquet_boundary(bd.dual_ball(line_affine))) == [0, 2]
    g = build_ground_set(points=rng.uniform(0, 1, (6, 2)))
    assert list(bd.choquet_boundary(bd.dual_ball(ps.indicators(g)))) == list(range(6))
    assert list(bd.choquet_boundary(bd.dual_ball(line_affine, [1]))) == [1]


def test_norming_examples(line_affine):
    poly = bd.dual_ball(line_affine)
    assert bd.is_norming_subset(poly, [0, 1, 2])
    assert bd.is_norming_subset(poly, [0, 2])
    assert not bd.is_norming_subset(poly, [0, 1])
    with pytest.raises(EmptySet):
        bd.is_norming_subset(poly, [])
    with pytest.raises(NotSubset):
        bd.is_norming_subset(bd.dual_ball(line_affine, [0, 1]), [2])


def test_norming_matches_sup_norm_definition(line_affine, rng):
    # [0, 1] fails: phi(x) = x - 0.5 has sup 1.5 on K but 0.5 on {0, 1}
    c = np.array([-0.5, 1.0])
    assert ps.sup_norm(line_affine, c, [0, 1]) < ps.sup_norm(line_affine, c)


def test_shilov_examples(line_affine, rng):
    poly = bd.dual_ball(line_affine)
    S = bd.shilov_boundary(poly)
    assert list(S) == [0, 2] and bd.is_norming_subset(poly, S)
    g = build_ground_set(points=rng.uniform(0, 1, (5, 2)))
    assert list(bd.shilov_boundary(bd.dual_ball(ps.indicators(g)))) == list(range(5))
    assert list(bd.shilov_boundary(bd.dual_ball(line_affine, [2]))) == [2]


def test_shilov_requires_hypotheses(line3):
    with pytest.warns(UserWarning):
        poly = bd.dual_ball(ps.linear(line3))
    with pytest.raises(HypothesisViolated):
        bd.shilov_boundary(poly)
    g = build_ground_set(points=[[-1.0], [1.0]])
    with pytest.warns(UserWarning):
        poly = bd.dual_ball(ps.table(g, [[1.0, 1.0], [2.0, 2.0]]))
    with pytest.raises(HypothesisViolated):
        bd.shilov_boundary(poly)


def test_weakstar_examples(line_affine, two_point):
    ws = bd.weakstar_exposed_generators(bd.dual_ball(line_affine))
    assert ws.labels() == {(1, 0), (-1, 0), (1, 2), (-1, 2)}
    assert ws.labels() == {(s, k) for k in points.exposed_set(line_affine) for s in (1, -1)}
    assert len(bd.weakstar_exposed_generators(bd.dual_ball(two_point)).exposed) == 4
    single = bd.weakstar_exposed_generators(bd.dual_ball(line_affine, [1]))
    assert single.labels() == {(1, 1), (-1, 1)}


def test_weakstar_degenerate_generators(line3):
    # linear dictionary through the origin: delta_0 = 0 = -delta_0
    with pytest.warns(UserWarning):
        poly = bd.dual_ball(ps.linear(line3))
    ws = bd.weakstar_exposed_generators(poly)
    assert ("+0", "-0") in ws.degenerate


@given(st.integers(0, 10_000))
def test_boundary_identities(seed):
    inst = random_instance(seed, constants=True, n_range=(5, 15))
    poly = bd.dual_ball(inst.space, inst.K)
    exp = points.exposed_set(inst.space, inst.K)
    sh = bd.shilov_boundary(poly)
    assert sh == bd.choquet_boundary(poly)
    assert sh.as_set() == exp.as_set()
    assert bd.weakstar_exposed_generators(poly).labels() == {(s, k) for k in exp for s in (1, -1)}


@given(st.integers(0, 10_000))
def test_norming_monotone_and_minimal(seed):
    inst = random_instance(seed, constants=True, n_range=(5, 12))
    poly = bd.dual_ball(inst.space, inst.K)
    sh = bd.shilov_boundary(poly)
    rng = np.random.default_rng(seed)
    bigger = set(sh) | set(rng.choice(list(inst.K), min(2, len(inst.K))).tolist())
    assert bd.is_norming_subset(poly, sorted(bigger))
    if len(sh) > 1:
        for k in sh:
            assert not bd.is_norming_subset(poly, [y for y in sh if y != k])
