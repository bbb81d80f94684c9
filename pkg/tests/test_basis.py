#!/usr/bin/env python
# -*- coding:utf-8 -*-

import math

import numpy as np
import pytest

from ballcalc.basis import (
    BallBasis,
    GridBasis,
    d_of,
    dyadic_basis,
    exhaustion,
    greedy_cover,
    martingale_basis,
    random_partition_tree,
    validate_axioms,
)
from ballcalc.errors import BasisError
from ballcalc.space import MeasureSpace, PointSet


def test_dyadic_layout(dyadic2):
    assert dyadic2.count == 7
    assert dyadic2.space.size == 4
    assert list(dyadic2.members_of(dyadic2.id_of(1, 1))) == [2, 3]
    assert dyadic2.ball(dyadic2.id_of(2, 3)).measure == 0.25
    assert dyadic2.hull(dyadic2.id_of(2, 0)).id == dyadic2.id_of(1, 0)


def test_dyadic_axioms_and_constants(dyadic4):
    report = validate_axioms(dyadic4)
    assert report.passed
    assert report.constants["K"] == 2
    assert report.constants["beta"] == 2
    assert report.constants["eta_bs"] == 1


def test_dyadic_levels_are_bounded():
    with pytest.raises(BasisError):
        dyadic_basis(25)


def test_grid_axioms():
    report = validate_axioms(GridBasis(1, 16))
    assert report.passed
    assert report.constants["theta"] > 0


def test_broken_hull_is_reported(dyadic2):
    # every ball its own hull: the sibling of a leaf escapes
    broken = dyadic2.with_hull(range(dyadic2.count))
    report = validate_axioms(broken)
    assert not report.passed
    assert not report["B4"].passed


def test_broken_hull_away_from_the_origin_is_reported():
    b = GridBasis(1, 16)
    assert validate_axioms(b)["B4"].passed
    hulls = np.array(b.hull_ids)
    ball = b.id_of(5, 1)
    hulls[ball] = ball
    report = validate_axioms(b.with_hull(hulls))
    assert not report["B4"].passed
    assert report["B4"].witness[0] == ball


def test_martingale_basis_from_random_partitions():
    space, levels = random_partition_tree(12, 0)
    b = martingale_basis(levels, space=space)
    report = validate_axioms(b)
    for check in ("B1", "B2", "B4"):
        assert report[check].passed
    assert b.space.total == pytest.approx(1)


def test_repeated_blocks_are_kept_once():
    b = martingale_basis([[[0, 1]], [[0, 1]], [[0], [1]]])
    assert b.count == 3


def test_non_nested_partitions_are_rejected():
    with pytest.raises(BasisError):
        martingale_basis([[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1, 2], [3]], [[0], [1], [2], [3]]])


def test_exhaustion_walks_up_to_the_whole_space():
    _, b = dyadic_basis(3)
    sequence = exhaustion(b, b.id_of(3, 0))
    assert sequence.ids == [b.id_of(3, 0), b.id_of(2, 0), b.id_of(1, 0), 0]
    assert sequence.min_growth == 2
    assert sequence.beta == 2


def test_greedy_cover_picks_large_disjoint_balls(dyadic2):
    cover = [dyadic2.id_of(1, 0)] + [dyadic2.id_of(2, j) for j in range(4)]
    picked = greedy_cover(dyadic2, dyadic2.space.everything(), cover)
    assert [ball.id for ball in picked] == [dyadic2.id_of(1, 0), dyadic2.id_of(2, 2), dyadic2.id_of(2, 3)]


def test_greedy_cover_needs_a_cover(dyadic2):
    with pytest.raises(BasisError):
        greedy_cover(dyadic2, dyadic2.space.everything(), [dyadic2.id_of(2, 0)])


def test_distance_to_a_ball(dyadic2):
    leaf = dyadic2.id_of(2, 0)
    assert d_of(0, leaf, dyadic2) == 0.25
    assert d_of(1, leaf, dyadic2) == 0.5
    assert d_of(3, leaf, dyadic2) == 1


def test_euclidean_grid_balls_reach_the_whole_torus():
    b = GridBasis(2, 8, shape="ball")
    assert b.top_radius == 6
    assert b.sizes[b.id_of(0, b.top_radius)] == 64
    assert GridBasis(2, 8).top_radius == 4


@pytest.mark.parametrize("levels", range(1, 11))
def test_dyadic_hulls_double_exactly(levels):
    report = validate_axioms(dyadic_basis(levels)[1])
    for check in ("B1", "B2", "B4"):
        assert report[check].passed
    assert report.constants["K"] == 2


@pytest.mark.parametrize("n, shape", [(8, "cube"), (16, "cube"), (8, "ball")])
def test_planar_grid_axioms(n, shape):
    report = validate_axioms(GridBasis(2, n, shape=shape))
    for check in ("B1", "B2", "B4"):
        assert report[check].passed


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_random_martingale_axioms(seed):
    space, levels = random_partition_tree(16, seed)
    report = validate_axioms(martingale_basis(levels, space=space))
    for check in ("B1", "B2", "B4"):
        assert report[check].passed


def test_greedy_cover_of_three_quarters(dyadic2):
    e = PointSet(dyadic2.space, [0, 1, 2])
    cover = [dyadic2.id_of(1, 0), dyadic2.id_of(2, 0), dyadic2.id_of(2, 2)]
    picked = greedy_cover(dyadic2, e, cover)
    assert [ball.id for ball in picked] == [dyadic2.id_of(1, 0), dyadic2.id_of(2, 2)]
    assert [ball.id for ball in greedy_cover(dyadic2, e, [0])] == [0]


def test_greedy_cover_on_random_covers(rng):
    b = GridBasis(1, 32)
    for _ in range(100):
        cover = rng.choice(b.count, size=20, replace=False)
        e = PointSet.from_mask(b.space, b.membership[cover].any(axis=0))
        picked = [ball.id for ball in greedy_cover(b, e, cover)]
        assert set(picked) <= set(cover.tolist())
        assert b.membership[picked].sum(axis=0).max() == 1
        assert b.membership[b.hull_ids[picked]].any(axis=0)[e.indices].all()


def test_exhaustion_on_the_grid():
    b = GridBasis(1, 16)
    for center in (0, 5, 11):
        sequence = exhaustion(b, b.id_of(center, 1))
        assert b.sizes[sequence.ids[-1]] == 16
        assert sequence.min_growth >= 2
        assert 2 <= sequence.beta < math.inf
    whole = b.full_ids[0]
    assert exhaustion(b, whole).ids == [whole]


def test_distance_grows_with_the_ball():
    for b in (dyadic_basis(4)[1], GridBasis(1, 16)):
        rows = b.distance_rows(range(b.count))
        for ball in range(b.count):
            for larger in b.superset_ids(ball):
                outside = ~b.membership[larger]
                assert np.all(rows[larger][outside] >= rows[ball][outside])


def test_distance_without_a_common_ball():
    space = MeasureSpace.uniform(2)
    b = BallBasis(space, [[0], [1]], [0, 1])
    assert d_of(1, 0, b, flag=True) == (math.inf, False)
    assert d_of(0, 0, b, flag=True) == (0.5, True)
    assert d_of(1, 0, b) == math.inf
