#!/usr/bin/env python
# -*- coding:utf-8 -*-

import numpy as np
import pytest

from ballcalc.basis import BallBasis, martingale_basis, random_partition_tree
from ballcalc.errors import QueryError, SpaceError
from ballcalc.functional import (
    OscillationQuery,
    avg,
    elementary_norm_inequalities,
    exhaustive_losc_alpha,
    exhaustive_osc_alpha,
    losc_alpha,
    losc_alpha_all,
    norm,
    osc_alpha,
    osc_alpha_all,
    osc_set,
    sharp,
    starred_avg,
    starred_sharp,
    starred_sharp_all,
)
from ballcalc.space import MeasureSpace


def test_alpha_oscillations_on_four_points(dyadic2):
    f = dyadic2.space.field([0, 1, 2, 5])
    q = OscillationQuery(f, 0, dyadic2, 0.5)
    assert osc_alpha(q) == 2
    assert losc_alpha(q) == 2
    g = dyadic2.space.field([0, 10, 11, 12])
    q = OscillationQuery(g, 0, dyadic2, 0.5)
    assert osc_alpha(q) == 2
    assert losc_alpha(q) == 11


def test_alpha_must_lie_strictly_inside(dyadic2):
    f = dyadic2.space.constant(0)
    for alpha in (0, 1, 1.5):
        with pytest.raises(QueryError):
            OscillationQuery(f, 0, dyadic2, alpha)


def test_oscillation_of_a_set(dyadic2):
    f = dyadic2.space.field([3, -1, 2, 0])
    assert osc_set(f, dyadic2.space.point_set([0, 1])) == (3, -1, 4)
    with pytest.raises(SpaceError):
        osc_set(f, dyadic2.space.empty())


def test_sorted_scan_matches_the_subset_oracle(rng):
    space, levels = random_partition_tree(10, 3)
    b = martingale_basis(levels, space=space)
    f = space.field(np.round(rng.normal(size=10), 1))
    for ball in range(b.count):
        for alpha in (0.3, 0.5, 0.75, 0.9):
            q = OscillationQuery(f, ball, b, alpha)
            assert osc_alpha(q) == pytest.approx(exhaustive_osc_alpha(q))
            assert losc_alpha(q) == pytest.approx(exhaustive_losc_alpha(q))


def test_per_ball_tables_match_the_queries(dyadic4, rng):
    f = dyadic4.space.field(rng.normal(size=16))
    oscs = osc_alpha_all(f, dyadic4, 0.75)
    loscs = losc_alpha_all(f, dyadic4, 0.75)
    for ball in range(dyadic4.count):
        q = OscillationQuery(f, ball, dyadic4, 0.75)
        assert oscs[ball] == osc_alpha(q)
        assert loscs[ball] == losc_alpha(q)


def test_averages_of_an_indicator(dyadic2):
    f = dyadic2.space.field([1, 1, 0, 0])
    assert avg(f, 0, dyadic2) == 0.5
    assert sharp(f, 0, dyadic2) == 0.5
    assert sharp(f, dyadic2.id_of(1, 0), dyadic2) == 0
    assert starred_sharp(f, dyadic2.id_of(2, 0), dyadic2) == 0.5
    assert starred_avg(f, dyadic2.id_of(2, 3), dyadic2) == 0.5
    assert starred_sharp_all(f, dyadic2)[dyadic2.id_of(2, 0)] == 0.5


def test_constant_fields_have_exact_means(dyadic4):
    f = dyadic4.space.constant(0.1)
    assert avg(f, 0, dyadic4) == 0.1
    assert norm(f, dyadic4, "BMO").value == 0
    assert norm(f, dyadic4, "BLO").value == 0


def test_norms_of_an_indicator(dyadic2):
    f = dyadic2.space.field([1, 1, 0, 0])
    bmo = norm(f, dyadic2, "BMO")
    assert bmo.value == 0.5
    assert bmo.witness == 0
    assert norm(f, dyadic2, "BLO").value == 0.5
    assert norm(f, dyadic2, "BMO_alpha", 0.75).value == 1


def test_norm_requests_are_checked(dyadic2):
    f = dyadic2.space.constant(1)
    with pytest.raises(QueryError):
        norm(f, dyadic2, "BMO_beta")
    with pytest.raises(QueryError):
        norm(f, dyadic2, "BLO_alpha")


def test_elementary_inequalities_hold(dyadic4, rng):
    for values in (rng.normal(size=16), rng.exponential(size=16), np.arange(16.0)):
        f = dyadic4.space.field(values)
        for alpha in (0.3, 0.75):
            for inequality in elementary_norm_inequalities(f, dyadic4, alpha):
                assert inequality.passed, inequality


def test_sorted_scan_equals_the_subset_oracle_on_random_spaces(rng):
    # dyadic weights and thresholds keep every mass comparison exact
    for _ in range(200):
        n = int(rng.integers(1, 13))
        space = MeasureSpace(rng.integers(1, 9, size=n) / 64.0)
        members = [np.arange(n)] + [
            rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False) for _ in range(2)
        ]
        b = BallBasis(space, members, [0] * len(members))
        f = space.field(rng.integers(-6, 7, size=n) / 4.0)
        for ball in range(b.count):
            for alpha in (0.125, 0.25, 0.5, 0.625, 0.875):
                q = OscillationQuery(f, ball, b, alpha)
                assert osc_alpha(q) == exhaustive_osc_alpha(q)
                assert losc_alpha(q) == exhaustive_losc_alpha(q)


def test_lower_oscillation_dominates(dyadic4, rng):
    for _ in range(100):
        f = dyadic4.space.field(rng.normal(size=16))
        for _ in range(10):
            q = OscillationQuery(f, int(rng.integers(dyadic4.count)), dyadic4, rng.uniform(0.05, 0.95))
            assert osc_alpha(q) <= losc_alpha(q)


def test_oscillations_ignore_shifts_and_follow_scales(dyadic4, rng):
    values = rng.integers(-10, 11, size=16).astype(float)
    f = dyadic4.space.field(values)
    shifted = dyadic4.space.field(values + 3)
    scaled = dyadic4.space.field(2.5 * values)
    for table in (osc_alpha_all, losc_alpha_all):
        assert list(table(shifted, dyadic4, 0.75)) == list(table(f, dyadic4, 0.75))
        assert table(scaled, dyadic4, 0.75) == pytest.approx(2.5 * table(f, dyadic4, 0.75))
    for kind in ("BMO", "BLO", "BMO_alpha", "BLO_alpha"):
        value = norm(f, dyadic4, kind, 0.75).value
        assert norm(shifted, dyadic4, kind, 0.75).value == pytest.approx(value)
        assert norm(scaled, dyadic4, kind, 0.75).value == pytest.approx(2.5 * value)


def test_oscillations_grow_with_alpha(dyadic4, rng):
    f = dyadic4.space.field(rng.normal(size=16))
    alphas = (0.1, 0.3, 0.5, 0.7, 0.9)
    for table in (osc_alpha_all, losc_alpha_all):
        tables = [table(f, dyadic4, alpha) for alpha in alphas]
        for lower, upper in zip(tables, tables[1:]):
            assert np.all(lower <= upper)
