#!/usr/bin/env python
# -*- coding:utf-8 -*-

import numpy as np
import pytest

from ballcalc.errors import SpaceError
from ballcalc.space import (
    MeasureSpace,
    distribution,
    integrate,
    lp_norm,
    lp_norm_from_distribution,
    measure,
    read_field_csv,
    weak_lp_norm,
    write_field_csv,
)


def test_measure_sums_the_weights():
    space = MeasureSpace([1, 2, 3])
    assert measure(space.point_set([0, 2])) == 4
    assert measure(space, space.empty()) == 0
    assert space.total == 6


def test_integrate_is_the_weighted_sum():
    space = MeasureSpace([1, 2, 3])
    f = space.field([1, -1, 2])
    assert integrate(f) == 5
    assert integrate(f, space.point_set([1])) == -2


def test_nonpositive_weights_are_rejected():
    with pytest.raises(SpaceError):
        MeasureSpace([1, 0, 1])
    with pytest.raises(SpaceError):
        MeasureSpace([])


def test_fields_must_be_finite():
    space = MeasureSpace.uniform(3)
    with pytest.raises(SpaceError):
        space.field([0, np.nan, 1])
    with pytest.raises(SpaceError):
        space.field([0, 1])


def test_point_set_algebra():
    space = MeasureSpace.uniform(4)
    a, b = space.point_set([0, 1]), space.point_set([1, 2])
    assert list(a.union(b)) == [0, 1, 2]
    assert list(a.intersection(b)) == [1]
    assert list(a.difference(b)) == [0]
    assert list(a.complement()) == [2, 3]
    assert a.intersects(b)
    assert space.point_set([1]).issubset(a)
    with pytest.raises(SpaceError):
        space.point_set([4])


def test_distribution_function_is_strict():
    space = MeasureSpace([1, 1, 1])
    f = space.field([1, -2, 3])
    assert distribution(f, 0) == 3
    assert distribution(f, 1.5) == 2
    assert distribution(f, 2) == 1
    assert distribution(f, 3) == 0
    with pytest.raises(SpaceError):
        distribution(f, -1)


def test_lp_norm_from_both_sides():
    space = MeasureSpace([1, 1])
    f = space.field([3, -4])
    assert lp_norm(f, 2) == pytest.approx(5)
    assert lp_norm_from_distribution(f, 2) == pytest.approx(5)
    assert lp_norm(f, 1) == pytest.approx(7)
    with pytest.raises(SpaceError):
        lp_norm(f, 0.5)


def test_lp_identity_on_random_weights(rng):
    space = MeasureSpace(rng.uniform(0.1, 2.0, size=50))
    f = space.field(rng.normal(size=50))
    for p in (1, 1.5, 2, 3.7):
        assert lp_norm_from_distribution(f, p) == pytest.approx(lp_norm(f, p), rel=1e-10)


def test_weak_norm():
    space = MeasureSpace([1, 1])
    f = space.field([3, 4])
    assert weak_lp_norm(f, 1) == 6
    assert weak_lp_norm(space.constant(0), 1) == 0
    assert weak_lp_norm(f, 2) <= lp_norm(f, 2)


def test_field_csv_must_match_the_space(tmp_path):
    space = MeasureSpace([1, 2])
    path = str(tmp_path / "f.csv")
    write_field_csv(path, space.field([0.5, 1.5]))
    assert list(read_field_csv(path, space).values) == [0.5, 1.5]
    with pytest.raises(SpaceError):
        read_field_csv(path, MeasureSpace([1, 1]))
