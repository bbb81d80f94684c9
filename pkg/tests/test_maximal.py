#!/usr/bin/env python
# -*- coding:utf-8 -*-

import numpy as np
import pytest

from ballcalc.basis import GridBasis
from ballcalc.errors import KernelError
from ballcalc.kernel import (
    alpha_preset,
    convolution_kernels,
    dyadic_weighted_kernels,
    fejer_kernels,
    indicator_kernels,
    profile_preset,
)
from ballcalc.maximal import (
    convolution_maximal,
    dyadic_weighted_maximal,
    fejer_maximal,
    kb_maximal,
    kernel_domination_constant,
    standard_maximal,
    weak_l1_ratio,
)


def test_dyadic_maximal_of_a_point_mass(dyadic2):
    f = dyadic2.space.field([1, 0, 0, 0])
    result = standard_maximal(f, dyadic2)
    assert list(result.values.values) == [1, 0.5, 0.25, 0.25]
    assert result.argmax[0] == dyadic2.id_of(2, 0)
    assert result.argmax[1] == dyadic2.id_of(1, 0)
    assert result.argmax[3] == 0


def test_maximal_uses_the_absolute_value(dyadic2):
    f = dyadic2.space.field([-1, 0, 0, 0])
    assert list(standard_maximal(f, dyadic2).values.values) == [1, 0.5, 0.25, 0.25]


def test_indicator_kernels_give_the_standard_maximal(dyadic4, rng):
    f = dyadic4.space.field(rng.normal(size=dyadic4.space.size))
    standard = standard_maximal(f, dyadic4).values.values
    kernel = kb_maximal(f, indicator_kernels(dyadic4).couple()).values.values
    assert kernel == pytest.approx(standard)


def test_kernel_averages_are_dominated_by_the_maximal(dyadic4, rng):
    f = dyadic4.space.field(rng.exponential(size=dyadic4.space.size))
    g = indicator_kernels(dyadic4).couple()
    assert kernel_domination_constant(f, g) <= 1 + 1e-12


def test_weighted_maximal_lies_below_the_standard_one(dyadic4, rng):
    ks = dyadic_weighted_kernels(dyadic4, alpha_preset("geometric:0.5", 5))
    f = dyadic4.space.field(rng.normal(size=dyadic4.space.size))
    weighted = dyadic_weighted_maximal(f, ks).values.values
    standard = standard_maximal(f, dyadic4).values.values
    assert np.all(weighted <= standard + 1e-12)


def test_convolution_maximal_of_a_constant():
    b = GridBasis(1, 16)
    ks = convolution_kernels(b, profile_preset("power:3"))
    f = b.space.constant(2)
    for mode in ("centered", "uncentered"):
        assert convolution_maximal(f, ks, mode).values.values == pytest.approx(np.full(16, 2.0))
    with pytest.raises(KernelError):
        convolution_maximal(f, ks, "sideways")


def test_fejer_maximal_of_a_constant():
    ks = fejer_kernels(16, [1, 2])
    f = ks.basis.space.constant(1)
    assert fejer_maximal(f, ks).values.values == pytest.approx(np.ones(16))


def test_fejer_maximal_needs_fejer_kernels(dyadic2):
    with pytest.raises(KernelError):
        fejer_maximal(dyadic2.space.constant(1), indicator_kernels(dyadic2))


def test_weak_l1_ratio(dyadic4, rng):
    assert weak_l1_ratio(dyadic4.space.constant(0), dyadic4) == 0
    f = dyadic4.space.field(rng.normal(size=dyadic4.space.size))
    assert 0 < weak_l1_ratio(f, dyadic4) <= 1 + 1e-12


def test_maximal_csv(dyadic2, tmp_path):
    result = standard_maximal(dyadic2.space.field([1, 0, 0, 0]), dyadic2)
    path = result.write(str(tmp_path / "maximal.csv"))
    lines = path.read_text().splitlines()
    assert lines[0] == "index,weight,value,argmax"
    assert lines[1] == "0,0.25,1,{}".format(dyadic2.id_of(2, 0))


def _operators(dyadic4):
    grid = GridBasis(1, 16)
    convolution = convolution_kernels(grid, profile_preset("power:3"))
    weighted = dyadic_weighted_kernels(dyadic4, alpha_preset("geometric:0.5", 5))
    indicator = indicator_kernels(dyadic4).couple()
    fejer = fejer_kernels(16, [1, 2])
    return [
        (dyadic4.space, lambda f: standard_maximal(f, dyadic4)),
        (dyadic4.space, lambda f: kb_maximal(f, indicator)),
        (dyadic4.space, lambda f: dyadic_weighted_maximal(f, weighted)),
        (grid.space, lambda f: convolution_maximal(f, convolution, "uncentered")),
        (fejer.basis.space, lambda f: fejer_maximal(f, fejer)),
    ]


def test_maximal_operators_are_sublinear_and_homogeneous(dyadic4, rng):
    for space, operator in _operators(dyadic4):
        u = rng.normal(size=space.size)
        v = rng.normal(size=space.size)
        both = operator(space.field(u + v)).values.values
        apart = operator(space.field(u)).values.values + operator(space.field(v)).values.values
        assert np.all(both <= apart + 1e-12)
        scaled = operator(space.field(-3 * u)).values.values
        assert scaled == pytest.approx(3 * operator(space.field(u)).values.values)
