#!/usr/bin/env python
# -*- coding:utf-8 -*-

import math

import numpy as np
import pytest

from ballcalc.basis import GridBasis, dyadic_basis, martingale_basis, random_partition_tree
from ballcalc.errors import KernelError
from ballcalc.kernel import (
    DenseKernels,
    FunctionModulus,
    StepModulus,
    alpha_preset,
    convolution_kernels,
    dyadic_weighted_kernels,
    fejer_kernels,
    i_omega,
    indicator_kernels,
    indicator_modulus,
    j_alpha,
    profile_preset,
    validate_kernels,
)


def test_i_omega_of_the_inverse_square():
    assert i_omega(FunctionModulus(lambda t: t ** -2.0)) == pytest.approx(3, rel=1e-6)


def test_i_omega_of_steps():
    assert i_omega(indicator_modulus()) == 1
    expected = 7 - 2 / math.log(2)
    assert i_omega(StepModulus([1, 3], [1.0])) == pytest.approx(expected, rel=1e-12)
    assert math.isinf(i_omega(StepModulus([1, 3], [1.0], tail=0.5)))


def test_i_omega_diverges_for_slow_decay():
    assert math.isinf(i_omega(FunctionModulus(lambda t: 1.0 / t, name="1/t")))


def test_step_modulus_must_decrease():
    with pytest.raises(KernelError):
        StepModulus([1, 2, 3], [0.5, 0.8])


def test_doubling_constants_of_a_power():
    c0, c0_prime = FunctionModulus(lambda t: t ** -2.0).doubling_constants
    assert c0 == pytest.approx(0.25)
    assert c0_prime == pytest.approx(4)


def test_j_alpha_of_the_geometric_sequence():
    assert j_alpha(0.5 ** np.arange(60)) == pytest.approx(4)
    assert j_alpha([1, 0, 0]) == 1


def test_alpha_presets():
    assert list(alpha_preset("geometric:0.5", 3)) == [1, 0.5, 0.25]
    assert list(alpha_preset("indicator", 3)) == [1, 0, 0]
    assert list(alpha_preset("power:1", 2)) == [1, 0.5]
    with pytest.raises(KernelError):
        alpha_preset("geometric:zero", 3)


def test_profile_presets():
    assert profile_preset("power:3")(0) == 1
    assert profile_preset("indicator")(np.array([0.5, 2]))[1] == 0
    with pytest.raises(KernelError):
        profile_preset("geometric:2")
    with pytest.raises(KernelError):
        profile_preset("no/such/table.csv")


def test_profile_table(tmp_path):
    path = tmp_path / "xi.csv"
    path.write_text("t,xi\n0,1\n1,0.5\n2,0\n")
    xi = profile_preset(str(path))
    assert list(xi(np.array([0, 0.5, 1, 1.5, 7]))) == [1, 1, 0.5, 0.5, 0]


def test_indicator_kernels_are_exact(dyadic4):
    report = validate_kernels(indicator_kernels(dyadic4), dyadic4)
    assert report.passed
    assert report.constants["c1"] == pytest.approx(1)
    assert report.constants["c2"] == pytest.approx(1)
    assert report.constants["I_omega"] == 1


def test_dyadic_weighted_kernels():
    _, b = dyadic_basis(3)
    ks = dyadic_weighted_kernels(b, alpha_preset("geometric:0.5", 4))
    report = validate_kernels(ks, b)
    assert report["K1"].passed
    assert report.constants["c1"] > 0
    assert report.constants["J"] == pytest.approx(3.25)
    values = np.arange(b.space.size, dtype=float)
    fast = ks.averages(values)
    for i in range(b.count):
        assert fast[i] == pytest.approx(ks.row(i) @ (values * b.space.weights))


def test_dyadic_weighted_kernels_need_a_positive_first_weight(dyadic2):
    with pytest.raises(KernelError):
        dyadic_weighted_kernels(dyadic2, [0, 1, 1])


def test_convolution_kernels_have_unit_mass():
    b = GridBasis(1, 16)
    ks = convolution_kernels(b, profile_preset("power:3"))
    report = validate_kernels(ks, b)
    assert report["K1"].passed
    assert report["K2-lower"].passed
    assert report["K2-upper"].passed
    assert 0 < report.constants["c2"] < math.inf
    values = np.cos(np.arange(16))
    fast = ks.averages(values)
    for i in ks.scan_ids:
        assert fast[i] == pytest.approx(ks.row(i) @ (values * b.space.weights))


def test_convolution_kernels_need_a_grid(dyadic2):
    with pytest.raises(KernelError):
        convolution_kernels(dyadic2, profile_preset("power:3"))


def test_fejer_kernels():
    ks = fejer_kernels(16, [1, 2])
    assert ks.radii == [2, 4]
    weights = ks.basis.space.weights
    for i in ks.scan_ids:
        row = ks.row(i)
        assert np.all(row >= 0)
        assert row @ weights == pytest.approx(1)


def test_fejer_kernels_on_a_fine_circle():
    ks = fejer_kernels(256, [1, 2, 4, 8, 16])
    assert ks.radii == [7, 14, 25, 42, 64]
    report = validate_kernels(ks, ks.basis)
    assert report.passed
    assert report["K1"].value < 1e-10
    assert report.constants["c1"] > 0


def test_fejer_degrees_must_not_share_a_radius():
    with pytest.raises(KernelError):
        fejer_kernels(16, [6, 7])


def test_light_kernel_fails_the_mass_check(dyadic2):
    densities = {i: 0.9 * indicator_kernels(dyadic2).row(i) for i in range(dyadic2.count)}
    report = validate_kernels(DenseKernels(dyadic2, densities, indicator_modulus()), dyadic2)
    assert not report["K1"].passed
    assert report["K1"].value == pytest.approx(0.1)


def test_chain_weighted_kernels_on_a_martingale_basis():
    space, levels = random_partition_tree(12, 5)
    b = martingale_basis(levels, space=space)
    ks = dyadic_weighted_kernels(b, alpha_preset("geometric:0.5", int(b.depths.max()) + 1))
    assert validate_kernels(ks, b)["K1"].passed
