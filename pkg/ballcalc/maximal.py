#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Maximal operators, evaluated exactly as finite maxima

Each operator computes one number per ball (an average or a kernel average of
|f|), then takes at every point the max over a family of balls. The argmax is
the first ball reaching the max, in the order the family lists its balls.
"""

import numpy as np

from ballcalc.errors import KernelError
from ballcalc.functional import abs_mean_all
from ballcalc.kernel import ChainKernels, TranslationKernels
from ballcalc.lib import write_csv
from ballcalc.log import get_logger
from ballcalc.space import ScalarField, integrate, weak_lp_norm

LOGGER = get_logger(__name__)


class MaximalResult(object):
    def __init__(self, values, argmax, name):
        self.values = values
        self.argmax = argmax
        self.name = name

    def __getitem__(self, point):
        return self.values[point]

    def write(self, path):
        space = self.values.space
        rows = [
            [x, space.weights[x], self.values.values[x], int(self.argmax[x])]
            for x in range(space.size)
        ]
        return write_csv(path, ["index", "weight", "value", "argmax"], rows)

    def __repr__(self):
        return "<MaximalResult {} max={:g}>".format(self.name, float(self.values.values.max()))


def sup_over(ball_values, table, space, name):
    """At each point, the max of ball_values over the ids of its table row"""
    padded = np.where(table >= 0, ball_values[np.maximum(table, 0)], -np.inf)
    padded = np.where(np.isnan(padded), -np.inf, padded)
    first = padded.argmax(axis=1)
    rows = np.arange(table.shape[0])
    values = padded[rows, first]
    if np.any(np.isinf(values)):
        point = int(np.flatnonzero(np.isinf(values))[0])
        raise KernelError("Point {} has no ball to take the sup over".format(point))
    return MaximalResult(ScalarField(space, values), table[rows, first], name)


def standard_maximal(f, b):
    """Mf(x) = max over the balls containing x of the average of |f|"""
    return sup_over(abs_mean_all(f, b), b.containing_table, b.space, "M")


def kb_maximal(f, g):
    """M_G f(x) = max over the balls of the family of x of ∫|f|φ_B"""
    return sup_over(g.kernels.averages(np.abs(f.values)), g.table, g.basis.space, "M_G")


def convolution_maximal(f, ks, mode="centered"):
    """Sup of the kernel averages over the radii, centered at x or only containing x"""
    if not isinstance(ks, TranslationKernels):
        raise KernelError("The convolution maximal operator needs grid kernels, got {}".format(ks.name))
    if mode == "centered":
        table = ks.centered_table
    elif mode == "uncentered":
        table = ks.containing_table
    else:
        raise KernelError("Unknown mode {}".format(mode))
    return sup_over(ks.averages(np.abs(f.values)), table, ks.basis.space, "M_phi[{}]".format(mode))


def dyadic_weighted_maximal(f, ks):
    """Sup of the chain weighted averages over the chain of balls containing x"""
    if not isinstance(ks, ChainKernels):
        raise KernelError("The weighted maximal operator needs chain weighted kernels, got {}".format(ks.name))
    b = ks.basis
    return sup_over(ks.averages(np.abs(f.values)), b.containing_table, b.space, "M_alpha")


def fejer_maximal(f, ks):
    """sup over the shipped degrees m of ∫|f| F_m(x - ·)"""
    if not isinstance(ks, TranslationKernels) or not hasattr(ks, "degrees"):
        raise KernelError("The Fejér maximal operator needs Fejér kernels, got {}".format(ks.name))
    return sup_over(ks.averages(np.abs(f.values)), ks.centered_table, ks.basis.space, "sigma*")


def weak_l1_ratio(f, b):
    """‖Mf‖_(L^1,∞) / ‖f‖_1, 0 for the zero field"""
    norm = integrate(abs(f))
    if norm == 0:
        return 0.0
    return weak_lp_norm(standard_maximal(f, b).values, 1) / norm


def kernel_domination_constant(f, g):
    """max over kernel balls B and x in B of ∫|f|φ_B / Mf(x), 0/0 counting as 0"""
    b = g.basis
    maximal = standard_maximal(f, b).values.values
    averages = g.kernels.averages(np.abs(f.values))
    ids = g.kernels.ball_ids
    lowest = b.minima(maximal)[ids]
    top = averages[ids]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(top == 0, 0.0, top / lowest)
    return float(ratios.max()) if ratios.size else 0.0
