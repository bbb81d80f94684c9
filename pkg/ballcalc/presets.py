#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Build the basis, the kernels and their couple out of the command line options"""

import copy

from ballcalc.basis import ChainBasis, GridBasis, dyadic_basis, grid_torus_basis, martingale_basis, random_partition_tree
from ballcalc.config import config
from ballcalc.errors import KernelError
from ballcalc.kernel import (
    KBCouple,
    TranslationKernels,
    alpha_preset,
    convolution_kernels,
    dyadic_weighted_kernels,
    fejer_kernels,
    indicator_kernels,
)
from ballcalc.log import get_logger

LOGGER = get_logger(__name__)


def build_basis(params=None):
    params = params or config.basis
    if params.preset == "dyadic":
        _, b = dyadic_basis(params.levels)
    elif params.preset == "grid":
        _, b = grid_torus_basis(params.dim, params.size, shape=params.shape, mode=params.mode)
    else:
        space, levels = random_partition_tree(params.tree_leaves, params.tree_seed)
        b = martingale_basis(levels, space=space)
    LOGGER.debug("Using the basis {}".format(b.name))
    return b


def build_kernels(b, params=None):
    params = params or config.kernel
    if params.kernel == "indicator":
        return indicator_kernels(b)
    if params.kernel == "convolution":
        return convolution_kernels(b, params.profile)
    if params.kernel == "fejer":
        if not isinstance(b, GridBasis):
            raise KernelError("Fejér kernels live on the circle grid, got {}".format(b.name))
        return fejer_kernels(b.n, params.degrees, basis=b)
    if not isinstance(b, ChainBasis):
        raise KernelError("Dyadic weighted kernels need a dyadic or martingale basis, got {}".format(b.name))
    return dyadic_weighted_kernels(b, alpha_preset(params.alpha_seq, int(b.depths.max()) + 1))


def couple_of(ks):
    """The kernels with the family of balls of each point, restricted to the balls having a kernel"""
    if isinstance(ks, TranslationKernels):
        if ks.basis.mode == "centered":
            return KBCouple(ks, ks.centered_family())
        return KBCouple(ks, [ids[ks._has[ids]] for ids in ks.basis.containing])
    return KBCouple(ks)


def build_couple(b=None):
    b = b if b is not None else build_basis()
    return couple_of(build_kernels(b))


def refined(params=None):
    """The basis parameters at twice the number of points"""
    res = copy.copy(params or config.basis)
    if res.preset == "dyadic":
        res.levels += 1
    elif res.preset == "grid":
        res.size *= 2
    else:
        res.tree_leaves *= 2
    return res


def resolution(params=None):
    params = params or config.basis
    if params.preset == "dyadic":
        return "levels={}".format(params.levels)
    if params.preset == "grid":
        return "n={}".format(params.size)
    return "leaves={}".format(params.tree_leaves)
