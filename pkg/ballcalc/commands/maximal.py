#!/usr/bin/env python
# -*- coding:utf-8 -*-

import click

from ballcalc import maximal as operators
from ballcalc.config import config
from ballcalc.decorators import basis_options, command, kernel_options, option
from ballcalc.kernel import ChainKernels, TranslationKernels
from ballcalc.lib import TablePrinter, makedirs
from ballcalc.log import get_logger
from ballcalc.presets import build_basis, build_kernels, couple_of
from ballcalc.space import read_field_csv

LOGGER = get_logger(__name__)


def maximal_function(f, b, operator):
    if operator == "standard":
        return operators.standard_maximal(f, b)
    ks = build_kernels(b)
    if isinstance(ks, TranslationKernels) and hasattr(ks, "degrees"):
        return operators.fejer_maximal(f, ks)
    if isinstance(ks, TranslationKernels):
        return operators.convolution_maximal(f, ks, b.mode)
    if isinstance(ks, ChainKernels):
        return operators.dyadic_weighted_maximal(f, ks)
    return operators.kb_maximal(f, couple_of(ks))


@command()
@basis_options
@kernel_options
@option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False),
        help="Field CSV with the columns index, weight, value")
@option("--operator", type=click.Choice(["kernel", "standard"]), default="kernel",
        help="Kernel maximal operator, or the plain ball averages")
def maximal(input_path, operator):
    """Compute the maximal function of a field with the ball of the max at each point"""
    b = build_basis()
    f = read_field_csv(input_path, space=b.space)
    result = maximal_function(f, b, operator)
    LOGGER.status("{} of {}: max {:g}".format(result.name, input_path, float(result.values.values.max())))
    if config.out is not None:
        result.write(str(makedirs(config.out) / "maximal.csv"))
        return
    with TablePrinter(["index", "weight", "value", "argmax"]) as tp:
        for x in range(b.space.size):
            tp.echo(x, b.space.weights[x], result.values.values[x], int(result.argmax[x]))
