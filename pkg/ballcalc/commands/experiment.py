#!/usr/bin/env python
# -*- coding:utf-8 -*-

import click

from ballcalc.config import config
from ballcalc.decorators import argument, basis_options, command, flag, kernel_options, option
from ballcalc.log import get_logger
from ballcalc.presets import build_basis, build_couple, refined, resolution
from ballcalc.report import publish
from ballcalc.types import FloatListType
from ballcalc.verify import EXPERIMENTS, corpus_standard, needs_kernels, refinement_stability, run_experiment

LOGGER = get_logger(__name__)


def _run(name, params, settings):
    b = build_basis(params)
    g = build_couple(b) if needs_kernels(name) else None
    return run_experiment(name, b, g, corpus_standard(b, config.seed), seed=config.seed, **settings)


@command()
@basis_options
@kernel_options
@argument("name", type=click.Choice(list(EXPERIMENTS)), help="The experiment to run")
@option("--alpha", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.75,
        help="Mass fraction of the α-oscillations")
@option("--epsilon", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.5,
        help="Level mass ratio the decay step is calibrated to reach")
@option("--centering", type=click.Choice(["mean", "inf"]), default="mean",
        help="Subtract the ball mean or the ball infimum in the decay experiment")
@option("--alphas", type=FloatListType(), default="0.6,0.75,0.9",
        help="Mass fractions compared by the norm equivalence experiment")
@option("--exponents", type=FloatListType(), default="1,1.5,2,3",
        help="Exponents of the L^p identity experiment")
@option("--sample-size", type=click.IntRange(min=1), default=2000,
        help="Sampled ball pairs when there are too many to scan them all")
@flag("--refine", help="Run again at twice the resolution and fail when the aggregate moves by 2x or more")
def experiment(name, alpha, epsilon, centering, alphas, exponents, sample_size, refine):
    """Run one verification experiment over the standard field corpus"""
    settings = dict(alpha=alpha, epsilon=epsilon, centering=centering, alphas=tuple(alphas),
                    exponents=tuple(exponents), sample_size=sample_size)
    coarse = _run(name, config.basis, settings)
    reports = [(name, coarse)]
    if refine:
        params = refined(config.basis)
        fine = _run(name, params, settings)
        ratio, stable = refinement_stability(coarse, fine)
        coarse.extra["refinement_ratio"] = ratio
        LOGGER.status("{}: aggregate moves by {:g} from {} to {}".format(
            name, ratio, resolution(config.basis), resolution(params)))
        if not stable:
            coarse.violation("the aggregate moves by {:g} from {} to {}".format(
                ratio, resolution(config.basis), resolution(params)))
        reports.append(("{}-refined".format(name), fine))
    publish(reports)
