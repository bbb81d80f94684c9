#!/usr/bin/env python
# -*- coding:utf-8 -*-

import click

from ballcalc.basis import validate_axioms
from ballcalc.decorators import basis_options, command, option
from ballcalc.log import get_logger
from ballcalc.presets import build_basis
from ballcalc.report import publish

LOGGER = get_logger(__name__)


@command()
@basis_options
@option("--export", type=click.Path(dir_okay=False), help="Write the id, descriptors, size, measure and hull of"
        " every ball to this CSV file")
def validate_basis(export):
    """Check the ball-basis axioms and measure the constants of the basis"""
    b = build_basis()
    report = validate_axioms(b)
    if export:
        b.export(export)
    publish([("validate-basis", report)])
