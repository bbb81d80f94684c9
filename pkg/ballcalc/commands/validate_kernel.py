#!/usr/bin/env python
# -*- coding:utf-8 -*-

import click

from ballcalc.decorators import basis_options, command, kernel_options, option
from ballcalc.kernel import validate_kernels
from ballcalc.presets import build_basis, build_kernels
from ballcalc.report import publish


@command()
@basis_options
@kernel_options
@option("--dump", type=click.Path(dir_okay=False), help="Write the nonzero kernel weights as (ball, point, weight)"
        " rows to this CSV file")
def validate_kernel(dump):
    """Check the kernel-structure conditions and measure c1, c2 and I(ω)"""
    b = build_basis()
    ks = build_kernels(b)
    report = validate_kernels(ks, b)
    if dump:
        ks.dump(dump)
    publish([("validate-kernel", report)])
