#!/usr/bin/env python
# -*- coding:utf-8 -*-

import click

from ballcalc.config import config
from ballcalc.decorators import basis_options, command, option
from ballcalc.functional import norms as all_norms
from ballcalc.lib import TablePrinter, makedirs, write_csv
from ballcalc.presets import build_basis
from ballcalc.space import read_field_csv

HEADERS = ["norm", "alpha", "value", "witness", "ball"]


@command()
@basis_options
@option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False),
        help="Field CSV with the columns index, weight, value")
@option("--alpha", type=click.FloatRange(0, 1, min_open=True, max_open=True), default=0.75,
        help="Mass fraction of the α-oscillations")
def norms(input_path, alpha):
    """Compute the BMO, BLO, BMO_α and BLO_α norms of a field with their witness balls"""
    b = build_basis()
    f = read_field_csv(input_path, space=b.space)
    rows = [
        [report.kind, alpha if report.kind.endswith("_alpha") else "", report.value, report.witness,
         b.describe(report.witness)]
        for report in all_norms(f, b, alpha)
    ]
    if config.out is not None:
        write_csv(str(makedirs(config.out) / "norms.csv"), HEADERS, rows)
    with TablePrinter(HEADERS) as tp:
        tp.echos(rows)
