#!/usr/bin/env python
# -*- coding:utf-8 -*-

from ballcalc.config import config
from ballcalc.decorators import basis_options, command
from ballcalc.lib import TablePrinter
from ballcalc.presets import build_basis
from ballcalc.space import integrate
from ballcalc.verify import corpus_standard


@command()
@basis_options
def corpus():
    """List the fields of the standard corpus, writing them as CSV under --out"""
    b = build_basis()
    fields = corpus_standard(b, config.seed)
    if config.out is not None:
        fields.write(config.out)
    with TablePrinter(["field", "descriptor", "seed", "min", "max", "l1"]) as tp:
        for entry in fields:
            values = entry.field.values
            tp.echo(entry.name, entry.descriptor, entry.seed, values.min(), values.max(), integrate(abs(entry.field)))
