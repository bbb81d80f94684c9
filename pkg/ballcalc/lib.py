#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""General purpose functions, not directly linked to the ball calculus"""

import csv
import io
import math
import os
import re
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click
import humanize

from ballcalc.log import get_logger

LOGGER = get_logger(__name__)

THREADS_ENVVAR = "BALLCALC_THREADS"
SIGNIFICANT_DIGITS = 12


def click_get_current_context_safe():
    try:
        return click.get_current_context()
    except RuntimeError:
        return None


def read_properties_file(file_name):
    """Read a flat `key = value` file, ignoring blank lines and `#` comments"""
    res = OrderedDict()
    with open(file_name, "r") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError("{}:{}: expected 'key = value', got {!r}".format(file_name, lineno, line))
            key, value = line.split("=", 1)
            res[key.strip()] = value.strip()
    return res


def makedirs(dir):
    """Ensure a directory is created.

    Possibly create the parent directories. If the directory already exists, do
    nothing.

    """
    if not os.path.exists(dir):
        LOGGER.action("create directory {}".format(dir))
        os.makedirs(dir)
    return Path(dir)


_makedirs = makedirs


def createfile(name, content, makedirs=False):
    if makedirs:
        _makedirs(Path(name).parent)
    LOGGER.action("writing to the file {}".format(name))
    # newline='' keeps the CRLF line endings of the csv writer untouched
    with open(name, "w", newline="", encoding="utf-8") as f:
        f.write(content)
    return Path(name)


def main_default(**default_options):
    u"""Change the default values of the main method of a Command"""

    def decorator(f):
        oldmain = f.main

        def main(*args, **options):
            LOGGER.develop("Calling with args: {}".format(args))
            newopts = dict(default_options)
            newopts.update(options)
            return oldmain(*args, **newopts)
        f.main = main
        return f

    return decorator


def cpu_count():
    return os.cpu_count() or 1


def thread_count():
    """The number of worker threads, capped by --threads or BALLCALC_THREADS"""
    from ballcalc.config import config
    value = config.threads or os.environ.get(THREADS_ENVVAR)
    if value:
        return max(1, int(value))
    return cpu_count()


def parallel_map(function, items):
    """Map function over items in worker threads, results in input order"""
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))


def chunks(count, size):
    """Split range(count) into consecutive slices of at most size elements"""
    return [slice(start, min(start + size, count)) for start in range(0, count, size)]


def format_number(value):
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "dtype"):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return "{:.{}g}".format(value, SIGNIFICANT_DIGITS)
    if value is None:
        return ""
    return str(value)


def csv_text(headers, rows):
    """Render rows as RFC-4180 CSV, numbers with 12 significant digits"""
    f = io.StringIO()
    writer = csv.writer(f, lineterminator="\r\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return f.getvalue()


def write_csv(path, headers, rows):
    return createfile(path, csv_text(headers, rows), makedirs=True)


def natural_delta(value):
    return humanize.naturaldelta(value, minimum_unit="milliseconds")


def intcomma(value):
    return humanize.intcomma(value)


class ParameterType(click.ParamType):
    def __init__(self):
        click.ParamType.__init__(self)
        if not getattr(self, "name", None):
            class_name = self.__class__.__name__
            self.name = re.sub('(Param(eter|)|)Type$', '', class_name)
            # switch to snake case
            self.name = re.sub('([a-z])([A-Z])', '\\1_\\2', self.name).lower()


def get_tabulate_formats():
    import tabulate
    return click.Choice(list(tabulate.tabulate_formats) + ['csv'])


class TablePrinter(object):
    direct_output_formats = ['csv']

    def __init__(self, headers=(), tablefmt=None, **options):
        self._tablefmt = tablefmt or self.format_from_context() or 'simple'
        self._options = options
        self._headers = list(headers)
        self._data = []

    @staticmethod
    def format_from_context():
        context = click_get_current_context_safe()
        if context is not None:
            from ballcalc.config import config
            return config.format
        return None

    def __enter__(self):
        if self._tablefmt in self.direct_output_formats:
            click.echo(csv_text(self._headers, []), nl=False)
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._tablefmt not in self.direct_output_formats:
            click.echo(tabulate(self._data, self._headers, tablefmt=self._tablefmt, **self._options))

    def echo(self, *args):
        if self._tablefmt in self.direct_output_formats:
            text = csv_text([], [args])
            # csv_text always emits a header row, here an empty one
            click.echo(text.split("\r\n", 1)[1], nl=False)
        else:
            self._data.append([format_number(a) for a in args])

    def echos(self, ls):
        for l in ls:
            self.echo(*l)


def tabulate(tabular_data, headers=(), tablefmt="simple",
             floatfmt="g", numalign="decimal", stralign="left",
             missingval=""):
    """Tabulate the data"""
    from tabulate import tabulate as tabulate_
    if tablefmt == 'csv':
        return csv_text(headers, tabular_data).rstrip("\r\n")
    elif tablefmt == 'plain':
        return tabulate_(tabular_data, (), 'plain', floatfmt, numalign, stralign, missingval)
    else:
        return tabulate_(tabular_data, headers, tablefmt, floatfmt, numalign, stralign, missingval)
