#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Validation and experiment reports, rendered as tables or CSV"""

import math
from collections import OrderedDict, namedtuple

from ballcalc.config import config
from ballcalc.errors import InvariantViolation
from ballcalc.lib import TablePrinter, csv_text, format_number, makedirs, write_csv
from ballcalc.log import get_logger

LOGGER = get_logger(__name__)


Check = namedtuple("Check", ["name", "passed", "value", "witness", "detail"])


class ValidationReport(object):
    """Ordered pass/fail checks plus the measured constants of a structure"""

    headers = ["check", "passed", "value", "witness", "detail"]

    def __init__(self, subject):
        self.subject = subject
        self.checks = []
        self.constants = OrderedDict()

    def add(self, name, passed, value=None, witness=None, detail=""):
        check = Check(name, bool(passed), value, witness, detail)
        self.checks.append(check)
        log = LOGGER.debug if check.passed else LOGGER.warning
        log("{}: {} {}".format(self.subject, name, "passed" if check.passed else "FAILED: {}".format(detail)))
        return check

    def constant(self, name, value):
        self.constants[name] = value

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def __getitem__(self, name):
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def rows(self):
        rows = [
            [check.name, check.passed, check.value, _format_witness(check.witness), check.detail]
            for check in self.checks
        ]
        rows += [
            ["constant:" + name, True, value, "", ""]
            for name, value in self.constants.items()
        ]
        return rows

    def to_csv(self):
        return csv_text(self.headers, self.rows())

    def write(self, path):
        return write_csv(path, self.headers, self.rows())

    def summary_row(self):
        return [self.subject, self.passed, len(self.failures)]


def _format_witness(witness):
    if witness is None:
        return ""
    if isinstance(witness, (tuple, list)):
        return " ".join(format_number(w) for w in witness)
    return format_number(witness)


class ExperimentReport(object):
    """Rows of one experiment, with the max-ratio aggregate and its witness

    Rows are kept in the order they are added, which callers make canonical
    (field name, then ball id). The aggregate is the max of the `ratio` column,
    the first row reaching it being the witness.
    """

    def __init__(self, name, headers, config=None):
        self.name = name
        self.headers = list(headers)
        self.rows = []
        self.config = OrderedDict(config or ())
        self.notes = []
        self.violations = []
        self.extra = OrderedDict()

    def add(self, *row):
        if len(row) != len(self.headers):
            raise ValueError("{} values for the {} columns of {}".format(len(row), len(self.headers), self.name))
        self.rows.append(list(row))

    def note(self, message):
        LOGGER.debug("{}: {}".format(self.name, message))
        self.notes.append(message)

    def violation(self, message):
        LOGGER.error("{}: {}".format(self.name, message))
        self.violations.append(message)

    @property
    def passed(self):
        return not self.violations

    def column(self, name):
        index = self.headers.index(name)
        return [row[index] for row in self.rows]

    def aggregate(self, column="ratio", rows=None):
        """(max value, witness row) over the rows, (0.0, None) when there is none"""
        rows = self.rows if rows is None else rows
        if column not in self.headers or not rows:
            return 0.0, None
        index = self.headers.index(column)
        best, witness = None, None
        for row in rows:
            value = row[index]
            if value is None or (isinstance(value, float) and math.isnan(value)):
                continue
            if best is None or value > best:
                best, witness = value, row
        if best is None:
            return 0.0, None
        return float(best), witness

    def minimum(self, column="ratio"):
        values = [v for v in self.column(column) if v is not None and not (isinstance(v, float) and math.isnan(v))]
        return float(min(values)) if values else 0.0

    def witness_label(self, witness):
        if witness is None:
            return ""
        labels = [
            format_number(value)
            for header, value in zip(self.headers, witness)
            if header in ("field", "ball", "lemma", "a", "b", "p", "inequality")
        ]
        return " ".join(labels)

    def summary_rows(self):
        value, witness = self.aggregate()
        rows = [[self.name, "max_ratio", value, self.witness_label(witness), self.passed]]
        for key, extra in self.extra.items():
            rows.append([self.name, key, extra, "", self.passed])
        return rows

    def config_rows(self):
        return [[key, value] for key, value in self.config.items()]

    def to_csv(self):
        return csv_text(self.headers, self.rows)

    def write(self, path):
        return write_csv(path, self.headers, self.rows)


SUMMARY_HEADERS = ["experiment", "statistic", "value", "witness", "passed"]


def summary_rows(report):
    if isinstance(report, ExperimentReport):
        return report.summary_rows()
    rows = [[report.subject, "passed", report.passed, _format_witness(
        [check.name for check in report.failures]), report.passed]]
    rows += [[report.subject, "constant:" + name, value, "", report.passed] for name, value in report.constants.items()]
    return rows


def publish(named_reports, out=None, echo_rows=None):
    """Print the reports, write them under out and fail on any violation

    named_reports lists (file stem, report) pairs. With out, every report
    lands in <out>/<stem>.csv, the experiment settings in
    <out>/<stem>.config.csv and the summary in <out>/summary.csv.
    """
    out = out if out is not None else config.out
    echo_rows = out is None if echo_rows is None else echo_rows
    summary = []
    for stem, report in named_reports:
        summary.extend(summary_rows(report))
        if echo_rows:
            with TablePrinter(report.headers) as tp:
                tp.echos(report.rows() if isinstance(report, ValidationReport) else report.rows)
        if out is not None:
            directory = makedirs(out)
            report.write(str(directory / "{}.csv".format(stem)))
            if isinstance(report, ExperimentReport):
                rows = report.config_rows() + [["note", note] for note in report.notes]
                rows += [["violation", violation] for violation in report.violations]
                write_csv(str(directory / "{}.config.csv".format(stem)), ["key", "value"], rows)
    with TablePrinter(SUMMARY_HEADERS) as tp:
        tp.echos(summary)
    if out is not None:
        write_csv(str(makedirs(out) / "summary.csv"), SUMMARY_HEADERS, summary)
    failed = [(stem, report) for stem, report in named_reports if not report.passed]
    if failed:
        details = []
        for stem, report in failed:
            if isinstance(report, ExperimentReport):
                details.extend("{}: {}".format(stem, v) for v in report.violations)
            else:
                details.extend("{}: {} {}".format(stem, c.name, c.detail) for c in report.failures)
        raise InvariantViolation("{} failed: {}".format(
            ", ".join(stem for stem, _ in failed), "; ".join(details)), details)
    return summary
