#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Exceptions raised by ballcalc, each carrying the exit code of the command line"""

import click


class BallCalcError(click.ClickException):
    exit_code = 1


class SpaceError(BallCalcError, ValueError):
    """Invalid measure space, point set or field"""


class BasisError(BallCalcError, ValueError):
    """A ball family or hull map that cannot be built or breaks its preconditions"""


class KernelError(BallCalcError, ValueError):
    """A kernel family that cannot be attached to its basis"""


class InvariantViolation(BallCalcError):
    """An asserted invariant did not hold"""

    def __init__(self, message, failures=()):
        super(InvariantViolation, self).__init__(message)
        self.failures = list(failures)


class ConfigError(click.UsageError):
    exit_code = 2


class QueryError(BallCalcError, ValueError):
    """A functional asked with invalid parameters, such as alpha outside (0, 1)"""
