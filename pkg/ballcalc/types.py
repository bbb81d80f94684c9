#!/usr/bin/env python3
# -*- coding:utf-8 -*-

import os

from ballcalc.errors import KernelError
from ballcalc.kernel import profile_preset
from ballcalc.lib import ParameterType

PROFILE_PRESETS = ("indicator", "power:P", "geometric:Q", "plateau:P")
ALPHA_PRESETS = ("indicator", "geometric:Q", "power:P")


class ProfileType(ParameterType):
    """A radial profile: a preset or the path of a (t, value) CSV table"""

    def get_metavar(self, param, *args):
        return "[{}|FILE]".format("|".join(PROFILE_PRESETS))

    def convert(self, value, param, ctx):
        if not isinstance(value, str):
            return value
        try:
            return profile_preset(value)
        except KernelError as e:
            self.fail(e.format_message(), param, ctx)


class AlphaSequenceType(ParameterType):
    """A weight sequence α_k, kept as text until the depth of the basis is known"""

    def get_metavar(self, param, *args):
        return "[{}|FILE]".format("|".join(ALPHA_PRESETS))

    def convert(self, value, param, ctx):
        name = value.partition(":")[0]
        if name not in ("indicator", "geometric", "power") and not os.path.exists(value):
            self.fail("{} is neither a preset ({}) nor an existing file".format(
                value, ", ".join(ALPHA_PRESETS)), param, ctx)
        return value


class IntListType(ParameterType):
    """Comma separated integers, like 1,2,4"""

    def get_metavar(self, param, *args):
        return "N[,N...]"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return list(value)
        try:
            return [int(v) for v in value.split(",") if v.strip()]
        except ValueError:
            self.fail("{} is not a comma separated list of integers".format(value), param, ctx)


class FloatListType(ParameterType):
    """Comma separated reals, like 0.6,0.75,0.9"""

    def get_metavar(self, param, *args):
        return "X[,X...]"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        try:
            return [float(v) for v in value.split(",") if v.strip()]
        except ValueError:
            self.fail("{} is not a comma separated list of numbers".format(value), param, ctx)
