#!/usr/bin/env python
# -*- coding:utf-8 -*-

import click

from ballcalc.config import config
from ballcalc.log import get_logger
from ballcalc.overloads import command, option, flag, argument
from ballcalc.types import AlphaSequenceType, IntListType, ProfileType

LOGGER = get_logger(__name__)


def param_config(name, *args, **kwargs):
    """An option whose value lands in config.<name>.<parameter name> instead of the callback"""
    typ = kwargs.pop("typ", object)
    kls = kwargs.pop("kls", option)
    cls = kwargs.get("cls", {
        option: click.core.Option,
        argument: click.core.Argument
    }[kls])

    class Conf(typ):
        pass
    init_callback = kwargs.get("callback")
    if not hasattr(config, name):
        setattr(config, name, Conf())

    def _subcommand_config_callback(ctx, attr, value):
        if not hasattr(config, name):
            setattr(config, name, Conf())
        setattr(getattr(config, name), attr.name, value)
        if init_callback is not None:
            value = init_callback(ctx, attr, value)
            setattr(getattr(config, name), attr.name, value)
        return value

    kwargs["expose_value"] = kwargs.get("expose_value", False)
    kwargs["callback"] = _subcommand_config_callback
    # find out the name of the param to setup the default value
    o = cls(args)
    default = kwargs.get("default")
    if callable(default):
        default = default()
    setattr(getattr(config, name), o.name, default)

    return kls(*args, **kwargs)


def basis_options(func):
    """The options describing the ball-basis, stored in config.basis"""
    opts = [
        param_config("basis", "--preset", type=click.Choice(["dyadic", "grid", "martingale"]), default="dyadic",
                     help="Family of balls"),
        param_config("basis", "--levels", type=click.IntRange(0, 24), default=6,
                     help="Depth of the dyadic basis, over 2^levels points"),
        param_config("basis", "--dim", type=click.IntRange(1, 2), default=1,
                     help="Dimension of the grid torus"),
        param_config("basis", "--size", type=click.IntRange(min=4), default=64,
                     help="Points per axis of the grid torus"),
        param_config("basis", "--shape", type=click.Choice(["cube", "ball"]), default="cube",
                     help="Shape of the grid balls"),
        param_config("basis", "--mode", type=click.Choice(["centered", "uncentered"]), default="centered",
                     help="Balls the grid maximal operators take their sup over at each point"),
        param_config("basis", "--tree-seed", type=int, default=0,
                     help="Seed of the random partitions of the martingale basis"),
        param_config("basis", "--tree-leaves", type=click.IntRange(min=2), default=64,
                     help="Points of the martingale basis"),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


def kernel_options(func):
    """The options describing the kernels attached to the basis, stored in config.kernel"""
    opts = [
        param_config("kernel", "--kernel", type=click.Choice(["indicator", "convolution", "dyadic-weighted", "fejer"]),
                     default="indicator", help="Family of kernels"),
        param_config("kernel", "--profile", type=ProfileType(), default="power:3",
                     help="Radial profile ξ of the convolution kernels"),
        param_config("kernel", "--alpha-seq", type=AlphaSequenceType(), default="geometric:0.5",
                     help="Weights α_k of the dyadic weighted kernels"),
        param_config("kernel", "--degrees", type=IntListType(), default="1,2,4",
                     help="Degrees of the Fejér kernels"),
    ]
    for opt in reversed(opts):
        func = opt(func)
    return func


__all__ = ['argument', 'basis_options', 'command', 'flag', 'kernel_options', 'option', 'param_config']
