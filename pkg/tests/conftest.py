#!/usr/bin/env python
# -*- coding:utf-8 -*-

import numpy as np
import pytest
from click.testing import CliRunner

from ballcalc.basis import dyadic_basis
from ballcalc.config import config


@pytest.fixture
def dyadic2():
    return dyadic_basis(2)[1]


@pytest.fixture
def dyadic4():
    return dyadic_basis(4)[1]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def single_thread():
    config.threads = 1
    yield
    config.threads = None


@pytest.fixture
def run():
    """Invoke the command line the way the console script does"""
    from ballcalc.main import ballcalc

    def invoke(*args):
        return CliRunner().invoke(ballcalc, [str(a) for a in args], standalone_mode=True)
    return invoke
