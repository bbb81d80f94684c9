#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Averages, sharp functions, oscillations and the BMO/BLO family of norms

SUP, INF and the oscillations use the signed values of f. The averages fed to
the maximal operators and starred_avg use |f|.
"""

import itertools
from collections import namedtuple

import numpy as np

from ballcalc.basis import ball_id
from ballcalc.errors import QueryError, SpaceError
from ballcalc.lib import chunks, parallel_map
from ballcalc.log import get_logger

LOGGER = get_logger(__name__)

NORM_KINDS = ("BMO", "BLO", "BMO_alpha", "BLO_alpha")
ORACLE_LIMIT = 14
INEQUALITY_TOLERANCE = 1e-9


def _members(b, ball):
    return b.members_of(ball_id(ball))


def avg(f, ball, b):
    """f_B, the mean of f over B"""
    members = _members(b, ball)
    values = f.values[members]
    if values.min() == values.max():
        return float(values[0])
    return float(np.dot(values, f.space.weights[members]) / b.measures[ball_id(ball)])


def abs_avg(f, ball, b):
    return avg(abs(f), ball, b)


def sharp(f, ball, b):
    """⟨f - f_B⟩_B, the mean absolute deviation of f about f_B"""
    members = _members(b, ball)
    center = avg(f, ball, b)
    return float(np.dot(np.abs(f.values[members] - center), f.space.weights[members]) / b.measures[ball_id(ball)])


def starred_avg(f, ball, b):
    """max of abs_avg over the balls containing B"""
    return max(abs_avg(f, a, b) for a in b.superset_ids(ball))


def starred_sharp(f, ball, b):
    return max(sharp(f, a, b) for a in b.superset_ids(ball))


def osc_set(f, e):
    """(SUP_E f, INF_E f, OSC_E f)"""
    if not len(e):
        raise SpaceError("The oscillation of a field over an empty set is undefined")
    values = f.restricted(e)
    top, bottom = float(values.max()), float(values.min())
    return top, bottom, top - bottom


class OscillationQuery(object):
    def __init__(self, field, ball, basis, alpha):
        if not 0 < alpha < 1:
            raise QueryError("alpha must lie in (0, 1), got {}".format(alpha))
        self.field = field
        self.ball = ball_id(ball)
        self.basis = basis
        self.alpha = float(alpha)

    def sorted_ball(self):
        return _sorted_ball(self.field, self.basis, self.ball, self.alpha)


def _sorted_ball(f, b, ball, alpha):
    """Values of f on B sorted, their masses and the threshold αμ(B)

    Masses are point counts on uniform spaces so the strict comparison with
    the threshold is exact.
    """
    members = b.members_of(ball)
    values = f.values[members]
    order = np.argsort(values, kind="stable")
    if f.space.is_uniform:
        masses = np.ones(members.size)
    else:
        masses = f.space.weights[members][order]
    cumulated = np.concatenate(([0.0], np.cumsum(masses)))
    return values[order], masses, cumulated, alpha * cumulated[-1]


def _osc_alpha_sorted(values, cumulated, threshold):
    # first end e with cumulated[e] - cumulated[i] > threshold, for each start i
    ends = np.searchsorted(cumulated, cumulated[:-1] + threshold, side="right")
    valid = ends <= values.size
    starts = np.flatnonzero(valid)
    return float(np.min(values[ends[valid] - 1] - values[starts]))


def _losc_alpha_sorted(values, cumulated, threshold):
    end = np.searchsorted(cumulated, threshold, side="right")
    return float(values[end - 1] - values[0])


def osc_alpha(q):
    """OSC_(B,α) f: the least b - a with μ{x in B: a <= f(x) <= b} > αμ(B)"""
    values, _, cumulated, threshold = q.sorted_ball()
    return _osc_alpha_sorted(values, cumulated, threshold)


def losc_alpha(q):
    """LOSC_(B,α) f: the least v - INF_B f with μ{x in B: f(x) <= v} > αμ(B)"""
    values, _, cumulated, threshold = q.sorted_ball()
    return _losc_alpha_sorted(values, cumulated, threshold)


def _subsets(q):
    values, masses, cumulated, threshold = q.sorted_ball()
    if values.size > ORACLE_LIMIT:
        raise QueryError("The subset oracle is limited to {} points, the ball has {}".format(
            ORACLE_LIMIT, values.size))
    masks = ((np.arange(1, 2 ** values.size)[:, None] >> np.arange(values.size)) & 1).astype(bool)
    heavy = masks[(masks * masses[None, :]).sum(axis=1) > threshold]
    return values, heavy


def exhaustive_osc_alpha(q):
    """min of OSC_E f over every E ⊂ B with μ(E) > αμ(B)"""
    values, heavy = _subsets(q)
    tops = np.where(heavy, values[None, :], -np.inf).max(axis=1)
    bottoms = np.where(heavy, values[None, :], np.inf).min(axis=1)
    return float(np.min(tops - bottoms))


def exhaustive_losc_alpha(q):
    """min of SUP_E f - INF_B f over every E ⊂ B with μ(E) > αμ(B) and INF_E f = INF_B f"""
    values, heavy = _subsets(q)
    bottoms = np.where(heavy, values[None, :], np.inf).min(axis=1)
    heavy = heavy[bottoms == values[0]]
    tops = np.where(heavy, values[None, :], -np.inf).max(axis=1)
    return float(np.min(tops - values[0]))


def mean_all(f, b):
    """f_B for every ball, exactly the common value on the balls where f is constant"""
    means = b.averages(f.values)
    bottoms = b.minima(f.values)
    return np.where(b.maxima(f.values) == bottoms, bottoms, means)


def abs_mean_all(f, b):
    return mean_all(abs(f), b)


def sharp_all(f, b):
    means = mean_all(f, b)
    deviations = np.abs(f.values[b.flat] - np.repeat(means, b.sizes)) * f.space.weights[b.flat]
    return np.add.reduceat(deviations, b.offsets) / b.measures


def inf_all(f, b):
    return b.minima(f.values)


def sup_all(f, b):
    return b.maxima(f.values)


def starred_sharp_all(f, b):
    return b.starred_max(sharp_all(f, b))


def starred_avg_all(f, b):
    return b.starred_max(abs_mean_all(f, b))


def _per_ball(f, b, alpha, function):
    OscillationQuery(f, 0, b, alpha)

    def block(sl):
        res = []
        for i in range(sl.start, sl.stop):
            values, _, cumulated, threshold = _sorted_ball(f, b, i, alpha)
            res.append(function(values, cumulated, threshold))
        return res
    return np.array(list(itertools.chain.from_iterable(parallel_map(block, chunks(b.count, 512)))))


def osc_alpha_all(f, b, alpha):
    return _per_ball(f, b, alpha, _osc_alpha_sorted)


def losc_alpha_all(f, b, alpha):
    return _per_ball(f, b, alpha, _losc_alpha_sorted)


NormReport = namedtuple("NormReport", ["kind", "value", "witness", "per_ball"])


def norm(f, b, kind, alpha=None):
    """‖f‖ of the given kind, the max over every ball with its first witness"""
    if kind not in NORM_KINDS:
        raise QueryError("Unknown norm {}, expected one of {}".format(kind, ", ".join(NORM_KINDS)))
    if kind == "BMO":
        table = sharp_all(f, b)
    elif kind == "BLO":
        table = mean_all(f, b) - inf_all(f, b)
    else:
        if alpha is None:
            raise QueryError("The {} norm needs alpha".format(kind))
        table = osc_alpha_all(f, b, alpha) if kind == "BMO_alpha" else losc_alpha_all(f, b, alpha)
    witness = int(np.argmax(table))
    return NormReport(kind, float(table[witness]), witness, table)


def norms(f, b, alpha):
    return [norm(f, b, kind, alpha) for kind in NORM_KINDS]


Inequality = namedtuple("Inequality", ["name", "lhs", "rhs", "slack", "passed"])


def elementary_norm_inequalities(f, b, alpha):
    """The five elementary comparisons between the norms, with their slack"""
    bmo, blo, bmo_alpha, blo_alpha = (report.value for report in norms(f, b, alpha))
    sup_norm = float(np.max(np.abs(f.values)))
    factor = 2.0 / (1.0 - alpha)
    sides = [
        ("BMO_alpha <= BLO_alpha", bmo_alpha, blo_alpha),
        ("BMO <= 2 BLO", bmo, 2 * blo),
        ("BMO_alpha <= 2(1-alpha)^-1 BMO", bmo_alpha, factor * bmo),
        ("BLO_alpha <= 2(1-alpha)^-1 BLO", blo_alpha, factor * blo),
        ("BLO <= 2 sup|f|", blo, 2 * sup_norm),
    ]
    res = []
    for name, lhs, rhs in sides:
        slack = rhs - lhs
        tolerance = INEQUALITY_TOLERANCE * max(1.0, abs(lhs), abs(rhs))
        res.append(Inequality(name, lhs, rhs, slack, slack >= -tolerance))
    return res
