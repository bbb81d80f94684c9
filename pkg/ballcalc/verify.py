#!/usr/bin/env python
# -*- coding:utf-8 -*-

"""Experiments measuring the constants of the ball calculus on a field corpus

Every experiment returns an ExperimentReport whose rows are produced in the
canonical (field, ball) order, so that reruns give identical CSV files.
"""

import math
from collections import OrderedDict, namedtuple

import numpy as np

from ballcalc.basis import ChainBasis, GridBasis
from ballcalc.errors import BasisError, QueryError
from ballcalc.functional import (
    elementary_norm_inequalities,
    losc_alpha_all,
    mean_all,
    norm,
    starred_sharp_all,
)
from ballcalc.lib import chunks, intcomma, makedirs, parallel_map
from ballcalc.log import get_logger
from ballcalc.maximal import kb_maximal, standard_maximal
from ballcalc.report import ExperimentReport
from ballcalc.space import (
    LP_IDENTITY_TOLERANCE,
    integrate,
    lp_norm_direct,
    lp_norm_from_distribution,
    weak_lp_norm,
    write_field_csv,
)

LOGGER = get_logger(__name__)

NEGLIGIBLE = 1e-9
EXHAUSTIVE_PAIRS = 10 ** 5
DECAY_STEPS = 2.0 ** (np.arange(-12, 25) / 4.0)
# levels examined per step and ball
MAX_DECAY_LEVELS = 1 << 12
LP_EXPONENTS = (1.0, 1.5, 2.0, 3.0)
EQUIVALENCE_ALPHAS = (0.6, 0.75, 0.9)
STABILITY_FACTOR = 2.0


CorpusField = namedtuple("CorpusField", ["name", "field", "descriptor", "seed"])


class Corpus(object):
    """Named fields over the space of one basis"""

    def __init__(self, name, fields):
        self.name = name
        self.fields = list(fields)

    def __iter__(self):
        return iter(self.fields)

    def __len__(self):
        return len(self.fields)

    @property
    def names(self):
        return [entry.name for entry in self.fields]

    def __getitem__(self, name):
        for entry in self.fields:
            if entry.name == name:
                return entry.field
        raise KeyError(name)

    def write(self, directory):
        directory = makedirs(directory)
        return [write_field_csv(str(directory / "{}.csv".format(entry.name)), entry.field) for entry in self]


def _coordinates(space):
    if space.coords is not None:
        return space.coords
    return (np.arange(space.size) / float(space.size))[:, None]


def _cell_sizes(space):
    if space.shape is not None:
        return 1.0 / np.array(space.shape, dtype=float)
    return np.full(_coordinates(space).shape[1], 1.0 / space.size)


def _splits(b):
    """(parent members, children members) of the nested partitions a martingale walks down"""
    if isinstance(b, ChainBasis):
        children = OrderedDict()
        for i in range(b.count):
            if b.parents[i] >= 0:
                children.setdefault(int(b.parents[i]), []).append(b.members_of(i))
        return [(b.members_of(parent), kids) for parent, kids in children.items()]
    if isinstance(b, GridBasis):
        first = b.grid[:, 0]
        size = b.n
    else:
        first = np.arange(b.space.size)
        size = b.space.size
    res = []
    intervals = [(0, size)]
    while intervals:
        start, stop = intervals.pop(0)
        if stop - start < 2:
            continue
        middle = (start + stop) // 2
        halves = [(start, middle), (middle, stop)]
        res.append((
            np.flatnonzero((first >= start) & (first < stop)),
            [np.flatnonzero((first >= a) & (first < z)) for a, z in halves],
        ))
        intervals.extend(halves)
    return res


def martingale_field(b, rng):
    """Sum of zero-mean jumps of size 1 along the nested partitions of the basis"""
    weights = b.space.weights
    values = np.zeros(b.space.size)
    for parent, children in _splits(b):
        signs = rng.choice((-1.0, 1.0), size=len(children))
        masses = np.array([weights[c].sum() for c in children])
        jumps = signs - np.dot(signs, masses) / weights[parent].sum()
        top = np.max(np.abs(jumps))
        if top == 0:
            continue
        for child, jump in zip(children, jumps / top):
            values[child] += jump
    return values


def corpus_standard(b, seed):
    """The constant, indicator, log-singularity, martingale, sawtooth and point-mass fields"""
    space = b.space
    rng = np.random.default_rng(seed)
    coords = _coordinates(space)
    first = coords[:, 0]
    centres = coords + _cell_sizes(space)[None, :] / 2.0
    fields = [
        ("constant", np.full(space.size, 1.5), "constant:1.5"),
        ("indicator", (first < 0.5).astype(float), "indicator:first-half"),
        ("log-singularity", np.log(1.0 / np.sqrt((centres ** 2).sum(axis=1))), "log(1/|x|)"),
        ("martingale", martingale_field(b, rng), "martingale:jumps=1"),
        ("sawtooth", np.mod(4.0 * first, 1.0), "frac(4x)"),
        ("point-mass", np.where(np.arange(space.size) == 0, 1.0 / space.weights[0], 0.0), "point-mass:0"),
    ]
    return Corpus("standard", [CorpusField(name, space.field(values), descriptor, seed)
                               for name, values, descriptor in fields])


def _config(**kwargs):
    return OrderedDict((key, value) for key, value in kwargs.items())


def exp_t2_ratio(g, corpus, alpha):
    """LOSC_(B,α)(M_G f)(1-α) / (I(ω) ⟨f⟩*_(#,B)) for every ball and field"""
    b = g.basis
    i_omega = g.kernels.i_omega
    report = ExperimentReport("t2-ratio", ["field", "ball", "losc", "starred_sharp", "ratio"],
                              _config(basis=b.name, kernels=g.kernels.name, alpha=alpha, I_omega=i_omega))
    if not math.isfinite(i_omega):
        report.note("I(ω) diverges, every ratio is 0")
    for entry in corpus:
        maximal = kb_maximal(entry.field, g).values
        losc = losc_alpha_all(maximal, b, alpha)
        starred = starred_sharp_all(entry.field, b)
        scale = max(1.0, float(np.max(np.abs(maximal.values))))
        for i in range(b.count):
            if starred[i] > 0:
                ratio = losc[i] * (1.0 - alpha) / (i_omega * starred[i])
            elif losc[i] <= NEGLIGIBLE * scale:
                ratio = 0.0
            else:
                report.violation("{}: ball {} has LOSC {!r} with a vanishing starred sharp function".format(
                    entry.name, i, losc[i]))
                ratio = math.inf
            report.add(entry.name, i, losc[i], starred[i], ratio)
    return report


def exp_bmo_blo(g, corpus):
    """‖M_G f‖_BLO / (I(ω) ‖f‖_BMO) for each field of positive BMO norm"""
    b = g.basis
    i_omega = g.kernels.i_omega
    report = ExperimentReport("bmo-blo", ["field", "bmo", "blo_of_maximal", "ball", "ratio"],
                              _config(basis=b.name, kernels=g.kernels.name, I_omega=i_omega))
    for entry in corpus:
        bmo = norm(entry.field, b, "BMO")
        if bmo.value <= 0:
            report.note("{} excluded: its BMO norm is 0".format(entry.name))
            continue
        blo = norm(kb_maximal(entry.field, g).values, b, "BLO")
        report.add(entry.name, bmo.value, blo.value, blo.witness, blo.value / (i_omega * bmo.value))
    return report


def _level_masses(magnitudes, weights, levels):
    """μ{|g| > λ} for every λ of levels, magnitudes sorted increasingly"""
    tails = np.concatenate((np.cumsum(weights[::-1])[::-1], [0.0]))
    return tails[np.searchsorted(magnitudes, levels, side="right")]


def _decay_ratios(magnitudes, weights, total, unit, tau):
    """For each step c, the largest successive level mass ratio past the threshold

    The levels are λ_n = n c unit. The ratios m(λ_(n+1))/m(λ_n) are taken from
    the first n with m(λ_n) <= τ μ(B), while m(λ_n) > 0.
    """
    top = magnitudes[-1] if magnitudes.size else 0.0
    count = int(math.ceil(top / (DECAY_STEPS[0] * unit))) + 2
    if count > MAX_DECAY_LEVELS:
        LOGGER.debug("Only the first {} of {} levels examined".format(MAX_DECAY_LEVELS, count))
        count = MAX_DECAY_LEVELS
    levels = DECAY_STEPS[:, None] * np.arange(count)[None, :] * unit
    masses = _level_masses(magnitudes, weights, levels.reshape(-1)).reshape(levels.shape)
    below = masses <= tau * total * (1 + 1e-12)
    started = np.cumsum(below, axis=1) > 0
    current, following = masses[:, :-1], masses[:, 1:]
    usable = started[:, :-1] & (current > 0)
    ratios = np.where(usable, following / np.where(current > 0, current, 1.0), 0.0)
    return ratios.max(axis=1)


def _centered(f, b, centering):
    if centering == "mean":
        centers = mean_all(f, b)
    elif centering == "inf":
        centers = b.minima(f.values)
    else:
        raise QueryError("Unknown centering {}, expected mean or inf".format(centering))
    return centers


def exp_prop_p_decay(b, corpus, alpha, epsilon=0.5, centering="mean"):
    """Geometric decay of the level sets of f - f_B past the threshold τ = θ/(5Kβ²)

    The step c of the levels λ_n = n c ‖f‖ is calibrated: the smallest c of
    the candidate grid whose largest ratio over the corpus is at most ε.
    """
    constants = b.constants
    theta, k_value, beta = constants["theta"], constants["K"], constants["beta"]
    if not theta > 0:
        raise BasisError("The decay experiment needs a regular basis, {} has θ = 0".format(b.name))
    tau = theta / (5.0 * k_value * beta ** 2)
    kind = "BMO_alpha" if centering == "mean" else "BLO_alpha"
    report = ExperimentReport(
        "prop-p-decay", ["field", "ball", "step", "ratio"],
        _config(basis=b.name, alpha=alpha, epsilon=epsilon, centering=centering, theta=theta, K=k_value,
                beta=beta, tau=tau))
    report.extra["alpha_from_epsilon"] = 1.0 - epsilon * theta / (4.0 * beta ** 2 * k_value)
    weights = b.space.weights
    per_field = []
    for entry in corpus:
        unit = norm(entry.field, b, kind, alpha).value
        if unit <= 0:
            report.note("{} excluded: its {} norm is 0".format(entry.name, kind))
            continue
        centers = _centered(entry.field, b, centering)

        def block(sl, f=entry.field, centers=centers, unit=unit):
            res = []
            for i in range(sl.start, sl.stop):
                members = b.members_of(i)
                magnitudes = np.abs(f.values[members] - centers[i])
                order = np.argsort(magnitudes, kind="stable")
                res.append(_decay_ratios(magnitudes[order], weights[members][order], b.measures[i], unit, tau))
            return res
        ratios = np.array([r for part in parallel_map(block, chunks(b.count, 256)) for r in part])
        per_field.append((entry, ratios, unit, centers))
    if not per_field:
        report.extra["calibrated_step"] = 0.0
        return report
    worst = np.max([ratios.max(axis=0) for _, ratios, _, _ in per_field], axis=0)
    fitting = np.flatnonzero(worst <= epsilon)
    if fitting.size:
        step = int(fitting[0])
    else:
        step = DECAY_STEPS.size - 1
        report.violation("no step up to {:g} brings the level mass ratios below {:g}".format(DECAY_STEPS[-1], epsilon))
    c = float(DECAY_STEPS[step])
    report.extra["calibrated_step"] = c
    full = b.full_ids[0] if b.full_ids.size else int(np.argmax(b.measures))
    for entry, ratios, unit, centers in per_field:
        for i in range(b.count):
            report.add(entry.name, i, c, ratios[i, step])
        report.extra["slope:{}".format(entry.name)] = _tail_slope(entry.field, b, full, centers, c * unit)
    LOGGER.debug("Decay step calibrated to {:g} over {} fields".format(c, len(per_field)))
    return report


def _tail_slope(f, b, ball, centers, spacing):
    """Least squares slope of log μ{|g| > λ} against λ on one ball"""
    members = b.members_of(ball)
    magnitudes = np.abs(f.values[members] - centers[ball])
    order = np.argsort(magnitudes, kind="stable")
    magnitudes, weights = magnitudes[order], b.space.weights[members][order]
    levels = np.arange(int(math.ceil(magnitudes[-1] / spacing)) + 1) * spacing
    masses = _level_masses(magnitudes, weights, levels)
    alive = masses > 0
    if alive.sum() < 2:
        return math.nan
    return float(np.polyfit(levels[alive], np.log(masses[alive]), 1)[0])


def exp_norm_equivalence(b, corpus, alphas=EQUIVALENCE_ALPHAS):
    """BMO/BMO_α and BLO/BLO_α per field, for each α in (1/2, 1)"""
    for alpha in alphas:
        if not 0.5 < alpha < 1:
            raise QueryError("The norm equivalence needs alpha in (1/2, 1), got {}".format(alpha))
    report = ExperimentReport("norm-equivalence", ["field", "alpha", "pair", "numerator", "denominator", "ratio"],
                              _config(basis=b.name, alphas=" ".join(str(a) for a in alphas)))
    for entry in corpus:
        bmo = norm(entry.field, b, "BMO").value
        blo = norm(entry.field, b, "BLO").value
        for alpha in alphas:
            for pair, numerator, kind in (("BMO/BMO_alpha", bmo, "BMO_alpha"), ("BLO/BLO_alpha", blo, "BLO_alpha")):
                denominator = norm(entry.field, b, kind, alpha).value
                if numerator <= 0 and denominator <= 0:
                    report.note("{} excluded from {} at alpha={}: 0/0".format(entry.name, pair, alpha))
                    continue
                ratio = numerator / denominator if denominator > 0 else math.inf
                report.add(entry.name, alpha, pair, numerator, denominator, ratio)
    report.extra["min_ratio"] = report.minimum()
    return report


def _log_factor(big, small):
    return 1.0 + math.log2(big / small)


def _nested_pairs(b, rng, sample_size):
    """(A, B) with A ⊆ B, all of them when few enough, else sampled"""
    pairs, total = [], 0
    for a in range(b.count):
        sups = b.superset_ids(a)
        total += sups.size
        if total > EXHAUSTIVE_PAIRS:
            break
        pairs.extend((a, int(s)) for s in sups)
    else:
        return pairs, False
    res = []
    for a in rng.integers(0, b.count, size=sample_size):
        sups = b.superset_ids(int(a))
        res.append((int(a), int(sups[rng.integers(0, sups.size)])))
    return res, True


def _meeting_pairs(b, rng, sample_size):
    """(A, B) with A ∩ B nonempty and μ(A) <= μ(B)"""
    keys, slack = b._keys

    def partners(a):
        meets = b._intersections([a])[0] > 0
        return np.flatnonzero(meets & (keys >= keys[a] * (1 - slack)))
    pairs, total = [], 0
    for a in range(b.count):
        others = partners(a)
        total += others.size
        if total > EXHAUSTIVE_PAIRS:
            break
        pairs.extend((a, int(o)) for o in others)
    else:
        return pairs, False
    res = []
    for a in rng.integers(0, b.count, size=sample_size):
        others = partners(int(a))
        res.append((int(a), int(others[rng.integers(0, others.size)])))
    return res, True


def exp_lemma_inequalities(g, corpus, seed=0, sample_size=2000):
    """Normalized sides of the two-ball lemmas, over exhaustive or sampled pairs

    average-gap: |f_A - f_B| against (μ(B)/μ(A)) ⟨f⟩*_(#,A) when A meets B and
    μ(A) <= μ(B). mean-deviation: ⟨f - f_A⟩_B against (1 + log2(μ(B)/μ(A)))
    ⟨f⟩*_(#,A) for A ⊆ B, kernel-deviation the same with φ averages and I(ω).
    far-distance: μ(B)/d(x,A) over x outside the hull of B, for A ⊆ B.
    """
    b = g.basis
    ks = g.kernels
    i_omega = ks.i_omega
    rng = np.random.default_rng(seed)
    nested, nested_sampled = _nested_pairs(b, rng, sample_size)
    meeting, meeting_sampled = _meeting_pairs(b, rng, sample_size)
    report = ExperimentReport(
        "lemma-inequalities", ["lemma", "field", "a", "b", "lhs", "rhs", "ratio"],
        _config(basis=b.name, kernels=ks.name, seed=seed, nested_pairs=len(nested), nested_sampled=nested_sampled,
                meeting_pairs=len(meeting), meeting_sampled=meeting_sampled))
    weights = b.space.weights
    measures = b.measures

    def ratio_of(lhs, rhs, scale):
        if rhs > 0:
            return lhs / rhs
        return 0.0 if lhs <= NEGLIGIBLE * scale else math.inf

    for entry in corpus:
        f = entry.field
        means = mean_all(f, b)
        starred = starred_sharp_all(f, b)
        scale = max(1.0, float(np.max(np.abs(f.values))))
        kernel_means = ks.averages(f.values)
        for a, c in meeting:
            lhs = abs(means[a] - means[c])
            rhs = measures[c] / measures[a] * starred[a]
            report.add("average-gap", entry.name, a, c, lhs, rhs, ratio_of(lhs, rhs, scale))
        for a, c in nested:
            members = b.members_of(c)
            lhs = float(np.dot(np.abs(f.values[members] - means[a]), weights[members]) / measures[c])
            rhs = _log_factor(measures[c], measures[a]) * starred[a]
            report.add("mean-deviation", entry.name, a, c, lhs, rhs, ratio_of(lhs, rhs, scale))
        for a, c in nested:
            if not (ks.has_kernel(a) and ks.has_kernel(c)):
                continue
            lhs = float(np.dot(np.abs(f.values - kernel_means[a]) * weights, ks.row(c)))
            rhs = i_omega * _log_factor(measures[c], measures[a]) * starred[a]
            report.add("kernel-deviation", entry.name, a, c, lhs, rhs, ratio_of(lhs, rhs, scale))
    for a, c in nested:
        outside = ~b.membership[b.hull_ids[c]]
        if not outside.any():
            continue
        nearest = float(b.distance_rows([a])[0][outside].min())
        report.add("far-distance", "", a, c, nearest, measures[c], measures[c] / nearest)
    for lemma in ("average-gap", "mean-deviation", "kernel-deviation", "far-distance"):
        rows = [row for row in report.rows if row[0] == lemma]
        report.extra["max_ratio:{}".format(lemma)] = report.aggregate(rows=rows)[0]
    far = report.extra["max_ratio:far-distance"]
    if far > 1.0 + 1e-12:
        report.violation("a point outside the hull of B is closer than μ(B) to a ball inside B (ratio {!r})".format(far))
    LOGGER.debug("Scanned {} nested and {} meeting pairs".format(intcomma(len(nested)), intcomma(len(meeting))))
    return report


def exp_weak_l1(b, corpus):
    """sup_λ λ μ{Mf > λ} / ‖f‖_1 per field"""
    report = ExperimentReport("weak-l1", ["field", "l1", "weak_l1_of_maximal", "ratio"], _config(basis=b.name))
    for entry in corpus:
        l1 = integrate(abs(entry.field))
        if l1 <= 0:
            report.note("{} excluded: it vanishes".format(entry.name))
            continue
        weak = weak_lp_norm(standard_maximal(entry.field, b).values, 1)
        report.add(entry.name, l1, weak, weak / l1)
    return report


def exp_lp_identity(corpus, exponents=LP_EXPONENTS):
    """‖f‖_p from the distribution function against direct summation"""
    report = ExperimentReport(
        "lp-identity", ["field", "p", "from_distribution", "direct", "relative_difference", "weak", "ratio"],
        _config(exponents=" ".join("{:g}".format(p) for p in exponents)))
    for entry in corpus:
        for p in exponents:
            from_distribution = lp_norm_from_distribution(entry.field, p)
            direct = lp_norm_direct(entry.field, p)
            scale = max(from_distribution, direct)
            difference = abs(from_distribution - direct) / scale if scale > 0 else 0.0
            weak = weak_lp_norm(entry.field, p)
            report.add(entry.name, p, from_distribution, direct, difference, weak, weak / direct if direct else 0.0)
            if difference > LP_IDENTITY_TOLERANCE:
                report.violation("{} p={:g}: the two L^p computations differ by {:g}".format(entry.name, p, difference))
            if weak > direct * (1 + 1e-12):
                report.violation("{} p={:g}: the weak norm exceeds the strong one".format(entry.name, p))
    return report


def exp_elementary(b, corpus, alpha):
    report = ExperimentReport("elementary", ["field", "inequality", "lhs", "rhs", "slack", "ratio"],
                              _config(basis=b.name, alpha=alpha))
    for entry in corpus:
        for inequality in elementary_norm_inequalities(entry.field, b, alpha):
            ratio = inequality.lhs / inequality.rhs if inequality.rhs > 0 else 0.0
            report.add(entry.name, inequality.name, inequality.lhs, inequality.rhs, inequality.slack, ratio)
            if not inequality.passed:
                report.violation("{}: {} fails by {!r}".format(entry.name, inequality.name, -inequality.slack))
    return report


def refinement_stability(coarse, fine):
    """(max/min of the two aggregates, whether it stays below 2)"""
    a, b = coarse.aggregate()[0], fine.aggregate()[0]
    if a == 0 and b == 0:
        ratio = 1.0
    elif a == 0 or b == 0:
        ratio = math.inf
    else:
        ratio = max(a, b) / min(a, b)
    return ratio, ratio < STABILITY_FACTOR


EXPERIMENTS = OrderedDict([
    ("t2-ratio", True),
    ("bmo-blo", True),
    ("prop-p-decay", False),
    ("norm-equivalence", False),
    ("lemma-inequalities", True),
    ("weak-l1", False),
    ("lp-identity", False),
    ("elementary", False),
])


def needs_kernels(name):
    return EXPERIMENTS[name]


def run_experiment(name, b, g, corpus, alpha=0.75, epsilon=0.5, centering="mean", alphas=EQUIVALENCE_ALPHAS,
                   exponents=LP_EXPONENTS, seed=0, sample_size=2000):
    """Run one experiment by name, g being the kernel couple for those needing one"""
    if name not in EXPERIMENTS:
        raise QueryError("Unknown experiment {}, expected one of {}".format(name, ", ".join(EXPERIMENTS)))
    LOGGER.status("Running {} on {} ({} fields)".format(name, b.name, len(corpus)))
    if name == "t2-ratio":
        return exp_t2_ratio(g, corpus, alpha)
    if name == "bmo-blo":
        return exp_bmo_blo(g, corpus)
    if name == "prop-p-decay":
        return exp_prop_p_decay(b, corpus, alpha, epsilon=epsilon, centering=centering)
    if name == "norm-equivalence":
        return exp_norm_equivalence(b, corpus, alphas)
    if name == "lemma-inequalities":
        return exp_lemma_inequalities(g, corpus, seed=seed, sample_size=sample_size)
    if name == "weak-l1":
        return exp_weak_l1(b, corpus)
    if name == "lp-identity":
        return exp_lp_identity(corpus, exponents)
    return exp_elementary(b, corpus, alpha)
