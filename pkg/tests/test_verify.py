#!/usr/bin/env python
# -*- coding:utf-8 -*-

import math

import numpy as np
import pytest

from ballcalc.basis import GridBasis, dyadic_basis
from ballcalc.errors import QueryError
from ballcalc.kernel import indicator_kernels
from ballcalc.maximal import weak_l1_ratio
from ballcalc.report import ExperimentReport
from ballcalc.space import integrate
from ballcalc.verify import (
    DECAY_STEPS,
    EXPERIMENTS,
    Corpus,
    _decay_ratios,
    corpus_standard,
    exp_bmo_blo,
    exp_elementary,
    exp_lemma_inequalities,
    exp_lp_identity,
    exp_norm_equivalence,
    exp_prop_p_decay,
    exp_t2_ratio,
    exp_weak_l1,
    refinement_stability,
    run_experiment,
)


@pytest.fixture
def corpus(dyadic4):
    return corpus_standard(dyadic4, 7)


@pytest.fixture
def couple(dyadic4):
    return indicator_kernels(dyadic4).couple()


def test_standard_corpus(dyadic4, corpus):
    assert corpus.names == ["constant", "indicator", "log-singularity", "martingale", "sawtooth", "point-mass"]
    assert integrate(corpus["point-mass"]) == pytest.approx(1)
    assert integrate(corpus["martingale"]) == pytest.approx(0, abs=1e-12)
    assert integrate(corpus["indicator"]) == 0.5
    assert set(corpus["constant"].values) == {1.5}


def test_corpus_is_seeded(dyadic4):
    first = corpus_standard(dyadic4, 3)["martingale"].values
    assert list(first) == list(corpus_standard(dyadic4, 3)["martingale"].values)


def test_corpus_on_a_grid():
    b = GridBasis(2, 8)
    corpus = corpus_standard(b, 0)
    assert len(corpus) == 6
    assert integrate(corpus["martingale"]) == pytest.approx(0, abs=1e-12)


def test_corpus_files(dyadic4, corpus, tmp_path):
    paths = corpus.write(str(tmp_path))
    assert sorted(p.name for p in paths) == sorted(name + ".csv" for name in corpus.names)


def test_t2_ratio(dyadic4, corpus, couple):
    report = exp_t2_ratio(couple, corpus, 0.75)
    assert report.passed
    assert len(report.rows) == len(corpus) * dyadic4.count
    value, witness = report.aggregate()
    assert 0 < value < math.inf
    assert witness[report.headers.index("ratio")] == value


def test_bmo_blo_skips_constant_fields(corpus, couple):
    report = exp_bmo_blo(couple, corpus)
    assert "constant" not in report.column("field")
    assert len(report.rows) == len(corpus) - 1
    assert any("constant" in note for note in report.notes)


def test_prop_p_decay(dyadic4, corpus):
    report = exp_prop_p_decay(dyadic4, corpus, 0.75)
    assert report.extra["calibrated_step"] in DECAY_STEPS
    assert 0 < report.extra["alpha_from_epsilon"] < 1
    assert "slope:indicator" in report.extra
    with pytest.raises(QueryError):
        exp_prop_p_decay(dyadic4, corpus, 0.75, centering="median")


def test_norm_equivalence(dyadic4, corpus):
    report = exp_norm_equivalence(dyadic4, corpus)
    assert report.extra["min_ratio"] > 0
    assert set(report.column("alpha")) == {0.6, 0.75, 0.9}
    with pytest.raises(QueryError):
        exp_norm_equivalence(dyadic4, corpus, (0.4,))


def test_lemma_inequalities(dyadic4, corpus, couple):
    report = exp_lemma_inequalities(couple, corpus)
    assert report.passed
    assert report.config["nested_sampled"] is False
    assert report.extra["max_ratio:far-distance"] == pytest.approx(0.25)
    # the kernels are the ball indicators: both deviations coincide
    assert report.extra["max_ratio:kernel-deviation"] == pytest.approx(report.extra["max_ratio:mean-deviation"])


def test_weak_l1_on_dyadic(dyadic4, corpus):
    report = exp_weak_l1(dyadic4, corpus)
    assert report.aggregate()[0] <= 1 + 1e-12
    for name, ratio in zip(report.column("field"), report.column("ratio")):
        assert ratio == pytest.approx(weak_l1_ratio(corpus[name], dyadic4))


def test_decay_levels_are_capped():
    magnitudes = np.array([0.0, 1.0])
    ratios = _decay_ratios(magnitudes, np.array([0.5, 0.5]), 1.0, 1e-9, 0.5)
    assert ratios.shape == DECAY_STEPS.shape
    assert np.all(ratios <= 1)


def test_lp_identity(corpus):
    report = exp_lp_identity(corpus)
    assert report.passed
    assert max(report.column("relative_difference")) < 1e-10


def test_elementary(dyadic4, corpus):
    report = exp_elementary(dyadic4, corpus, 0.75)
    assert report.passed
    assert len(report.rows) == 5 * len(corpus)


def test_refinement_stability():
    coarse = ExperimentReport("x", ["ratio"])
    fine = ExperimentReport("x", ["ratio"])
    assert refinement_stability(coarse, fine) == (1.0, True)
    coarse.add(1.0)
    fine.add(1.5)
    assert refinement_stability(coarse, fine) == (1.5, True)
    fine.add(3.0)
    assert refinement_stability(coarse, fine) == (3.0, False)


def test_run_experiment_by_name(dyadic4, corpus, couple):
    for name, kernels in EXPERIMENTS.items():
        report = run_experiment(name, dyadic4, couple if kernels else None, corpus)
        assert report.name == name
    with pytest.raises(QueryError):
        run_experiment("nope", dyadic4, None, corpus)


def test_reports_do_not_depend_on_the_threads(dyadic4, corpus, couple):
    from ballcalc.config import config
    single = exp_t2_ratio(couple, corpus, 0.75).to_csv()
    config.threads = 4
    assert exp_t2_ratio(couple, corpus, 0.75).to_csv() == single


def _maximal_aggregates(b):
    corpus = corpus_standard(b, 0)
    couple = indicator_kernels(b).couple()
    t2 = exp_t2_ratio(couple, corpus, 0.75)
    bmo_blo = exp_bmo_blo(couple, corpus)
    assert t2.passed
    assert all(math.isfinite(report.aggregate()[0]) for report in (t2, bmo_blo))
    assert all(ratio == 0 for ratio in t2.column("ratio")[:b.count])
    return t2, bmo_blo


@pytest.mark.parametrize("coarse, fine", [
    (lambda: dyadic_basis(8)[1], lambda: dyadic_basis(10)[1]),
    (lambda: GridBasis(1, 128), lambda: GridBasis(1, 256)),
])
def test_maximal_experiments_are_stable_under_refinement(coarse, fine):
    for before, after in zip(_maximal_aggregates(coarse()), _maximal_aggregates(fine())):
        assert refinement_stability(before, after)[1]


@pytest.mark.parametrize("make", [lambda: dyadic_basis(10)[1], lambda: GridBasis(1, 256)])
def test_level_sets_of_the_log_singularity_decay(make):
    b = make()
    corpus = corpus_standard(b, 0)
    singular = Corpus("log", [entry for entry in corpus if entry.name == "log-singularity"])
    report = exp_prop_p_decay(b, singular, 0.75)
    assert report.passed
    assert report.aggregate()[0] <= 0.5
