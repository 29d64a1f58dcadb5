"""Bootstrap and calibration: exact fixtures plus sampling oracles."""

import math

import numpy as np
import pytest

from fineval.errors import (
    CalibrationUnsupportedTask,
    MissingConfidences,
    NoData,
)
from fineval.reliability import (
    BootstrapConfig,
    bootstrap_ci,
    calibration,
    calibration_for_system,
)

from conftest import make_classification, make_ner, noisy_system

ACC = lambda totals: totals[0] / totals[1]


def test_zero_variance_gives_point_interval():
    comp = np.ones((50, 2))  # everyone correct
    low, high = bootstrap_ci(comp, ACC, BootstrapConfig(replicates=200, seed=3))
    assert (low, high) == (1.0, 1.0)


def test_same_seed_same_interval(rng):
    comp = np.column_stack([rng.random(100) < 0.6, np.ones(100)]).astype(float)
    config = BootstrapConfig(replicates=300, seed=42)
    assert bootstrap_ci(comp, ACC, config) == bootstrap_ci(comp, ACC, config)
    other = BootstrapConfig(replicates=300, seed=43)
    assert bootstrap_ci(comp, ACC, config) != bootstrap_ci(comp, ACC, other)


def test_empty_input_raises_nodata():
    with pytest.raises(NoData):
        bootstrap_ci(np.empty((0, 2)), ACC, BootstrapConfig(replicates=10))


def test_interval_contains_point_estimate(rng):
    for seed in range(10):
        outcomes = (rng.random(40) < 0.5).astype(float)
        comp = np.column_stack([outcomes, np.ones(40)])
        point = float(outcomes.mean())
        low, high = bootstrap_ci(
            comp, ACC, BootstrapConfig(replicates=200, seed=seed), point=point
        )
        assert low <= point <= high


def test_coverage_and_width_on_bernoulli_oracle():
    # Monte-Carlo oracle: nominal 95% interval for Bernoulli(0.7), n=1000
    p, n, trials = 0.7, 1000, 60
    data_rng = np.random.default_rng(99)
    covered = 0
    widths = []
    for trial in range(trials):
        outcomes = (data_rng.random(n) < p).astype(float)
        comp = np.column_stack([outcomes, np.ones(n)])
        low, high = bootstrap_ci(
            comp, ACC, BootstrapConfig(replicates=500, seed=trial)
        )
        covered += low <= p <= high
        widths.append(high - low)
    assert covered >= math.floor(0.88 * trials)
    theoretical = 2 * 1.96 * math.sqrt(p * (1 - p) / n)
    assert theoretical / 1.5 <= float(np.mean(widths)) <= 1.5 * theoretical


def test_ci_width_shrinks_with_n(rng):
    # nested sets with the same empirical rate: expected width non-increasing
    wide, narrow = [], []
    for seed in range(50):
        small = np.column_stack([np.tile([1.0, 0.0], 20), np.ones(40)])
        big = np.column_stack([np.tile([1.0, 0.0], 200), np.ones(400)])
        lo, hi = bootstrap_ci(small, ACC, BootstrapConfig(replicates=120, seed=seed))
        wide.append(hi - lo)
        lo, hi = bootstrap_ci(big, ACC, BootstrapConfig(replicates=120, seed=seed))
        narrow.append(hi - lo)
    assert np.mean(narrow) < np.mean(wide)


def test_replicates_validate():
    with pytest.raises(ValueError):
        BootstrapConfig(replicates=0)
    with pytest.raises(ValueError):
        BootstrapConfig(confidence_level=1.0)
    with pytest.raises(ValueError):
        BootstrapConfig(seed=-1)


def test_span_metric_bootstrap_is_deterministic(rng):
    from fineval.analysis import single_analysis

    dataset = make_ner(rng, 40)
    system = noisy_system(rng, dataset, noise=0.1)
    config = BootstrapConfig(replicates=100, seed=7)
    r1 = single_analysis(system, dataset, ["eLen"], config)
    r2 = single_analysis(system, dataset, ["eLen"], config)
    assert [
        (b.ci_low, b.ci_high) for b in r1.per_attribute["eLen"]
    ] == [(b.ci_low, b.ci_high) for b in r2.per_attribute["eLen"]]


# ---------------------------------------------------------------------------
# calibration
# ---------------------------------------------------------------------------


def test_perfectly_confident_and_correct_has_zero_ece():
    report = calibration([1.0, 1.0], [True, True])
    assert report.ece == 0.0
    assert report.bins[-1].n == 2


def test_single_bin_gap_is_ece():
    # all mass in one bin: ECE is exactly the formula value |0.5 - 0.8|,
    # which canonical 5-dp serialization renders as 0.3
    report = calibration([0.8] * 10, [True] * 5 + [False] * 5)
    assert report.ece == abs(0.5 - 0.8)
    assert round(report.ece, 5) == 0.3
    bins = [b for b in report.bins if b.n]
    assert len(bins) == 1
    assert bins[0].mean_confidence == pytest.approx(0.8)
    assert bins[0].accuracy == 0.5


def test_bin_counts_partition_inputs(rng):
    conf = rng.random(500)
    correct = rng.random(500) < conf
    report = calibration(conf, correct, bin_count=10)
    assert sum(report.confidence_histogram) == 500
    assert report.n == 500
    assert 0.0 <= report.ece <= 1.0


def test_right_closed_edges():
    report = calibration([0.1, 0.10001, 0.0], [True, True, True], bin_count=10)
    # 0.0 and 0.1 in the first bin, 0.10001 in the second
    assert report.bins[0].n == 2
    assert report.bins[1].n == 1


def test_ece_permutation_invariant(rng):
    conf = list(rng.random(200))
    correct = list(rng.random(200) < 0.5)
    base = calibration(conf, correct).ece
    order = rng.permutation(200)
    assert calibration(
        [conf[i] for i in order], [correct[i] for i in order]
    ).ece == pytest.approx(base, abs=1e-12)


def test_synthetic_calibrated_data_has_small_ece():
    # correctness ~ Bernoulli(confidence): ECE bounded by binomial noise
    gen = np.random.default_rng(12345)
    conf = gen.random(10000)
    correct = gen.random(10000) < conf
    assert calibration(conf, correct).ece < 0.03


def test_calibration_task_and_confidence_guards(rng):
    ner = make_ner(rng, 5)
    system = noisy_system(rng, ner)
    with pytest.raises(CalibrationUnsupportedTask):
        calibration_for_system(system, ner)
    dataset, plain = make_classification(rng, 20, with_confidence=False)
    with pytest.raises(MissingConfidences):
        calibration_for_system(plain, dataset)
    dataset, confident = make_classification(rng, 20, with_confidence=True)
    report = calibration_for_system(confident, dataset)
    assert report.n == 20
