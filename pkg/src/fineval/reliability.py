"""Bootstrap confidence intervals and calibration diagnostics.

The bootstrap is a percentile bootstrap over whole samples (sentences are
resampled intact for sequence tasks, preserving within-sentence
correlation).  Replicate ``r`` draws from ``default_rng((seed, r))`` —
seeding on the pair rather than ``seed + r`` keeps replicate streams of
different base seeds from overlapping — so results are reproducible for
a fixed seed no matter how replicates are scheduled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    CalibrationUnsupportedTask,
    MissingConfidences,
    NoData,
)


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 1000
    confidence_level: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not 0.0 < self.confidence_level < 1.0:
            raise ValueError("confidence level must be in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def bootstrap_ci(
    components: np.ndarray,
    metric: Callable[[np.ndarray], float],
    config: BootstrapConfig = BootstrapConfig(),
    point: float | None = None,
) -> tuple[float, float]:
    """Percentile interval of ``metric`` over resampled component rows.

    ``components`` holds one additive tally row per contributing sample;
    each replicate resamples rows with replacement, sums them, and applies
    ``metric``.  The returned interval is widened, when necessary, to
    contain the point estimate so reported bars always cover the value.
    """
    comp = np.ascontiguousarray(components, dtype=np.float64)
    m = comp.shape[0]
    if m == 0:
        raise NoData("no contributing samples to resample")
    values = np.empty(config.replicates, dtype=np.float64)
    for r in range(config.replicates):
        rng = np.random.default_rng((config.seed, r))
        idx = rng.integers(0, m, size=m)
        values[r] = metric(comp.take(idx, axis=0).sum(axis=0))
    alpha = 1.0 - config.confidence_level
    low, high = np.quantile(values, [alpha / 2.0, 1.0 - alpha / 2.0])
    low, high = float(low), float(high)
    if point is not None:
        low, high = min(low, point), max(high, point)
    return low, high


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationBin:
    low: float
    high: float  # bin covers (low, high]; the first bin includes 0.0
    n: int
    mean_confidence: float | None
    accuracy: float | None


@dataclass(frozen=True)
class CalibrationReport:
    bins: tuple[CalibrationBin, ...]
    ece: float
    n: int

    @property
    def confidence_histogram(self) -> tuple[int, ...]:
        return tuple(b.n for b in self.bins)


def calibration(
    confidences: Sequence[float],
    correct: Sequence[bool],
    bin_count: int = 10,
) -> CalibrationReport:
    """Equal-width reliability bins over [0,1] with right-closed edges.

    ECE is the bin-size-weighted mean absolute gap between a bin's mean
    confidence and its accuracy; permutation of the inputs cannot change
    it.
    """
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    conf = np.asarray(confidences, dtype=np.float64)
    hits = np.asarray(correct, dtype=np.float64)
    if conf.size == 0:
        raise NoData("no predictions with confidence")
    if conf.size != hits.size:
        raise ValueError("confidences and correctness must align")
    # right-closed: c falls in bin ceil(c*K)-1, with 0.0 in the first bin
    indices = np.ceil(conf * bin_count).astype(int) - 1
    indices = np.clip(indices, 0, bin_count - 1)
    bins: list[CalibrationBin] = []
    ece = 0.0
    for b in range(bin_count):
        mask = indices == b
        n = int(mask.sum())
        low, high = b / bin_count, (b + 1) / bin_count
        if n == 0:
            bins.append(CalibrationBin(low, high, 0, None, None))
            continue
        mean_conf = float(conf[mask].mean())
        accuracy = float(hits[mask].mean())
        ece += (n / conf.size) * abs(accuracy - mean_conf)
        bins.append(CalibrationBin(low, high, n, mean_conf, accuracy))
    return CalibrationReport(tuple(bins), ece, int(conf.size))


def calibration_for_system(system, dataset, bin_count: int = 10) -> CalibrationReport:
    """Calibration of a classification system's confidences against gold."""
    from .core import TaskKind
    from .metrics import _check_compat

    if dataset.task is not TaskKind.TEXT_CLASSIFICATION:
        raise CalibrationUnsupportedTask(
            f"calibration is defined for text classification only, "
            f"not {dataset.task.value}"
        )
    _check_compat(system, dataset)
    if any(p.confidence is None for p in system.predictions):
        raise MissingConfidences(
            "every prediction must carry a confidence for calibration"
        )
    confidences = [p.confidence for p in system.predictions]
    correct = [
        p.label == s.gold_label
        for s, p in zip(dataset.samples, system.predictions)
    ]
    return calibration(confidences, correct, bin_count)
