"""Holistic and per-bucket metric math: accuracy, span-level F1, mean score.

Tallies are additive count vectors, so any union of disjoint unit sets is
scored by summing component rows.  All bucket/overall values in reports
reduce to ``metric_value`` over a summed tally, which is what makes the
reconciliation identities (sum of bucket tallies == overall tally) exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Dataset,
    Span,
    SystemOutput,
    TaskKind,
    extract_spans,
)
from .errors import SampleCountMismatch, TaskMismatch

ACCURACY = "accuracy"
SPAN_F1 = "span-f1"
MEAN_SCORE = "mean-score"

# component layout per metric; every tally is a float vector in this order
COMPONENTS = {
    ACCURACY: ("correct", "total"),
    SPAN_F1: ("tp", "fp", "fn"),
    MEAN_SCORE: ("sum", "n"),
}


def metric_for_task(task: TaskKind) -> str:
    return {
        TaskKind.TEXT_CLASSIFICATION: ACCURACY,
        TaskKind.SEQUENCE_LABELING: SPAN_F1,
        TaskKind.SCORED_GENERATION: MEAN_SCORE,
    }[task]


def prf_from_counts(tp: float, fp: float, fn: float) -> tuple[float, float, float]:
    """Precision/recall/F1 with the conventional 0 on empty denominators."""
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def metric_value(metric: str, totals: Sequence[float]) -> float:
    """Point value of a metric from its summed tally."""
    if metric == ACCURACY:
        return totals[0] / totals[1]
    if metric == SPAN_F1:
        return prf_from_counts(totals[0], totals[1], totals[2])[2]
    if metric == MEAN_SCORE:
        return totals[0] / totals[1]
    raise ValueError(f"unknown metric {metric!r}")


def span_f1(
    gold_spans: Sequence[Sequence[Span]],
    pred_spans: Sequence[Sequence[Span]],
) -> dict[str, float]:
    """Micro exact-match span F1 over parallel per-sentence span lists.

    A predicted span counts as true positive iff an identical
    (start, end, label) triple exists in the same sentence's gold spans.
    """
    tp = fp = fn = 0
    for gold, pred in zip(gold_spans, pred_spans):
        gold_set, pred_set = set(gold), set(pred)
        tp += len(gold_set & pred_set)
        fp += len(pred_set - gold_set)
        fn += len(gold_set - pred_set)
    precision, recall, f1 = prf_from_counts(tp, fp, fn)
    return {
        "tp": tp,
        "fp": fp,
        "fn": fn,
        "precision": precision,
        "recall": recall,
        "f1": f1,
    }


@dataclass(frozen=True)
class SpanOutcome:
    """Per-sentence match result against gold."""

    matched: frozenset[Span]
    missed: frozenset[Span]
    spurious: frozenset[Span]


def _check_compat(system: SystemOutput, dataset: Dataset) -> None:
    if system.task is not dataset.task:
        raise TaskMismatch(
            f"system task {system.task.value} != dataset task {dataset.task.value}"
        )
    if len(system.predictions) != len(dataset.samples):
        raise SampleCountMismatch(
            f"system has {len(system.predictions)} predictions, "
            f"dataset has {len(dataset.samples)} samples"
        )


def span_outcomes(system: SystemOutput, dataset: Dataset) -> list[SpanOutcome]:
    _check_compat(system, dataset)
    outcomes = []
    for sample, pred in zip(dataset.samples, system.predictions):
        gold_set = set(extract_spans(sample.gold_tags))
        pred_set = set(extract_spans(pred.tags))
        outcomes.append(
            SpanOutcome(
                frozenset(gold_set & pred_set),
                frozenset(gold_set - pred_set),
                frozenset(pred_set - gold_set),
            )
        )
    return outcomes


def sample_components(system: SystemOutput, dataset: Dataset) -> np.ndarray:
    """Per-sample tally rows (n_samples x k) whose column sums are the
    overall tally; the resampling unit for the bootstrap."""
    _check_compat(system, dataset)
    if dataset.task is TaskKind.TEXT_CLASSIFICATION:
        rows = [
            (1.0 if p.label == s.gold_label else 0.0, 1.0)
            for s, p in zip(dataset.samples, system.predictions)
        ]
    elif dataset.task is TaskKind.SEQUENCE_LABELING:
        rows = [
            (len(o.matched), len(o.spurious), len(o.missed))
            for o in span_outcomes(system, dataset)
        ]
    else:
        rows = [(p.score, 1.0) for p in system.predictions]
    return np.asarray(rows, dtype=np.float64)
