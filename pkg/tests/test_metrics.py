"""Metric math: span F1 against a brute-force oracle, tally identities."""

import numpy as np
import pytest

from fineval.analysis import attribute_series, score_system
from fineval.core import (
    Dataset,
    SequencePrediction,
    SystemOutput,
    TaskKind,
    get_attribute,
)
from fineval.errors import SampleCountMismatch, TaskMismatch
from fineval.metrics import (
    metric_value,
    prf_from_counts,
    sample_components,
    span_f1,
)

from conftest import arbitrary_bio_tags, make_classification, make_ner, noisy_system


# ---------------------------------------------------------------------------
# independent span scorer: quadratic begin/extend check + set intersection,
# no shared code with the production extractor
# ---------------------------------------------------------------------------


def oracle_spans(tags):
    spans = []
    n = len(tags)
    for p in range(n):
        tag = tags[p]
        if tag == "O":
            continue
        prefix, label = tag.split("-", 1)
        prev = tags[p - 1] if p > 0 else "O"
        prev_label = prev.split("-", 1)[1] if prev != "O" else None
        begins = prefix == "B" or prev == "O" or prev_label != label
        if not begins:
            continue
        q = p
        while q + 1 < n and tags[q + 1] == f"I-{label}":
            q += 1
        spans.append((p, q, label))
    return spans


def oracle_prf(gold_sentences, pred_sentences):
    tp = fp = fn = 0
    for gold_tags, pred_tags in zip(gold_sentences, pred_sentences):
        gold = set(oracle_spans(gold_tags))
        pred = set(oracle_spans(pred_tags))
        tp += len(gold & pred)
        fp += len(pred - gold)
        fn += len(gold - pred)
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return {"tp": tp, "fp": fp, "fn": fn, "precision": p, "recall": r, "f1": f}


def test_exact_match_is_perfect():
    gold = [[(0, 1, "PER")]]
    assert span_f1(gold, gold)["f1"] == 1.0


def test_half_right():
    result = span_f1(
        [[(0, 1, "PER"), (3, 3, "LOC")]],
        [[(0, 1, "PER"), (5, 5, "ORG")]],
    )
    assert (result["tp"], result["fp"], result["fn"]) == (1, 1, 1)
    assert result["precision"] == result["recall"] == result["f1"] == 0.5


def test_degenerate_denominators_are_zero():
    assert prf_from_counts(0, 0, 0) == (0.0, 0.0, 0.0)
    assert span_f1([[]], [[]])["f1"] == 0.0


def test_span_f1_matches_oracle_on_random_pairs(rng):
    from fineval.core import extract_spans

    for _ in range(1000):
        length = int(rng.integers(1, 13))
        gold_tags = arbitrary_bio_tags(rng, length)
        pred_tags = arbitrary_bio_tags(rng, length)
        ours = span_f1([extract_spans(gold_tags)], [extract_spans(pred_tags)])
        assert ours == oracle_prf([gold_tags], [pred_tags])


# ---------------------------------------------------------------------------
# bucket/overall reconciliation
# ---------------------------------------------------------------------------


def test_weighted_accuracy_identity():
    # buckets of 60 at 0.9 and 40 at 0.5 combine to 0.74 exactly
    totals = np.array([54.0 + 20.0, 100.0])
    assert metric_value("accuracy", totals) == (54 + 20) / 100


def test_accuracy_reconciles_across_buckets(rng):
    dataset, system = make_classification(rng, 500, accuracy=0.7)
    scored = score_system(system, dataset)
    overall = scored.components.sum(axis=0)
    for name in ("tLen", "label"):
        series = attribute_series(scored, get_attribute(dataset.task, name))
        assert sum(t.totals[0] for t in series) == overall[0]
        assert sum(t.totals[1] for t in series) == overall[1] == 500
        assert sum(t.n for t in series) == 500


def test_span_tallies_reconcile_across_buckets(rng):
    dataset = make_ner(rng, 120)
    system = noisy_system(rng, dataset, noise=0.15)
    scored = score_system(system, dataset)
    overall = scored.components.sum(axis=0)
    for name in ("eLen", "sLen", "eLab", "eFreq"):
        series = attribute_series(scored, get_attribute(dataset.task, name))
        tp = sum(t.totals[0] for t in series)
        fp = sum(t.totals[1] for t in series)
        fn = sum(t.totals[2] for t in series)
        assert (tp, fp, fn) == tuple(overall)


def test_single_bucket_equals_overall(rng):
    dataset, system = make_classification(rng, 200, n_labels=1)
    scored = score_system(system, dataset)
    series = attribute_series(scored, get_attribute(dataset.task, "label"))
    assert len(series) == 1
    assert metric_value("accuracy", series[0].totals) == metric_value(
        "accuracy", scored.components.sum(axis=0)
    )


def test_empty_bucket_reported_with_zero_units(rng):
    # all entities length 1 -> the >=4 bucket exists with n=0 and no tally
    from fineval.core import SequenceSample

    samples = tuple(
        SequenceSample(i, ("a", "b", "c"), ("B-PER", "O", "O")) for i in range(5)
    )
    dataset = Dataset("d", TaskKind.SEQUENCE_LABELING, samples)
    preds = tuple(SequencePrediction(i, s.gold_tags) for i, s in enumerate(samples))
    system = SystemOutput("s", "s", TaskKind.SEQUENCE_LABELING, preds)
    series = attribute_series(
        score_system(system, dataset),
        get_attribute(TaskKind.SEQUENCE_LABELING, "eLen"),
    )
    top = [t for t in series if t.key == "(3,+inf)"][0]
    assert top.n == 0 and top.empty()


def test_permutation_invariance(rng):
    dataset = make_ner(rng, 60)
    system = noisy_system(rng, dataset, noise=0.2)
    scored = score_system(system, dataset)
    baseline = metric_value("span-f1", scored.components.sum(axis=0))

    order = rng.permutation(len(dataset.samples))
    samples = tuple(
        type(dataset.samples[j])(i, dataset.samples[j].tokens, dataset.samples[j].gold_tags)
        for i, j in enumerate(order)
    )
    preds = tuple(
        SequencePrediction(i, system.predictions[j].tags) for i, j in enumerate(order)
    )
    shuffled_dataset = Dataset("d2", TaskKind.SEQUENCE_LABELING, samples)
    shuffled_system = SystemOutput("s", "s", TaskKind.SEQUENCE_LABELING, preds)
    scored2 = score_system(shuffled_system, shuffled_dataset)
    assert metric_value("span-f1", scored2.components.sum(axis=0)) == baseline
    for name in ("eLen", "eLab"):
        spec = get_attribute(TaskKind.SEQUENCE_LABELING, name)
        values1 = {
            t.key: metric_value("span-f1", t.totals) if not t.empty() else None
            for t in attribute_series(scored, spec)
        }
        values2 = {
            t.key: metric_value("span-f1", t.totals) if not t.empty() else None
            for t in attribute_series(scored2, spec)
        }
        assert values1 == values2


def test_tally_additivity(rng):
    dataset, system = make_classification(rng, 300)
    comp = sample_components(system, dataset)
    half = comp[:150].sum(axis=0) + comp[150:].sum(axis=0)
    assert np.array_equal(half, comp.sum(axis=0))


def test_mismatch_errors(rng):
    dataset, system = make_classification(rng, 10)
    ner = make_ner(rng, 10)
    with pytest.raises(TaskMismatch):
        sample_components(system, ner)
    short = SystemOutput("s", "s", dataset.task, system.predictions[:5])
    with pytest.raises(SampleCountMismatch):
        sample_components(short, dataset)
