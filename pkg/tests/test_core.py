"""Core model: BIO spans, attributes, bucketing."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fineval.core import (
    AttributeSpec,
    ClassificationSample,
    ContinuousRule,
    Dataset,
    SampleUnit,
    SequenceSample,
    SpanUnit,
    TaskKind,
    assign_buckets,
    attribute_value,
    bucket_key_of,
    extract_spans,
    get_attribute,
    gold_units,
    is_valid_bio,
    quartile_thresholds,
    repair_bio,
    resolve_rule,
    spans_to_tags,
    task_from_name,
)
from fineval.errors import MalformedTag, MissingTrainStats, UnknownAttribute
from fineval.ingest import TrainStats

from conftest import arbitrary_bio_tags


# ---------------------------------------------------------------------------
# extract_spans
# ---------------------------------------------------------------------------


def test_basic_spans():
    assert extract_spans(["B-PER", "I-PER", "O", "B-LOC"]) == [
        (0, 1, "PER"),
        (3, 3, "LOC"),
    ]


def test_no_entities():
    assert extract_spans(["O", "O"]) == []


def test_orphan_i_opens_span():
    # lenient repair: orphan I- behaves like B-
    assert extract_spans(["I-ORG", "I-ORG", "O", "I-ORG"]) == [
        (0, 1, "ORG"),
        (3, 3, "ORG"),
    ]


def test_label_switch_closes_span():
    assert extract_spans(["B-PER", "I-LOC"]) == [(0, 0, "PER"), (1, 1, "LOC")]
    assert extract_spans(["B-PER", "B-PER"]) == [(0, 0, "PER"), (1, 1, "PER")]


def test_malformed_tag_rejected():
    with pytest.raises(MalformedTag):
        extract_spans(["B-PER", "X-LOC"])
    with pytest.raises(MalformedTag):
        extract_spans(["B-"])
    with pytest.raises(MalformedTag):
        extract_spans(["b-PER"])


def test_strict_mode_rejects_orphans():
    with pytest.raises(MalformedTag):
        extract_spans(["O", "I-PER"], strict=True)
    assert extract_spans(["B-PER", "I-PER"], strict=True) == [(0, 1, "PER")]


def test_repair_produces_strictly_valid_tags():
    repaired = repair_bio(["I-ORG", "I-ORG", "O", "I-ORG"])
    assert repaired == ("B-ORG", "I-ORG", "O", "B-ORG")
    assert is_valid_bio(repaired)


@st.composite
def bio_tags(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    length = draw(st.integers(1, 15))
    return arbitrary_bio_tags(rng, length)


@given(bio_tags())
@settings(max_examples=200)
def test_spans_roundtrip_is_idempotent(tags):
    spans = extract_spans(tags)
    assert extract_spans(spans_to_tags(spans, len(tags))) == spans


@given(bio_tags())
@settings(max_examples=200)
def test_repair_always_valid(tags):
    assert is_valid_bio(repair_bio(tags))


@given(bio_tags())
@settings(max_examples=200)
def test_spans_are_disjoint_and_ordered(tags):
    spans = extract_spans(tags)
    for (s1, e1, _), (s2, e2, _) in zip(spans, spans[1:]):
        assert e1 < s2
    for s, e, _ in spans:
        assert 0 <= s <= e < len(tags)


# ---------------------------------------------------------------------------
# attributes
# ---------------------------------------------------------------------------


def _span_dataset():
    sample = SequenceSample(
        0,
        tuple(f"t{i}" for i in range(7)),
        ("B-PER", "I-PER", "O", "B-LOC", "O", "O", "O"),
    )
    return Dataset("d", TaskKind.SEQUENCE_LABELING, (sample,))


def test_entity_length_and_sentence_length():
    dataset = _span_dataset()
    unit = SpanUnit(0, 0, 1, "PER")
    elen = get_attribute(TaskKind.SEQUENCE_LABELING, "eLen")
    slen = get_attribute(TaskKind.SEQUENCE_LABELING, "sLen")
    elab = get_attribute(TaskKind.SEQUENCE_LABELING, "eLab")
    assert attribute_value(elen, unit, dataset) == 2
    assert attribute_value(slen, unit, dataset) == 7
    assert attribute_value(elab, unit, dataset) == "PER"


def test_train_frequency_counts_surface():
    dataset = _span_dataset()
    efreq = get_attribute(TaskKind.SEQUENCE_LABELING, "eFreq")
    stats = TrainStats({"t0 t1": 12}, {})
    assert attribute_value(efreq, SpanUnit(0, 0, 1, "PER"), dataset, stats) == 12
    assert attribute_value(efreq, SpanUnit(0, 3, 3, "LOC"), dataset, stats) == 0
    # absent stats: lenient zeroes, strict raises
    assert attribute_value(efreq, SpanUnit(0, 0, 1, "PER"), dataset) == 0
    with pytest.raises(MissingTrainStats):
        attribute_value(efreq, SpanUnit(0, 0, 1, "PER"), dataset, strict=True)


def test_classification_attributes():
    sample = ClassificationSample(0, "a b c d", "pos")
    dataset = Dataset("d", TaskKind.TEXT_CLASSIFICATION, (sample,))
    tlen = get_attribute(TaskKind.TEXT_CLASSIFICATION, "tLen")
    label = get_attribute(TaskKind.TEXT_CLASSIFICATION, "label")
    assert attribute_value(tlen, SampleUnit(0), dataset) == 4
    assert attribute_value(label, SampleUnit(0), dataset) == "pos"


def test_unknown_attribute():
    with pytest.raises(UnknownAttribute):
        get_attribute(TaskKind.TEXT_CLASSIFICATION, "eLen")
    with pytest.raises(UnknownAttribute):
        get_attribute(TaskKind.SCORED_GENERATION, "score")


def test_attribute_extraction_is_pure(rng):
    dataset = _span_dataset()
    spec = get_attribute(TaskKind.SEQUENCE_LABELING, "eLen")
    unit = SpanUnit(0, 0, 1, "PER")
    values = {attribute_value(spec, unit, dataset) for _ in range(10)}
    assert values == {2.0}


# ---------------------------------------------------------------------------
# bucketing
# ---------------------------------------------------------------------------


def test_continuous_keys_cover_line():
    rule = ContinuousRule((1.0, 2.0, 3.0))
    assert rule.keys() == ("(-inf,1]", "(1,2]", "(2,3]", "(3,+inf)")
    assert rule.index(1) == 0
    assert rule.index(2) == 1
    assert rule.index(3.0) == 2
    assert rule.index(4) == 3
    assert rule.index(400) == 3


def test_bucket_partition_is_exhaustive_and_disjoint(rng):
    values = rng.integers(0, 20, 500).astype(float)
    rule = ContinuousRule((2.0, 5.0, 11.0))
    buckets = assign_buckets("x", rule, values)
    seen = [i for b in buckets for i in b.unit_ids]
    assert sorted(seen) == list(range(500))
    assert sum(b.n for b in buckets) == 500


def test_categorical_bucket_order_by_size_then_key():
    values = ["b", "a", "b", "c", "a", "b"]
    buckets = assign_buckets("x", resolve_rule(
        AttributeSpec("x", TaskKind.TEXT_CLASSIFICATION, "categorical"), values
    ), values)
    assert [b.key for b in buckets] == ["b", "a", "c"]
    assert [b.n for b in buckets] == [3, 2, 1]


def test_quartile_thresholds_are_strictly_increasing():
    assert quartile_thresholds([1, 2, 3, 4, 5, 6, 7, 8]) == (2.0, 4.0, 6.0)
    assert quartile_thresholds([5, 5, 5, 5]) == ()
    assert quartile_thresholds([]) == ()
    # near-constant data collapses duplicate boundaries
    thresholds = quartile_thresholds([1, 1, 1, 9])
    assert all(a < b for a, b in zip(thresholds, thresholds[1:]))


def test_bucket_key_formatting_is_integral_when_possible():
    rule = ContinuousRule((1.0, 2.5))
    assert rule.keys() == ("(-inf,1]", "(1,2.5]", "(2.5,+inf)")
    assert bucket_key_of(rule, 2.0) == "(1,2.5]"


def test_gold_units_for_span_task():
    dataset = _span_dataset()
    units = gold_units(dataset)
    assert units == [SpanUnit(0, 0, 1, "PER"), SpanUnit(0, 3, 3, "LOC")]


def test_task_aliases():
    assert task_from_name("ner") is TaskKind.SEQUENCE_LABELING
    assert task_from_name("CLS") is TaskKind.TEXT_CLASSIFICATION
    assert task_from_name("gen") is TaskKind.SCORED_GENERATION
    with pytest.raises(UnknownAttribute):
        task_from_name("nope")
