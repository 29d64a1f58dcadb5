"""Task-agnostic data model: samples, evaluation units, attributes, buckets.

All types are immutable after construction and safe to share across
threads; the functions here are pure.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence, Union

import numpy as np

from .errors import MalformedTag, MissingTrainStats, UnknownAttribute

if TYPE_CHECKING:  # pragma: no cover
    from .ingest import TrainStats


class TaskKind(str, enum.Enum):
    TEXT_CLASSIFICATION = "text-classification"
    SEQUENCE_LABELING = "sequence-labeling"
    SCORED_GENERATION = "scored-generation"


_TASK_ALIASES = {
    "cls": TaskKind.TEXT_CLASSIFICATION,
    "classification": TaskKind.TEXT_CLASSIFICATION,
    "text-classification": TaskKind.TEXT_CLASSIFICATION,
    "ner": TaskKind.SEQUENCE_LABELING,
    "pos": TaskKind.SEQUENCE_LABELING,
    "chunking": TaskKind.SEQUENCE_LABELING,
    "seq": TaskKind.SEQUENCE_LABELING,
    "sequence-labeling": TaskKind.SEQUENCE_LABELING,
    "gen": TaskKind.SCORED_GENERATION,
    "generation": TaskKind.SCORED_GENERATION,
    "scored-generation": TaskKind.SCORED_GENERATION,
}


def task_from_name(name: str) -> TaskKind:
    """Resolve a task name or alias (``ner``, ``cls``, ``gen``, ...)."""
    try:
        return _TASK_ALIASES[name.strip().lower()]
    except KeyError:
        raise UnknownAttribute(f"unknown task kind: {name!r}") from None


# ---------------------------------------------------------------------------
# Samples and predictions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationSample:
    id: int
    text: str
    gold_label: str


@dataclass(frozen=True)
class SequenceSample:
    id: int
    tokens: tuple[str, ...]
    gold_tags: tuple[str, ...]


@dataclass(frozen=True)
class GenerationSample:
    id: int
    source_id: str
    reference_text: str | None = None


Sample = Union[ClassificationSample, SequenceSample, GenerationSample]


@dataclass(frozen=True)
class ClassificationPrediction:
    sample_id: int
    label: str
    confidence: float | None = None


@dataclass(frozen=True)
class SequencePrediction:
    sample_id: int
    tags: tuple[str, ...]


@dataclass(frozen=True)
class GenerationPrediction:
    sample_id: int
    score: float


Prediction = Union[
    ClassificationPrediction, SequencePrediction, GenerationPrediction
]


@dataclass(frozen=True)
class Dataset:
    """A named test set; ``train_stats`` backs the eFreq attribute."""

    dataset_id: str
    task: TaskKind
    samples: tuple[Sample, ...]
    train_stats: "TrainStats | None" = None

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class SystemOutput:
    """One system's predictions, aligned 1:1 with a dataset's samples."""

    system_id: str
    name: str
    task: TaskKind
    predictions: tuple[Prediction, ...]

    def __len__(self) -> int:
        return len(self.predictions)


# ---------------------------------------------------------------------------
# Evaluation units
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class SampleUnit:
    sample_id: int


@dataclass(frozen=True, order=True)
class SpanUnit:
    """A labeled token span; ``start``/``end`` are inclusive indices."""

    sample_id: int
    start: int
    end: int
    label: str


EvaluationUnit = Union[SampleUnit, SpanUnit]

Span = tuple[int, int, str]  # (start, end inclusive, label) within one sentence

_TAG_RE = re.compile(r"^(?:O|[BI]-.+)$")


def extract_spans(tags: Sequence[str], strict: bool = False) -> list[Span]:
    """Decode a BIO tag sequence into maximal (start, end, label) spans.

    A span opens at ``B-X``, or at an ``I-X`` whose predecessor does not
    continue an open ``X`` span (lenient repair: orphan ``I-`` acts as
    ``B-``).  With ``strict=True`` orphan ``I-`` tags raise instead, per
    the CoNLL evaluation convention.
    """
    spans: list[Span] = []
    start: int | None = None
    label: str | None = None
    for i, tag in enumerate(tags):
        if not _TAG_RE.match(tag):
            raise MalformedTag(f"invalid BIO tag {tag!r} at position {i}")
        if tag == "O":
            if start is not None:
                spans.append((start, i - 1, label))  # type: ignore[arg-type]
                start, label = None, None
            continue
        prefix, tag_label = tag.split("-", 1)
        continues = prefix == "I" and start is not None and label == tag_label
        if continues:
            continue
        if prefix == "I" and strict:
            raise MalformedTag(f"orphan I- tag {tag!r} at position {i}")
        if start is not None:
            spans.append((start, i - 1, label))  # type: ignore[arg-type]
        start, label = i, tag_label
    if start is not None:
        spans.append((start, len(tags) - 1, label))  # type: ignore[arg-type]
    return spans


def spans_to_tags(spans: Iterable[Span], length: int) -> tuple[str, ...]:
    """Encode disjoint spans back into a BIO tag sequence of ``length``."""
    tags = ["O"] * length
    for start, end, label in spans:
        tags[start] = f"B-{label}"
        for i in range(start + 1, end + 1):
            tags[i] = f"I-{label}"
    return tuple(tags)


def repair_bio(tags: Sequence[str]) -> tuple[str, ...]:
    """Rewrite a tag sequence so every span opens with ``B-`` (orphan
    ``I-X`` becomes ``B-X``); output always passes strict extraction."""
    return spans_to_tags(extract_spans(tags), len(tags))


def is_valid_bio(tags: Sequence[str]) -> bool:
    try:
        extract_spans(tags, strict=True)
    except MalformedTag:
        return False
    return True


def gold_units(dataset: Dataset) -> list[EvaluationUnit]:
    """Units performance is bucketed over: gold entity spans for sequence
    labeling, whole samples otherwise."""
    if dataset.task is TaskKind.SEQUENCE_LABELING:
        units: list[EvaluationUnit] = []
        for sample in dataset.samples:
            for start, end, label in extract_spans(sample.gold_tags):
                units.append(SpanUnit(sample.id, start, end, label))
        return units
    return [SampleUnit(sample.id) for sample in dataset.samples]


# ---------------------------------------------------------------------------
# Attributes
# ---------------------------------------------------------------------------

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class AttributeSpec:
    """An interpretable dimension used to partition evaluation units.

    ``fixed_thresholds`` pins the continuous bucket boundaries; when None
    they are derived from the gold data (quartiles).
    """

    name: str
    task: TaskKind
    value_kind: str
    fixed_thresholds: tuple[float, ...] | None = None
    description: str = ""


ATTRIBUTES: dict[TaskKind, dict[str, AttributeSpec]] = {
    TaskKind.SEQUENCE_LABELING: {
        "eLen": AttributeSpec(
            "eLen",
            TaskKind.SEQUENCE_LABELING,
            CONTINUOUS,
            fixed_thresholds=(1.0, 2.0, 3.0),
            description="entity length in tokens",
        ),
        "sLen": AttributeSpec(
            "sLen",
            TaskKind.SEQUENCE_LABELING,
            CONTINUOUS,
            description="length of the sentence containing the entity",
        ),
        "eLab": AttributeSpec(
            "eLab",
            TaskKind.SEQUENCE_LABELING,
            CATEGORICAL,
            description="entity label",
        ),
        "eFreq": AttributeSpec(
            "eFreq",
            TaskKind.SEQUENCE_LABELING,
            CONTINUOUS,
            fixed_thresholds=(0.0, 2.0, 5.0),
            description="occurrences of the entity surface in the training set",
        ),
    },
    TaskKind.TEXT_CLASSIFICATION: {
        "tLen": AttributeSpec(
            "tLen",
            TaskKind.TEXT_CLASSIFICATION,
            CONTINUOUS,
            description="text length in whitespace tokens",
        ),
        "label": AttributeSpec(
            "label",
            TaskKind.TEXT_CLASSIFICATION,
            CATEGORICAL,
            description="gold label",
        ),
    },
    TaskKind.SCORED_GENERATION: {},
}


def default_attributes(task: TaskKind) -> list[str]:
    return list(ATTRIBUTES[task].keys())


def get_attribute(task: TaskKind, name: str) -> AttributeSpec:
    try:
        return ATTRIBUTES[task][name]
    except KeyError:
        raise UnknownAttribute(
            f"attribute {name!r} not defined for task {task.value}"
        ) from None


def attribute_value(
    spec: AttributeSpec,
    unit: EvaluationUnit,
    dataset: Dataset,
    train_stats: "TrainStats | None" = None,
    strict: bool = False,
) -> float | str:
    """Value of ``spec`` for one unit.  Pure and gold-derived, except that
    span units carry their own label (so the same function attributes
    predicted spans by predicted label)."""
    if spec.name == "eLen":
        return float(unit.end - unit.start + 1)
    if spec.name == "sLen":
        return float(len(dataset.samples[unit.sample_id].tokens))
    if spec.name == "eLab":
        return unit.label
    if spec.name == "eFreq":
        stats = train_stats if train_stats is not None else dataset.train_stats
        if stats is None:
            if strict:
                raise MissingTrainStats(
                    "eFreq requested in strict mode but no training statistics",
                )
            return 0.0
        sample = dataset.samples[unit.sample_id]
        surface = " ".join(sample.tokens[unit.start : unit.end + 1])
        return float(stats.entity_surface_counts.get(surface, 0))
    if spec.name == "tLen":
        return float(len(dataset.samples[unit.sample_id].text.split()))
    if spec.name == "label":
        return dataset.samples[unit.sample_id].gold_label
    raise UnknownAttribute(f"attribute {spec.name!r} has no value rule")


# ---------------------------------------------------------------------------
# Bucketing
# ---------------------------------------------------------------------------


def format_bound(x: float) -> str:
    """Canonical rendering of an interval bound: integral values print as
    integers so bucket keys stay stable and readable."""
    if x == int(x):
        return str(int(x))
    return format(x, "g")


@dataclass(frozen=True)
class ContinuousRule:
    """Ordered thresholds t1 < ... < tk producing the disjoint intervals
    (-inf, t1], (t1, t2], ..., (tk, +inf) that cover the real line."""

    thresholds: tuple[float, ...]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")

    def bucket_count(self) -> int:
        return len(self.thresholds) + 1

    def keys(self) -> tuple[str, ...]:
        bounds = ["-inf"] + [format_bound(t) for t in self.thresholds] + ["+inf"]
        out = []
        for i in range(len(bounds) - 1):
            close = ")" if i == len(bounds) - 2 else "]"
            out.append(f"({bounds[i]},{bounds[i + 1]}{close}")
        return tuple(out)

    def index(self, value: float) -> int:
        return int(np.searchsorted(self.thresholds, value, side="left"))


@dataclass(frozen=True)
class CategoricalRule:
    """One bucket per distinct value; the key is the value itself."""

    def index(self, value: str) -> str:
        return value


BucketingRule = Union[ContinuousRule, CategoricalRule]


def quartile_thresholds(values: Sequence[float]) -> tuple[float, ...]:
    """Data-derived boundaries: lower-quartile, median, upper-quartile of
    the gold values, deduplicated to stay strictly increasing."""
    if not values:
        return ()
    qs = np.quantile(np.asarray(values, dtype=float), [0.25, 0.5, 0.75], method="lower")
    out: list[float] = []
    for q in qs:
        q = float(q)
        if not out or q > out[-1]:
            out.append(q)
    # a threshold at the maximum would leave the top bucket permanently empty
    if out and out[-1] >= max(values):
        out.pop()
    return tuple(out)


def resolve_rule(spec: AttributeSpec, gold_values: Sequence[float | str]) -> BucketingRule:
    """Instantiate the bucketing rule for one attribute over one dataset."""
    if spec.value_kind == CATEGORICAL:
        return CategoricalRule()
    if spec.fixed_thresholds is not None:
        return ContinuousRule(spec.fixed_thresholds)
    return ContinuousRule(quartile_thresholds([float(v) for v in gold_values]))


@dataclass(frozen=True)
class Bucket:
    """One cell of an attribute's partition over the evaluation units."""

    attribute: str
    key: str
    unit_ids: tuple[int, ...]  # indices into the attribute's unit list

    @property
    def n(self) -> int:
        return len(self.unit_ids)


def assign_buckets(
    attribute: str,
    rule: BucketingRule,
    values: Sequence[float | str],
) -> list[Bucket]:
    """Partition units (given by their attribute values) into buckets.

    Continuous rules always yield every interval, including empty ones;
    categorical buckets are the observed values ordered by descending
    size, ties lexicographic."""
    if isinstance(rule, ContinuousRule):
        members: list[list[int]] = [[] for _ in range(rule.bucket_count())]
        for i, v in enumerate(values):
            members[rule.index(float(v))].append(i)
        return [
            Bucket(attribute, key, tuple(ids))
            for key, ids in zip(rule.keys(), members)
        ]
    by_key: dict[str, list[int]] = {}
    for i, v in enumerate(values):
        by_key.setdefault(str(v), []).append(i)
    ordered = sorted(by_key.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return [Bucket(attribute, key, tuple(ids)) for key, ids in ordered]


def bucket_key_of(rule: BucketingRule, value: float | str) -> str:
    """Canonical bucket key a value falls into (e.g. ``(3,+inf)``)."""
    if isinstance(rule, ContinuousRule):
        return rule.keys()[rule.index(float(value))]
    return str(value)
