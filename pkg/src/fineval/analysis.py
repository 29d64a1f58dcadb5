"""Single-system reports, pairwise gaps, dataset bias profiles, and
error-case extraction.

Buckets are always derived from gold annotations (never from system
output), so bucket membership is system-independent and pairwise gaps
compare like with like.  The one exception is false-positive attribution
for span tasks: a spurious predicted span is assigned to a bucket by its
own attribute value (its own length, its own predicted label), which
keeps per-bucket precision meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .core import (
    AttributeSpec,
    ContinuousRule,
    Dataset,
    SampleUnit,
    SpanUnit,
    SystemOutput,
    TaskKind,
    attribute_value,
    bucket_key_of,
    default_attributes,
    get_attribute,
    resolve_rule,
)
from .errors import (
    DatasetMismatch,
    NeedTwoOrMoreSystems,
    NeedTwoSystems,
    UnknownBucket,
    UnsupportedTask,
)
from .metrics import (
    COMPONENTS,
    SpanOutcome,
    _check_compat,
    metric_for_task,
    metric_value,
    sample_components,
    span_outcomes,
)
from .reliability import BootstrapConfig, bootstrap_ci
from .report import (
    AnalysisReport,
    BucketPerformance,
    generated_at,
)

CONTEXT_CHAR_LIMIT = 256


# ---------------------------------------------------------------------------
# Scoring cache shared by the report builders
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoredSystem:
    """Match results of one system against one dataset, computed once."""

    system: SystemOutput
    dataset: Dataset
    components: np.ndarray  # per-sample tally rows
    outcomes: tuple[SpanOutcome, ...] | None  # sequence labeling only

    @property
    def metric(self) -> str:
        return metric_for_task(self.dataset.task)


def score_system(system: SystemOutput, dataset: Dataset) -> ScoredSystem:
    _check_compat(system, dataset)
    outcomes = None
    if dataset.task is TaskKind.SEQUENCE_LABELING:
        outcomes = tuple(span_outcomes(system, dataset))
    return ScoredSystem(system, dataset, sample_components(system, dataset), outcomes)


def _components_dict(metric: str, totals: Sequence[float]) -> dict[str, float]:
    out: dict[str, float] = {}
    for name, v in zip(COMPONENTS[metric], totals):
        out[name] = int(v) if float(v).is_integer() and name != "sum" else float(v)
    return out


@dataclass
class _BucketTally:
    key: str
    n: int
    totals: np.ndarray
    rows: dict[int, np.ndarray]  # sample id -> tally row

    def empty(self) -> bool:
        return not self.rows


def _new_tally(key: str, width: int) -> _BucketTally:
    return _BucketTally(key, 0, np.zeros(width, dtype=np.float64), {})


def _add(tally: _BucketTally, sample_id: int, delta: Sequence[float]) -> None:
    tally.totals += delta
    row = tally.rows.get(sample_id)
    if row is None:
        tally.rows[sample_id] = np.asarray(delta, dtype=np.float64).copy()
    else:
        row += delta


def attribute_series(
    scored: ScoredSystem,
    spec: AttributeSpec,
    strict: bool = False,
) -> list[_BucketTally]:
    """Per-bucket tallies of one attribute, ordered for reporting:
    continuous buckets by interval (all intervals, empty ones included),
    categorical by descending gold count then key."""
    dataset = scored.dataset
    width = len(COMPONENTS[scored.metric])
    if dataset.task is TaskKind.SEQUENCE_LABELING:
        gold_values: list[Any] = []
        per_sentence: list[list[Any]] = []
        for sample in dataset.samples:
            outcome = scored.outcomes[sample.id]
            values = {
                span: attribute_value(
                    spec, SpanUnit(sample.id, *span), dataset, strict=strict
                )
                for span in (outcome.matched | outcome.missed)
            }
            per_sentence.append(values)
            gold_values.extend(values.values())
        rule = resolve_rule(spec, gold_values)
        tallies: dict[str, _BucketTally] = {
            key: _new_tally(key, width)
            for key in (rule.keys() if isinstance(rule, ContinuousRule) else ())
        }

        def tally_for(value) -> _BucketTally:
            key = bucket_key_of(rule, value)
            if key not in tallies:
                tallies[key] = _new_tally(key, width)
            return tallies[key]

        for sample in dataset.samples:
            outcome = scored.outcomes[sample.id]
            values = per_sentence[sample.id]
            for span in outcome.matched:
                t = tally_for(values[span])
                t.n += 1
                _add(t, sample.id, (1.0, 0.0, 0.0))
            for span in outcome.missed:
                t = tally_for(values[span])
                t.n += 1
                _add(t, sample.id, (0.0, 0.0, 1.0))
            for span in outcome.spurious:
                value = attribute_value(
                    spec, SpanUnit(sample.id, *span), dataset, strict=strict
                )
                _add(tally_for(value), sample.id, (0.0, 1.0, 0.0))
    else:
        values = [
            attribute_value(spec, SampleUnit(s.id), dataset, strict=strict)
            for s in dataset.samples
        ]
        rule = resolve_rule(spec, values)
        tallies = {
            key: _new_tally(key, width)
            for key in (rule.keys() if isinstance(rule, ContinuousRule) else ())
        }
        for sample, value in zip(dataset.samples, values):
            key = bucket_key_of(rule, value)
            if key not in tallies:
                tallies[key] = _new_tally(key, width)
            t = tallies[key]
            t.n += 1
            _add(t, sample.id, scored.components[sample.id])

    if isinstance(rule, ContinuousRule):
        return [tallies[key] for key in rule.keys()]
    return sorted(tallies.values(), key=lambda t: (-t.n, t.key))


def _bucket_performance(
    scored: ScoredSystem,
    tally: _BucketTally,
    config: BootstrapConfig | None,
) -> BucketPerformance:
    metric = scored.metric
    if tally.empty():
        return BucketPerformance(tally.key, tally.n, None, None, None,
                                 _components_dict(metric, tally.totals))
    value = metric_value(metric, tally.totals)
    low = high = None
    if config is not None:
        rows = np.stack([tally.rows[sid] for sid in sorted(tally.rows)])
        low, high = bootstrap_ci(
            rows, lambda totals: metric_value(metric, totals), config, point=value
        )
    return BucketPerformance(
        tally.key, tally.n, value, low, high, _components_dict(metric, tally.totals)
    )


def overall_performance(
    scored: ScoredSystem, config: BootstrapConfig | None
) -> BucketPerformance:
    """Whole-set performance; the resampling pool is every sample."""
    metric = scored.metric
    totals = scored.components.sum(axis=0)
    if scored.dataset.task is TaskKind.SEQUENCE_LABELING:
        n = sum(len(o.matched) + len(o.missed) for o in scored.outcomes)
    else:
        n = len(scored.dataset.samples)
    if not totals.any() and n == 0:
        return BucketPerformance("overall", 0, None, None, None,
                                 _components_dict(metric, totals))
    value = metric_value(metric, totals)
    low = high = None
    if config is not None:
        low, high = bootstrap_ci(
            scored.components,
            lambda t: metric_value(metric, t),
            config,
            point=value,
        )
    return BucketPerformance("overall", n, value, low, high,
                             _components_dict(metric, totals))


def _resolve_attrs(dataset: Dataset, attributes: Sequence[str] | None) -> list[AttributeSpec]:
    names = list(attributes) if attributes is not None else default_attributes(dataset.task)
    return [get_attribute(dataset.task, name) for name in names]


def _bootstrap_meta(config: BootstrapConfig) -> dict[str, Any]:
    return {
        "replicates": config.replicates,
        "confidenceLevel": config.confidence_level,
        "seed": config.seed,
        "method": "percentile",
        "resampleUnit": "sample",
    }


# ---------------------------------------------------------------------------
# F1: single-system analysis
# ---------------------------------------------------------------------------


def single_analysis(
    system: SystemOutput,
    dataset: Dataset,
    attributes: Sequence[str] | None = None,
    config: BootstrapConfig | None = None,
    strict_attrs: bool = False,
) -> AnalysisReport:
    """Performance histogram: overall metric plus per-attribute bucket
    series, each bucket with a bootstrap confidence interval."""
    config = config or BootstrapConfig()
    specs = _resolve_attrs(dataset, attributes)
    scored = score_system(system, dataset)
    per_attribute = {
        spec.name: tuple(
            _bucket_performance(scored, tally, config)
            for tally in attribute_series(scored, spec, strict=strict_attrs)
        )
        for spec in specs
    }
    return AnalysisReport(
        system_ids=(system.system_id,),
        system_names=(system.name,),
        dataset_id=dataset.dataset_id,
        task=dataset.task.value,
        metric_name=scored.metric,
        overall=overall_performance(scored, config),
        per_attribute=per_attribute,
        bootstrap=_bootstrap_meta(config),
        generated_at=generated_at(),
    )


# ---------------------------------------------------------------------------
# F2: pairwise analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairBucketGap:
    key: str
    n: int
    value_a: float | None
    value_b: float | None
    gap: float | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "n": self.n,
            "valueA": self.value_a,
            "valueB": self.value_b,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class PairReport:
    system_a: str
    system_b: str
    system_names: tuple[str, str]
    dataset_id: str
    task: str
    metric_name: str
    overall_a: float | None
    overall_b: float | None
    overall_gap: float | None
    per_attribute: Mapping[str, tuple[PairBucketGap, ...]]
    generated_at: str

    def to_dict(self) -> dict[str, Any]:
        from .report import ENGINE_VERSION

        return {
            "systemA": self.system_a,
            "systemB": self.system_b,
            "systemNames": list(self.system_names),
            "datasetId": self.dataset_id,
            "taskKind": self.task,
            "metricName": self.metric_name,
            "overallA": self.overall_a,
            "overallB": self.overall_b,
            "overallGap": self.overall_gap,
            "perAttribute": {
                name: [g.to_dict() for g in series]
                for name, series in self.per_attribute.items()
            },
            "generatedAt": self.generated_at,
            "engineVersion": ENGINE_VERSION,
        }


def pair_analysis(
    system_a: SystemOutput,
    system_b: SystemOutput,
    dataset: Dataset,
    attributes: Sequence[str] | None = None,
) -> PairReport:
    """Gap histogram (A minus B).  Buckets come from gold data, so both
    sides share boundaries; a bucket's gap is exactly the difference of
    the two single-report values and is null when either side is null."""
    specs = _resolve_attrs(dataset, attributes)
    scored_a = score_system(system_a, dataset)
    scored_b = score_system(system_b, dataset)
    per_attribute: dict[str, tuple[PairBucketGap, ...]] = {}
    for spec in specs:
        list_a = attribute_series(scored_a, spec)
        series_a = {t.key: t for t in list_a}
        series_b = {t.key: t for t in attribute_series(scored_b, spec)}
        if spec.value_kind == "continuous":
            keys = [t.key for t in list_a]
        else:
            union = {t.key: t.n for t in series_a.values()}
            for t in series_b.values():
                union.setdefault(t.key, t.n)
            keys = [k for k, _ in sorted(union.items(), key=lambda kv: (-kv[1], kv[0]))]
        gaps = []
        for key in keys:
            ta, tb = series_a.get(key), series_b.get(key)
            va = metric_value(scored_a.metric, ta.totals) if ta and not ta.empty() else None
            vb = metric_value(scored_b.metric, tb.totals) if tb and not tb.empty() else None
            gap = va - vb if va is not None and vb is not None else None
            n = ta.n if ta is not None else (tb.n if tb is not None else 0)
            gaps.append(PairBucketGap(key, n, va, vb, gap))
        per_attribute[spec.name] = tuple(gaps)
    overall_a = overall_performance(scored_a, None).value
    overall_b = overall_performance(scored_b, None).value
    overall_gap = (
        overall_a - overall_b
        if overall_a is not None and overall_b is not None
        else None
    )
    return PairReport(
        system_a=system_a.system_id,
        system_b=system_b.system_id,
        system_names=(system_a.name, system_b.name),
        dataset_id=dataset.dataset_id,
        task=dataset.task.value,
        metric_name=scored_a.metric,
        overall_a=overall_a,
        overall_b=overall_b,
        overall_gap=overall_gap,
        per_attribute=per_attribute,
        generated_at=generated_at(),
    )


# ---------------------------------------------------------------------------
# F3: data bias analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BiasProfile:
    task: str
    dataset_ids: tuple[str, ...]
    per_attribute: Mapping[str, Mapping[str, Any]]
    generated_at: str

    def to_dict(self) -> dict[str, Any]:
        from .report import ENGINE_VERSION

        return {
            "taskKind": self.task,
            "datasetIds": list(self.dataset_ids),
            "perAttribute": {k: dict(v) for k, v in self.per_attribute.items()},
            "generatedAt": self.generated_at,
            "engineVersion": ENGINE_VERSION,
        }


def bias_analysis(
    datasets: Sequence[Dataset],
    attributes: Sequence[str] | None = None,
) -> BiasProfile:
    """Characterize datasets by their gold annotations alone: attribute
    means for continuous attributes, frequency distributions for
    categorical ones.  System outputs play no part."""
    if not datasets:
        raise DatasetMismatch("bias analysis needs at least one dataset")
    task = datasets[0].task
    for d in datasets[1:]:
        if d.task is not task:
            raise DatasetMismatch(
                f"datasets mix task kinds: {task.value} vs {d.task.value}"
            )
    specs = _resolve_attrs(datasets[0], attributes)
    per_attribute: dict[str, dict[str, Any]] = {}
    for spec in specs:
        per_dataset: dict[str, Any] = {}
        for dataset in datasets:
            units = _gold_units_for(dataset)
            values = [attribute_value(spec, u, dataset) for u in units]
            if spec.value_kind == "continuous":
                per_dataset[dataset.dataset_id] = {
                    "mean": float(np.mean([float(v) for v in values])) if values else None,
                    "n": len(values),
                }
            else:
                counts: dict[str, int] = {}
                for v in values:
                    counts[str(v)] = counts.get(str(v), 0) + 1
                per_dataset[dataset.dataset_id] = {
                    "distribution": {
                        k: c / len(values) for k, c in counts.items()
                    },
                    "counts": counts,
                    "n": len(values),
                }
        per_attribute[spec.name] = {
            "kind": spec.value_kind,
            "perDataset": per_dataset,
        }
    return BiasProfile(
        task=task.value,
        dataset_ids=tuple(d.dataset_id for d in datasets),
        per_attribute=per_attribute,
        generated_at=generated_at(),
    )


def _gold_units_for(dataset: Dataset):
    from .core import gold_units

    return gold_units(dataset)


# ---------------------------------------------------------------------------
# F4: error cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorCase:
    """One mispredicted evaluation unit, addressable by bucket."""

    sample_id: int
    unit_kind: str  # "sample" | "span"
    start: int | None
    end: int | None
    error_kind: str  # "wrong-label" | "missed" | "spurious"
    gold: str
    predicted: Mapping[str, str]  # system id -> predicted value at this unit
    context: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "sampleId": self.sample_id,
            "unitKind": self.unit_kind,
            "start": self.start,
            "end": self.end,
            "errorKind": self.error_kind,
            "gold": self.gold,
            "predicted": dict(self.predicted),
            "context": self.context,
        }


def _case_order(case: ErrorCase):
    kind_rank = {"wrong-label": 0, "missed": 0, "spurious": 1}[case.error_kind]
    return (
        case.sample_id,
        case.start if case.start is not None else -1,
        case.end if case.end is not None else -1,
        kind_rank,
        case.gold,
    )


def _context(dataset: Dataset, sample_id: int) -> str:
    sample = dataset.samples[sample_id]
    if dataset.task is TaskKind.SEQUENCE_LABELING:
        return " ".join(sample.tokens)
    return sample.text[:CONTEXT_CHAR_LIMIT]


def _require_correctness_task(dataset: Dataset) -> None:
    if dataset.task is TaskKind.SCORED_GENERATION:
        raise UnsupportedTask(
            "error analysis needs a correctness-based task; "
            "scored generation has no per-unit right/wrong"
        )


def _pred_span_labels(scored: ScoredSystem) -> list[dict[tuple[int, int], str]]:
    """Per sentence: predicted label by (start, end) extent."""
    out = []
    for outcome in scored.outcomes:
        by_extent = {}
        for start, end, label in outcome.matched | outcome.spurious:
            by_extent[(start, end)] = label
        out.append(by_extent)
    return out


def _gold_span_labels(dataset: Dataset) -> list[dict[tuple[int, int], str]]:
    from .core import extract_spans

    out = []
    for sample in dataset.samples:
        out.append(
            {(s, e): lab for s, e, lab in extract_spans(sample.gold_tags)}
        )
    return out


def _error_units(scored: ScoredSystem) -> set:
    """Gold evaluation units this system got wrong (samples or missed
    gold spans); the unit sets compared across systems."""
    dataset = scored.dataset
    if dataset.task is TaskKind.TEXT_CLASSIFICATION:
        return {
            s.id
            for s, p in zip(dataset.samples, scored.system.predictions)
            if p.label != s.gold_label
        }
    return {
        SpanUnit(sample.id, *span)
        for sample in dataset.samples
        for span in scored.outcomes[sample.id].missed
    }


def _cases_for_units(
    units,
    dataset: Dataset,
    scoreds: Sequence[ScoredSystem],
) -> list[ErrorCase]:
    cases = []
    if dataset.task is TaskKind.TEXT_CLASSIFICATION:
        for sample_id in units:
            predicted = {
                s.system.system_id: s.system.predictions[sample_id].label
                for s in scoreds
            }
            cases.append(
                ErrorCase(
                    sample_id,
                    "sample",
                    None,
                    None,
                    "wrong-label",
                    dataset.samples[sample_id].gold_label,
                    predicted,
                    _context(dataset, sample_id),
                )
            )
    else:
        pred_labels = [_pred_span_labels(s) for s in scoreds]
        for unit in units:
            predicted = {
                s.system.system_id: pred_labels[i][unit.sample_id].get(
                    (unit.start, unit.end), "O"
                )
                for i, s in enumerate(scoreds)
            }
            cases.append(
                ErrorCase(
                    unit.sample_id,
                    "span",
                    unit.start,
                    unit.end,
                    "missed",
                    unit.label,
                    predicted,
                    _context(dataset, unit.sample_id),
                )
            )
    return sorted(cases, key=_case_order)


def bucket_error_cases(
    system: SystemOutput,
    dataset: Dataset,
    bucket: str,
    strict_attrs: bool = False,
) -> list[ErrorCase]:
    """Errors of one system restricted to one bucket, addressed as
    ``attribute|key`` (e.g. ``eLen|(3,+inf)``).

    For span tasks a bucket's errors are its missed gold spans plus the
    spurious predictions attributed to it, matching the bucket tally
    (errors == fn + fp); for classification they are its mispredicted
    samples (errors == n - correct).
    """
    _require_correctness_task(dataset)
    if "|" not in bucket:
        raise UnknownBucket(
            f"bucket address {bucket!r} is not of the form attribute|key"
        )
    attr_name, key = bucket.split("|", 1)
    spec = get_attribute(dataset.task, attr_name)
    scored = score_system(system, dataset)
    series = attribute_series(scored, spec, strict=strict_attrs)
    if key not in {t.key for t in series}:
        raise UnknownBucket(f"no bucket {key!r} for attribute {attr_name!r}")
    rule = _resolve_rule_for(scored, spec, strict_attrs)

    sys_id = system.system_id
    cases: list[ErrorCase] = []
    if dataset.task is TaskKind.TEXT_CLASSIFICATION:
        for sample, pred in zip(dataset.samples, system.predictions):
            if pred.label == sample.gold_label:
                continue
            value = attribute_value(spec, SampleUnit(sample.id), dataset)
            if bucket_key_of(rule, value) == key:
                cases.append(
                    ErrorCase(
                        sample.id, "sample", None, None, "wrong-label",
                        sample.gold_label, {sys_id: pred.label},
                        _context(dataset, sample.id),
                    )
                )
    else:
        gold_labels = _gold_span_labels(dataset)
        pred_labels = _pred_span_labels(scored)
        for sample in dataset.samples:
            outcome = scored.outcomes[sample.id]
            for start, end, label in outcome.missed:
                value = attribute_value(
                    spec, SpanUnit(sample.id, start, end, label), dataset,
                    strict=strict_attrs,
                )
                if bucket_key_of(rule, value) != key:
                    continue
                predicted = pred_labels[sample.id].get((start, end), "O")
                cases.append(
                    ErrorCase(
                        sample.id, "span", start, end, "missed",
                        label, {sys_id: predicted},
                        _context(dataset, sample.id),
                    )
                )
            for start, end, label in outcome.spurious:
                value = attribute_value(
                    spec, SpanUnit(sample.id, start, end, label), dataset,
                    strict=strict_attrs,
                )
                if bucket_key_of(rule, value) != key:
                    continue
                gold = gold_labels[sample.id].get((start, end), "O")
                cases.append(
                    ErrorCase(
                        sample.id, "span", start, end, "spurious",
                        gold, {sys_id: label},
                        _context(dataset, sample.id),
                    )
                )
    return sorted(cases, key=_case_order)


def _resolve_rule_for(scored: ScoredSystem, spec, strict: bool):
    dataset = scored.dataset
    if dataset.task is TaskKind.SEQUENCE_LABELING:
        values = []
        for sample in dataset.samples:
            outcome = scored.outcomes[sample.id]
            for span in outcome.matched | outcome.missed:
                values.append(
                    attribute_value(
                        spec, SpanUnit(sample.id, *span), dataset, strict=strict
                    )
                )
    else:
        values = [
            attribute_value(spec, SampleUnit(s.id), dataset, strict=strict)
            for s in dataset.samples
        ]
    return resolve_rule(spec, values)


def common_error_cases(
    systems: Sequence[SystemOutput], dataset: Dataset
) -> list[ErrorCase]:
    """Evaluation units every given system mispredicts; adding a system
    can only shrink the set."""
    _require_correctness_task(dataset)
    if len(systems) < 2:
        raise NeedTwoOrMoreSystems("common-error analysis needs >= 2 systems")
    scoreds = [score_system(s, dataset) for s in systems]
    common = set.intersection(*[_error_units(s) for s in scoreds])
    return _cases_for_units(common, dataset, scoreds)


def unique_error_cases(
    system_a: SystemOutput, system_b: SystemOutput, dataset: Dataset
) -> list[ErrorCase]:
    """Units system A predicts correctly while system B mispredicts."""
    _require_correctness_task(dataset)
    if system_a is None or system_b is None:
        raise NeedTwoSystems("unique-error analysis needs exactly 2 systems")
    scored_a = score_system(system_a, dataset)
    scored_b = score_system(system_b, dataset)
    units = _error_units(scored_b) - _error_units(scored_a)
    return _cases_for_units(units, dataset, [scored_a, scored_b])


# ---------------------------------------------------------------------------
# Calibration report assembly (math in reliability)
# ---------------------------------------------------------------------------


def calibration_analysis(
    system: SystemOutput, dataset: Dataset, bin_count: int = 10
) -> dict[str, Any]:
    from .reliability import calibration_for_system
    from .report import ENGINE_VERSION

    rep = calibration_for_system(system, dataset, bin_count)
    return {
        "systemIds": [system.system_id],
        "systemNames": [system.name],
        "datasetId": dataset.dataset_id,
        "taskKind": dataset.task.value,
        "bins": [
            {
                "low": b.low,
                "high": b.high,
                "n": b.n,
                "meanConfidence": b.mean_confidence,
                "accuracy": b.accuracy,
            }
            for b in rep.bins
        ],
        "confidenceHistogram": list(rep.confidence_histogram),
        "ece": rep.ece,
        "n": rep.n,
        "generatedAt": generated_at(),
        "engineVersion": ENGINE_VERSION,
    }
