"""Voting-based system combination.

Plurality voting per sample (classification) or per token (sequence
labeling); the combined output is a virtual system analyzable like any
other.  Ties break first by highest mean confidence among the tied
labels (when every member supplies confidences), then by member order,
so combination is fully reproducible.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Any, Sequence

from .core import (
    ClassificationPrediction,
    Dataset,
    SequencePrediction,
    SystemOutput,
    TaskKind,
    repair_bio,
)
from .errors import CombinationUnsupportedTask, NeedTwoOrMoreSystems
from .ingest import content_id, format_classification_tsv, format_conll
from .metrics import _check_compat, metric_for_task, metric_value, sample_components
from .reliability import BootstrapConfig
from .report import AnalysisReport


@dataclass(frozen=True)
class CombinedSystem:
    """The voted system plus everything needed to persist or audit it:
    its serialized output (whose content hash is the system id) and the
    per-sample vote tallies."""

    member_ids: tuple[str, ...]
    system: SystemOutput
    provenance: tuple[Any, ...]
    output_bytes: bytes


def _vote(
    ballots: Sequence[str],
    confidences: Sequence[float | None],
) -> tuple[str, dict[str, int]]:
    counts = Counter(ballots)
    top = max(counts.values())
    tied = [label for label, c in counts.items() if c == top]
    if len(tied) == 1:
        return tied[0], dict(counts)
    if all(c is not None for c in confidences):
        means = {
            label: sum(
                c for b, c in zip(ballots, confidences) if b == label
            ) / counts[label]
            for label in tied
        }
        best = max(means.values())
        tied = [label for label in tied if means[label] == best]
    for ballot in ballots:  # member order decides remaining ties
        if ballot in tied:
            return ballot, dict(counts)
    raise AssertionError("unreachable")


def combine(systems: Sequence[SystemOutput], dataset: Dataset) -> CombinedSystem:
    """Virtual system from >= 2 members on the same dataset.

    Sequence outputs are voted token by token and then BIO-repaired, so
    the combined tags are always structurally valid.
    """
    if len(systems) < 2:
        raise NeedTwoOrMoreSystems("combination needs >= 2 systems")
    for system in systems:
        _check_compat(system, dataset)
    if dataset.task is TaskKind.SCORED_GENERATION:
        raise CombinationUnsupportedTask(
            "voting needs discrete predictions; scored generation has none"
        )

    member_ids = tuple(s.system_id for s in systems)
    predictions = []
    provenance = []
    if dataset.task is TaskKind.TEXT_CLASSIFICATION:
        for i in range(len(dataset.samples)):
            ballots = [s.predictions[i].label for s in systems]
            confidences = [s.predictions[i].confidence for s in systems]
            label, votes = _vote(ballots, confidences)
            predictions.append(ClassificationPrediction(i, label, None))
            provenance.append(votes)
    else:
        for i, sample in enumerate(dataset.samples):
            member_tags = [s.predictions[i].tags for s in systems]
            voted = []
            token_votes = []
            for t in range(len(sample.tokens)):
                ballots = [tags[t] for tags in member_tags]
                tag, votes = _vote(ballots, [None] * len(ballots))
                voted.append(tag)
                token_votes.append(votes)
            predictions.append(SequencePrediction(i, repair_bio(voted)))
            provenance.append(token_votes)

    name = "comb(" + "+".join(s.name for s in systems) + ")"
    if dataset.task is TaskKind.TEXT_CLASSIFICATION:
        output = format_classification_tsv(dataset.samples, predictions)
    else:
        output = format_conll(dataset.samples, predictions)
    combined = SystemOutput(
        system_id=content_id(output),
        name=name,
        task=dataset.task,
        predictions=tuple(predictions),
    )
    return CombinedSystem(member_ids, combined, tuple(provenance), output)


def combined_report(
    systems: Sequence[SystemOutput],
    dataset: Dataset,
    attributes: Sequence[str] | None = None,
    config: BootstrapConfig | None = None,
) -> AnalysisReport:
    """Full report for the voted system, with each member's overall value
    attached so ensemble charts can show `comb` next to the members."""
    from .analysis import single_analysis

    combined = combine(systems, dataset)
    report = single_analysis(combined.system, dataset, attributes, config)
    metric = metric_for_task(dataset.task)
    members = tuple(
        {
            "systemId": s.system_id,
            "name": s.name,
            "value": metric_value(metric, sample_components(s, dataset).sum(axis=0)),
        }
        for s in systems
    )
    return AnalysisReport(
        system_ids=report.system_ids,
        system_names=report.system_names,
        dataset_id=report.dataset_id,
        task=report.task,
        metric_name=report.metric_name,
        overall=report.overall,
        per_attribute=report.per_attribute,
        bootstrap=report.bootstrap,
        generated_at=report.generated_at,
        members=members,
    )
