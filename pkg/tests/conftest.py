"""Shared synthetic-data builders for the test suite."""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from fineval.core import (
    ClassificationPrediction,
    ClassificationSample,
    Dataset,
    SequencePrediction,
    SequenceSample,
    SystemOutput,
    TaskKind,
)

LABELS = ("PER", "LOC", "ORG")


@lru_cache(maxsize=None)
def _text(n_tokens: int) -> str:
    return " ".join(f"w{i}" for i in range(n_tokens))


def make_classification(
    rng: np.random.Generator,
    n: int,
    n_labels: int = 4,
    accuracy: float = 0.8,
    with_confidence: bool = False,
    name: str = "sys",
    dataset_id: str = "cls-fixture",
) -> tuple[Dataset, SystemOutput]:
    labels = [f"L{i}" for i in range(n_labels)]
    gold = rng.integers(0, n_labels, n)
    correct = rng.random(n) < accuracy
    if n_labels > 1:
        offset = rng.integers(1, n_labels, n)
        pred = np.where(correct, gold, (gold + offset) % n_labels)
    else:
        pred = gold
    lengths = rng.integers(1, 40, n)
    samples = tuple(
        ClassificationSample(i, _text(int(lengths[i])), labels[gold[i]])
        for i in range(n)
    )
    confidences = rng.random(n) if with_confidence else None
    predictions = tuple(
        ClassificationPrediction(
            i,
            labels[pred[i]],
            float(confidences[i]) if confidences is not None else None,
        )
        for i in range(n)
    )
    dataset = Dataset(dataset_id, TaskKind.TEXT_CLASSIFICATION, samples)
    system = SystemOutput(name, name, TaskKind.TEXT_CLASSIFICATION, predictions)
    return dataset, system


def random_bio_tags(
    rng: np.random.Generator,
    length: int,
    labels: tuple[str, ...] = LABELS,
    entity_rate: float = 0.35,
    max_span: int = 4,
) -> tuple[str, ...]:
    tags: list[str] = []
    i = 0
    while i < length:
        if rng.random() < entity_rate:
            label = labels[int(rng.integers(0, len(labels)))]
            span_len = 1 + int(rng.integers(0, min(max_span, length - i)))
            tags.append(f"B-{label}")
            tags.extend([f"I-{label}"] * (span_len - 1))
            i += span_len
        else:
            tags.append("O")
            i += 1
    return tuple(tags)


def arbitrary_bio_tags(
    rng: np.random.Generator, length: int, labels: tuple[str, ...] = LABELS
) -> tuple[str, ...]:
    """Syntactically valid but arbitrarily ordered tags (orphan I- and
    label switches included), as real system outputs produce."""
    vocab = ["O"] + [f"{p}-{label}" for p in "BI" for label in labels]
    return tuple(vocab[int(rng.integers(0, len(vocab)))] for _ in range(length))


def make_ner(
    rng: np.random.Generator,
    n_sentences: int,
    min_len: int = 3,
    max_len: int = 15,
    dataset_id: str = "ner-fixture",
) -> Dataset:
    samples = []
    for i in range(n_sentences):
        length = int(rng.integers(min_len, max_len + 1))
        tags = random_bio_tags(rng, length)
        tokens = tuple(f"t{i}_{j}" for j in range(length))
        samples.append(SequenceSample(i, tokens, tags))
    return Dataset(dataset_id, TaskKind.SEQUENCE_LABELING, tuple(samples))


def noisy_system(
    rng: np.random.Generator,
    dataset: Dataset,
    noise: float = 0.1,
    name: str = "sys",
) -> SystemOutput:
    """Perturb gold tags token-wise; lenient extraction absorbs the
    resulting malformed transitions."""
    vocab = ["O"] + [f"{p}-{label}" for p in "BI" for label in LABELS]
    predictions = []
    for sample in dataset.samples:
        tags = list(sample.gold_tags)
        for t in range(len(tags)):
            if rng.random() < noise:
                tags[t] = vocab[int(rng.integers(0, len(vocab)))]
        predictions.append(SequencePrediction(sample.id, tuple(tags)))
    return SystemOutput(name, name, TaskKind.SEQUENCE_LABELING, tuple(predictions))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)


# ---------------------------------------------------------------------------
# A small CoNLL-style corpus with three constructed systems whose error
# structure is known exactly; used by analysis tests and the end-to-end
# CLI scenario.
# ---------------------------------------------------------------------------


def scenario_corpus() -> dict:
    """Deterministic corpus: sentences with PER/LOC/ORG entities of
    lengths 1-5, plus three systems:

    - sysA: misses most entities of length >= 4 and six short PER
      entities, plus the shared hard span; best overall.
    - sysB: perfect on PER, misses many LOC/ORG entities and the hard
      span; worse than A overall.
    - sysC: misses the hard span and a few other entities; errors mostly
      disjoint from A's and B's.
    """
    rng = np.random.default_rng(7)
    sentences: list[tuple[tuple[str, ...], tuple[str, ...]]] = []

    def add_sentence(entities: list[tuple[int, str]], pad: int = 2) -> int:
        tokens: list[str] = []
        tags: list[str] = []
        for length, label in entities:
            for _ in range(pad):
                tokens.append(f"f{rng.integers(100)}")
                tags.append("O")
            surface = [f"e{rng.integers(1000)}" for _ in range(length)]
            tokens.extend(surface)
            tags.append(f"B-{label}")
            tags.extend([f"I-{label}"] * (length - 1))
        for _ in range(pad):
            tokens.append(f"f{rng.integers(100)}")
            tags.append("O")
        sentences.append((tuple(tokens), tuple(tags)))
        return len(sentences) - 1

    spans_by_kind: dict[str, list[int]] = {"long": [], "per": [], "locorg": []}
    for _ in range(20):
        spans_by_kind["long"].append(add_sentence([(4 + int(rng.integers(0, 2)), "ORG")]))
    for _ in range(30):
        spans_by_kind["per"].append(add_sentence([(2, "PER")]))
    for _ in range(50):
        label = "LOC" if rng.random() < 0.5 else "ORG"
        spans_by_kind["locorg"].append(add_sentence([(1 + int(rng.integers(0, 3)), label)]))
    hard_idx = add_sentence([(3, "ORG")])

    samples = tuple(
        SequenceSample(i, tokens, tags) for i, (tokens, tags) in enumerate(sentences)
    )
    dataset = Dataset("conll-syn", TaskKind.SEQUENCE_LABELING, samples)

    def build_system(name: str, miss_ids: set[int]) -> SystemOutput:
        predictions = []
        for sample in samples:
            if sample.id in miss_ids:
                predictions.append(
                    SequencePrediction(sample.id, tuple("O" for _ in sample.tokens))
                )
            else:
                predictions.append(SequencePrediction(sample.id, sample.gold_tags))
        return SystemOutput(name, name, TaskKind.SEQUENCE_LABELING, tuple(predictions))

    miss_a = set(spans_by_kind["long"][:12]) | set(spans_by_kind["per"][:6]) | {hard_idx}
    miss_b = set(spans_by_kind["locorg"][:25]) | {hard_idx}
    miss_c = (
        set(spans_by_kind["locorg"][25:48])
        | set(spans_by_kind["per"][6:9])
        | {hard_idx}
    )

    return {
        "dataset": dataset,
        "systems": {
            "sysA": build_system("sysA", miss_a),
            "sysB": build_system("sysB", miss_b),
            "sysC": build_system("sysC", miss_c),
        },
        "hard_sentence": hard_idx,
        "hard_span": (2, 4, "ORG"),  # pad=2 tokens, length-3 entity
        "miss": {"sysA": miss_a, "sysB": miss_b, "sysC": miss_c},
    }


def write_scenario_files(tmp: Path) -> dict:
    """Materialize the scenario corpus as CLI-consumable files."""
    from fineval.ingest import format_conll

    scen = scenario_corpus()
    dataset = scen["dataset"]
    paths = {"dataset": tmp / "gold.conll"}
    paths["dataset"].write_bytes(format_conll(dataset.samples))
    for name, system in scen["systems"].items():
        path = tmp / f"{name}.conll"
        path.write_bytes(format_conll(dataset.samples, system.predictions))
        paths[name] = path
    scen["paths"] = paths
    return scen
