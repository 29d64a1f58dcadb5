"""Parsing, validation, and canonical serialization of input files.

Three formats, all UTF-8 with tab (TSV) or whitespace (CoNLL) separated
fields.  System-output files carry gold and prediction side by side;
gold-only variants back dataset registration and training statistics.
Windows line endings are normalized to ``\\n`` on read.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    ClassificationPrediction,
    ClassificationSample,
    GenerationPrediction,
    GenerationSample,
    SequencePrediction,
    SequenceSample,
    extract_spans,
)
from .errors import (
    BadColumnCount,
    BadConfidence,
    BadScore,
    ColumnOutOfRange,
    DuplicateSourceId,
    EmptyFile,
    ValidationFailed,
)

logger = logging.getLogger(__name__)

DEFAULT_CONLL_COLUMNS = (0, 1, 2)


def decode(data: bytes) -> str:
    """UTF-8 decode with newline normalization (CRLF/CR -> LF)."""
    text = data.decode("utf-8")
    return text.replace("\r\n", "\n").replace("\r", "\n")


def canonical_bytes(data: bytes) -> bytes:
    """Newline-normalized bytes; the unit of content addressing."""
    return data.replace(b"\r\n", b"\n").replace(b"\r", b"\n")


def content_id(data: bytes) -> str:
    import hashlib

    return hashlib.sha256(canonical_bytes(data)).hexdigest()


@dataclass(frozen=True)
class TrainStats:
    """Gold-side statistics of a training file, keyed by surface string."""

    entity_surface_counts: dict[str, int]
    token_counts: dict[str, int]
    source: str = ""


# ---------------------------------------------------------------------------
# Classification TSV: text \t gold \t pred [\t confidence]
# ---------------------------------------------------------------------------


def parse_classification_tsv(
    data: bytes, with_predictions: bool = True
) -> tuple[tuple[ClassificationSample, ...], tuple[ClassificationPrediction, ...]]:
    """One record per line; ``#``-prefixed lines are comments.

    The first record fixes the column arity (3 or 4 with predictions, 2
    without); later deviations raise BadColumnCount so confidence stays
    all-or-none across the file.
    """
    samples: list[ClassificationSample] = []
    preds: list[ClassificationPrediction] = []
    arity: int | None = None
    for lineno, line in enumerate(decode(data).split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if with_predictions:
            if len(fields) not in (3, 4):
                raise BadColumnCount(
                    f"expected 3 or 4 tab-separated fields, got {len(fields)}",
                    line=lineno,
                )
        elif len(fields) != 2:
            raise BadColumnCount(
                f"expected 2 tab-separated fields, got {len(fields)}", line=lineno
            )
        if arity is None:
            arity = len(fields)
        elif len(fields) != arity:
            raise BadColumnCount(
                f"expected {arity} fields as on earlier lines, got {len(fields)}",
                line=lineno,
            )
        idx = len(samples)
        samples.append(ClassificationSample(idx, fields[0], fields[1]))
        if with_predictions:
            confidence = None
            if len(fields) == 4:
                try:
                    confidence = float(fields[3])
                except ValueError:
                    confidence = math.nan
                if not (0.0 <= confidence <= 1.0):
                    raise BadConfidence(
                        f"confidence {fields[3]!r} is not a real in [0,1]",
                        line=lineno,
                    )
            preds.append(ClassificationPrediction(idx, fields[2], confidence))
    if not samples:
        raise EmptyFile("no records found")
    return tuple(samples), tuple(preds)


def format_classification_tsv(
    samples: Sequence[ClassificationSample],
    predictions: Sequence[ClassificationPrediction] = (),
) -> bytes:
    lines = []
    if predictions:
        for s, p in zip(samples, predictions):
            row = [s.text, s.gold_label, p.label]
            if p.confidence is not None:
                row.append(format(p.confidence, "g"))
            lines.append("\t".join(row))
    else:
        lines = [f"{s.text}\t{s.gold_label}" for s in samples]
    return ("\n".join(lines) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# CoNLL columns: token gold [pred], blank line between sentences
# ---------------------------------------------------------------------------


def parse_conll(
    data: bytes,
    columns: tuple[int, int, int] | None = DEFAULT_CONLL_COLUMNS,
) -> tuple[tuple[SequenceSample, ...], tuple[SequencePrediction, ...]]:
    """Whitespace-separated columns; a blank line ends a sentence and the
    file may end without one.  ``columns`` is (token, gold, pred) indices;
    pass a 2-tuple (token, gold) for gold-only files.

    Consecutive blank lines are tolerated; zero-token sentences are
    dropped with a logged warning count.
    """
    token_idx, gold_idx = columns[0], columns[1]
    pred_idx = columns[2] if len(columns) > 2 else None
    samples: list[SequenceSample] = []
    preds: list[SequencePrediction] = []
    tokens: list[str] = []
    gold: list[str] = []
    pred: list[str] = []
    blank_runs = 0

    def flush() -> None:
        nonlocal tokens, gold, pred
        if not tokens:
            return
        idx = len(samples)
        samples.append(SequenceSample(idx, tuple(tokens), tuple(gold)))
        if pred_idx is not None:
            preds.append(SequencePrediction(idx, tuple(pred)))
        tokens, gold, pred = [], [], []

    lines = decode(data).split("\n")
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            if not tokens:
                blank_runs += 1
            flush()
            continue
        fields = line.split()
        needed = max(token_idx, gold_idx, pred_idx if pred_idx is not None else 0)
        if needed >= len(fields):
            raise ColumnOutOfRange(
                f"need column {needed} but row has {len(fields)} fields",
                line=lineno,
            )
        tokens.append(fields[token_idx])
        gold.append(fields[gold_idx])
        if pred_idx is not None:
            pred.append(fields[pred_idx])
    flush()
    if not samples:
        raise EmptyFile("no sentences found")
    if blank_runs:
        logger.warning("dropped %d empty sentence(s)", blank_runs)
    return tuple(samples), tuple(preds)


def format_conll(
    samples: Sequence[SequenceSample],
    predictions: Sequence[SequencePrediction] = (),
) -> bytes:
    blocks = []
    for i, sample in enumerate(samples):
        rows = zip(sample.tokens, sample.gold_tags, predictions[i].tags) if predictions \
            else zip(sample.tokens, sample.gold_tags)
        blocks.append("\n".join(" ".join(row) for row in rows))
    return ("\n\n".join(blocks) + "\n").encode("utf-8")


def build_train_stats(data: bytes, columns: tuple[int, int] = (0, 1), source: str = "") -> TrainStats:
    """Count gold entity surfaces (space-joined) and tokens in a gold-only
    CoNLL file; backs the eFreq attribute."""
    samples, _ = parse_conll(data, columns=columns)
    surface_counts: dict[str, int] = {}
    token_counts: dict[str, int] = {}
    for sample in samples:
        for token in sample.tokens:
            token_counts[token] = token_counts.get(token, 0) + 1
        for start, end, _label in extract_spans(sample.gold_tags):
            surface = " ".join(sample.tokens[start : end + 1])
            surface_counts[surface] = surface_counts.get(surface, 0) + 1
    return TrainStats(surface_counts, token_counts, source=source)


# ---------------------------------------------------------------------------
# Score TSV: sourceId \t score (system), sourceId [\t reference] (dataset)
# ---------------------------------------------------------------------------


def parse_score_tsv(
    data: bytes,
) -> tuple[tuple[GenerationSample, ...], tuple[GenerationPrediction, ...]]:
    samples: list[GenerationSample] = []
    preds: list[GenerationPrediction] = []
    seen: set[str] = set()
    for lineno, line in enumerate(decode(data).split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise BadColumnCount(
                f"expected 2 tab-separated fields, got {len(fields)}", line=lineno
            )
        source_id, raw = fields
        if source_id in seen:
            raise DuplicateSourceId(f"duplicate source id {source_id!r}", line=lineno)
        seen.add(source_id)
        try:
            score = float(raw)
        except ValueError:
            score = math.nan
        if not math.isfinite(score):
            raise BadScore(f"score {raw!r} is not a finite real", line=lineno)
        idx = len(samples)
        samples.append(GenerationSample(idx, source_id))
        preds.append(GenerationPrediction(idx, score))
    if not samples:
        raise EmptyFile("no records found")
    return tuple(samples), tuple(preds)


def parse_score_dataset_tsv(data: bytes) -> tuple[GenerationSample, ...]:
    """Gold side of a scored-generation dataset: ``sourceId [\\t reference]``."""
    samples: list[GenerationSample] = []
    seen: set[str] = set()
    for lineno, line in enumerate(decode(data).split("\n"), 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (1, 2):
            raise BadColumnCount(
                f"expected 1 or 2 tab-separated fields, got {len(fields)}",
                line=lineno,
            )
        if fields[0] in seen:
            raise DuplicateSourceId(f"duplicate source id {fields[0]!r}", line=lineno)
        seen.add(fields[0])
        reference = fields[1] if len(fields) == 2 else None
        samples.append(GenerationSample(len(samples), fields[0], reference))
    if not samples:
        raise EmptyFile("no records found")
    return tuple(samples)


def format_score_dataset_tsv(samples: Sequence[GenerationSample]) -> bytes:
    lines = [
        s.source_id if s.reference_text is None else f"{s.source_id}\t{s.reference_text}"
        for s in samples
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def format_score_tsv(
    samples: Sequence[GenerationSample],
    predictions: Sequence[GenerationPrediction],
) -> bytes:
    lines = [
        f"{s.source_id}\t{format(p.score, 'g')}"
        for s, p in zip(samples, predictions)
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def align_generation_predictions(
    dataset_samples: Sequence[GenerationSample],
    file_samples: Sequence[GenerationSample],
    predictions: Sequence[GenerationPrediction],
) -> tuple[GenerationPrediction, ...]:
    """Reorder a system's score rows to dataset order by source id."""
    scores = {s.source_id: predictions[i].score for i, s in enumerate(file_samples)}
    missing = [s.source_id for s in dataset_samples if s.source_id not in scores]
    extra = set(scores) - {s.source_id for s in dataset_samples}
    if missing or extra:
        raise ValidationFailed(
            f"source ids do not match the dataset "
            f"(missing {len(missing)}, unexpected {len(extra)})"
        )
    return tuple(
        GenerationPrediction(s.id, scores[s.source_id]) for s in dataset_samples
    )
