"""Single-system analysis: where is a tagger strong, where does it break?

Builds a synthetic NER corpus whose system is deliberately bad at long
entities, runs the bucketed analysis, and renders each attribute's
performance histogram (with bootstrap whiskers) as text.
"""

import numpy as np

from fineval import (
    BootstrapConfig,
    Dataset,
    SequencePrediction,
    SequenceSample,
    SystemOutput,
    TaskKind,
    single_analysis,
)

rng = np.random.default_rng(0)
LABELS = ("PER", "LOC", "ORG")


def sentence(i: int) -> SequenceSample:
    length = int(rng.integers(5, 14))
    tags = ["O"] * length
    pos = 0
    while pos < length - 1:
        if rng.random() < 0.3:
            label = LABELS[int(rng.integers(3))]
            span = 1 + int(rng.integers(0, min(5, length - pos)))
            tags[pos] = f"B-{label}"
            for k in range(1, span):
                tags[pos + k] = f"I-{label}"
            pos += span + 1
        else:
            pos += 1
    tokens = tuple(f"tok{i}_{j}" for j in range(length))
    return SequenceSample(i, tokens, tuple(tags))


samples = tuple(sentence(i) for i in range(400))
dataset = Dataset("demo-ner", TaskKind.SEQUENCE_LABELING, samples)

# the system drops 70% of entities longer than 3 tokens, keeps the rest
predictions = []
for sample in samples:
    tags = list(sample.gold_tags)
    from fineval import extract_spans

    for start, end, label in extract_spans(sample.gold_tags):
        if end - start + 1 >= 4 and rng.random() < 0.7:
            for k in range(start, end + 1):
                tags[k] = "O"
    predictions.append(SequencePrediction(sample.id, tuple(tags)))
system = SystemOutput("demo-sys", "demo-sys", dataset.task, tuple(predictions))

report = single_analysis(
    system, dataset, ["eLen", "sLen", "eLab"], BootstrapConfig(replicates=500, seed=0)
)

print(f"overall span-F1: {report.overall.value:.4f} "
      f"[{report.overall.ci_low:.4f}, {report.overall.ci_high:.4f}]  "
      f"(n={report.overall.n} gold spans)\n")

for attr, series in report.per_attribute.items():
    print(f"=== {attr} ===")
    for bucket in series:
        if bucket.value is None:
            print(f"  {bucket.key:>12}  (no data)")
            continue
        bar = "#" * int(round(bucket.value * 40))
        print(
            f"  {bucket.key:>12}  {bar:<40} {bucket.value:.3f} "
            f"[{bucket.ci_low:.3f}, {bucket.ci_high:.3f}]  n={bucket.n}"
        )
    print()

print("The eLen histogram pinpoints the weakness: the (3,+inf) bucket sits")
print("far below the short-entity buckets, with a wide whisker because few")
print("long entities exist to estimate it from.")
