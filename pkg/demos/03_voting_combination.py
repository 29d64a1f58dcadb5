"""System combination: three mediocre classifiers, one better ensemble.

Three systems are each 88% accurate with independent mistakes; plurality
voting repairs most single-system errors, and the ensemble chart shows
`comb` beating every member.
"""

import numpy as np

from fineval import (
    BootstrapConfig,
    ClassificationPrediction,
    ClassificationSample,
    Dataset,
    SystemOutput,
    TaskKind,
    combined_report,
)

rng = np.random.default_rng(2)
LABELS = ["business", "sports", "tech", "world"]

n = 1500
gold = rng.integers(0, 4, n)
samples = tuple(
    ClassificationSample(i, f"article {i}", LABELS[gold[i]]) for i in range(n)
)
dataset = Dataset("demo-topic", TaskKind.TEXT_CLASSIFICATION, samples)

members = []
for m in range(3):
    wrong = rng.random(n) < 0.12
    shift = rng.integers(1, 4, n)
    pred = np.where(wrong, (gold + shift) % 4, gold)
    members.append(
        SystemOutput(
            f"member-{m}", f"member-{m}", dataset.task,
            tuple(ClassificationPrediction(i, LABELS[pred[i]]) for i in range(n)),
        )
    )

report = combined_report(members, dataset, ["label"], BootstrapConfig(replicates=300, seed=0))

print("ensemble chart (accuracy):")
rows = [(m["name"], m["value"]) for m in report.members]
rows.append(("comb", report.overall.value))
for name, value in rows:
    bar = "#" * int(round(value * 50))
    print(f"  {name:>10}  {bar} {value:.4f}")

gain = report.overall.value - max(m["value"] for m in report.members)
print(f"\nvoting gain over the best member: {gain:+.4f}")
print("(independent errors rarely coincide, so two correct members outvote")
print("one wrong member on most samples)")
