"""Reliability: bootstrap whiskers that widen on thin buckets, and a
reliability diagram for an overconfident classifier.
"""

import numpy as np

from fineval import (
    BootstrapConfig,
    ClassificationPrediction,
    ClassificationSample,
    Dataset,
    SystemOutput,
    TaskKind,
    calibration,
    single_analysis,
)

rng = np.random.default_rng(3)

# -- bucket whiskers ----------------------------------------------------------
# a corpus where one label is rare: same accuracy, much wider interval

labels = ["common"] * 900 + ["rare"] * 30
gold = [labels[i] for i in range(len(labels))]
samples = tuple(
    ClassificationSample(i, f"text {i}", gold[i]) for i in range(len(gold))
)
dataset = Dataset("demo-rare", TaskKind.TEXT_CLASSIFICATION, samples)
predictions = tuple(
    ClassificationPrediction(
        i, gold[i] if rng.random() < 0.85 else "other", None
    )
    for i in range(len(gold))
)
system = SystemOutput("demo", "demo", dataset.task, predictions)

report = single_analysis(system, dataset, ["label"], BootstrapConfig(replicates=800, seed=0))
print("per-label accuracy with 95% bootstrap intervals:")
for bucket in report.per_attribute["label"]:
    if bucket.value is None:
        continue
    width = bucket.ci_high - bucket.ci_low
    print(
        f"  {bucket.key:>8}  n={bucket.n:<4} acc={bucket.value:.3f} "
        f"[{bucket.ci_low:.3f}, {bucket.ci_high:.3f}]  width={width:.3f}"
    )
print("\nSame point accuracy, but the rare bucket's whisker is several times")
print("wider: the histogram says so before anyone over-interprets the bar.\n")

# -- calibration --------------------------------------------------------------
# confidences drawn high regardless of correctness: overconfident model

n = 5000
confidence = 0.5 + 0.5 * rng.random(n)          # always claims >= 0.5
correct = rng.random(n) < 0.7                    # but is right 70% of the time
report = calibration(confidence, correct, bin_count=10)

print("reliability diagram (mean confidence vs accuracy per bin):")
for b in report.bins:
    if b.n == 0:
        continue
    gap = b.accuracy - b.mean_confidence
    marker = "over" if gap < 0 else "under"
    print(
        f"  ({b.low:.1f},{b.high:.1f}]  n={b.n:<5} conf={b.mean_confidence:.3f} "
        f"acc={b.accuracy:.3f}  gap={gap:+.3f} ({marker}confident)"
    )
print(f"\nexpected calibration error: {report.ece:.4f}")
