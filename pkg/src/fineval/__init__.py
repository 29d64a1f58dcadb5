"""fineval: fine-grained, statistically qualified evaluation of NLP
system outputs.

Turns raw per-sample predictions into bucketed performance histograms,
pairwise gap analyses, dataset bias profiles, error drill-down tables,
voting-based combination, bootstrap confidence intervals, and
calibration diagnostics — as a library, a CLI, and an HTTP service.
"""

from .analysis import (
    BiasProfile,
    ErrorCase,
    PairReport,
    bias_analysis,
    bucket_error_cases,
    calibration_analysis,
    common_error_cases,
    pair_analysis,
    single_analysis,
    unique_error_cases,
)
from .combination import CombinedSystem, combine, combined_report
from .core import (
    AttributeSpec,
    ClassificationPrediction,
    ClassificationSample,
    Dataset,
    GenerationPrediction,
    GenerationSample,
    SampleUnit,
    SequencePrediction,
    SequenceSample,
    SpanUnit,
    SystemOutput,
    TaskKind,
    attribute_value,
    default_attributes,
    extract_spans,
    gold_units,
    is_valid_bio,
    repair_bio,
    spans_to_tags,
    task_from_name,
)
from .ingest import (
    TrainStats,
    build_train_stats,
    parse_classification_tsv,
    parse_conll,
    parse_score_tsv,
)
from .metrics import span_f1
from .reliability import (
    BootstrapConfig,
    CalibrationReport,
    bootstrap_ci,
    calibration,
)
from .report import ENGINE_VERSION, AnalysisReport, BucketPerformance, canonical_json_bytes

__version__ = ENGINE_VERSION

__all__ = [
    "AnalysisReport",
    "AttributeSpec",
    "BiasProfile",
    "BootstrapConfig",
    "BucketPerformance",
    "CalibrationReport",
    "ClassificationPrediction",
    "ClassificationSample",
    "CombinedSystem",
    "Dataset",
    "ErrorCase",
    "GenerationPrediction",
    "GenerationSample",
    "PairReport",
    "SampleUnit",
    "SequencePrediction",
    "SequenceSample",
    "SpanUnit",
    "SystemOutput",
    "TaskKind",
    "TrainStats",
    "attribute_value",
    "bias_analysis",
    "bootstrap_ci",
    "bucket_error_cases",
    "build_train_stats",
    "calibration",
    "calibration_analysis",
    "canonical_json_bytes",
    "combine",
    "combined_report",
    "common_error_cases",
    "default_attributes",
    "extract_spans",
    "gold_units",
    "is_valid_bio",
    "pair_analysis",
    "parse_classification_tsv",
    "parse_conll",
    "parse_score_tsv",
    "repair_bio",
    "single_analysis",
    "span_f1",
    "spans_to_tags",
    "task_from_name",
    "unique_error_cases",
]
