"""Report records and the canonical JSON they serialize to.

Canonical form: object keys sorted, compact separators, UTF-8, reals
rounded half-even to 5 decimal places at serialization time only
(internal arithmetic keeps full precision).  Identical report content
always yields identical bytes, which backs response caching and
cross-interface (CLI vs API) equality.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Mapping, Sequence

ENGINE_VERSION = "0.1.0"

# report timestamps honor this env var (SOURCE_DATE_EPOCH-style) so that
# reproducible pipelines can pin byte-identical output
GENERATED_AT_ENV = "FINEVAL_GENERATED_AT"


def generated_at() -> str:
    pinned = os.environ.get(GENERATED_AT_ENV)
    if pinned:
        return pinned
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class BucketPerformance:
    """Metric value of one bucket, with its 95%-style interval and the
    additive tally it was computed from.  ``value`` is None for buckets
    with no contributing data (never NaN)."""

    key: str
    n: int
    value: float | None
    ci_low: float | None
    ci_high: float | None
    components: Mapping[str, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "n": self.n,
            "value": self.value,
            "ciLow": self.ci_low,
            "ciHigh": self.ci_high,
            "components": dict(self.components),
        }


@dataclass(frozen=True)
class AnalysisReport:
    """Overall metric plus per-attribute bucket series for one system
    (or one virtual combined system)."""

    system_ids: tuple[str, ...]
    system_names: tuple[str, ...]
    dataset_id: str
    task: str
    metric_name: str
    overall: BucketPerformance
    per_attribute: Mapping[str, tuple[BucketPerformance, ...]]
    bootstrap: Mapping[str, Any]
    generated_at: str
    members: tuple[Mapping[str, Any], ...] = ()

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "systemIds": list(self.system_ids),
            "systemNames": list(self.system_names),
            "datasetId": self.dataset_id,
            "taskKind": self.task,
            "metricName": self.metric_name,
            "metricVariant": "micro",
            "overall": self.overall.to_dict(),
            "perAttribute": {
                name: [b.to_dict() for b in series]
                for name, series in self.per_attribute.items()
            },
            "bootstrap": dict(self.bootstrap),
            "generatedAt": self.generated_at,
            "engineVersion": ENGINE_VERSION,
        }
        if self.members:
            out["members"] = [dict(m) for m in self.members]
        return out


def _round_half_even(x: float) -> float:
    rounded = round(x, 5)
    return 0.0 if rounded == 0 else rounded  # normalize -0.0


def _canonicalize(obj: Any) -> Any:
    if isinstance(obj, float):
        return _round_half_even(obj)
    if isinstance(obj, dict):
        return {k: _canonicalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canonicalize(v) for v in obj]
    return obj


def canonical_json_bytes(obj: Mapping[str, Any] | Sequence[Any]) -> bytes:
    return json.dumps(
        _canonicalize(obj),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    ).encode("utf-8")
