"""Content-addressed registry of datasets, system outputs, and cached
reports on the local filesystem.

Layout under a root directory:

    datasets/<id>/data            raw (newline-normalized) bytes
    datasets/<id>/train           optional training file for eFreq
    datasets/<id>/meta.json
    systems/<id>/output           canonicalized output bytes; <id> is its sha256
    systems/<id>/meta.json
    reports/<key>.json            response cache, key = config hash

System ids are the hex digest of the canonicalized output bytes, so
resubmitting identical bytes is a no-op and ids double as tamper
evidence.  Writes go through a single-writer file lock and an atomic
rename; readers never see partial state.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from filelock import FileLock

from . import ingest
from .core import Dataset, SystemOutput, TaskKind
from .errors import (
    FinevalError,
    SampleCountMismatch,
    UnknownDataset,
    UnknownSystem,
    ValidationFailed,
)
from .ingest import canonical_bytes, content_id
from .metrics import metric_for_task, metric_value, sample_components
from .report import ENGINE_VERSION, canonical_json_bytes

_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class DatasetMeta:
    id: str
    task_kind: str
    sample_count: int
    sha256: str
    has_train_stats: bool
    created_at: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "taskKind": self.task_kind,
            "sampleCount": self.sample_count,
            "sha256": self.sha256,
            "hasTrainStats": self.has_train_stats,
            "createdAt": self.created_at,
        }


@dataclass(frozen=True)
class SystemMeta:
    id: str
    name: str
    task_kind: str
    dataset_id: str
    overall_value: float | None
    metric_name: str
    kind: str  # "submitted" | "combined"
    created_at: str
    submitter: str | None = None
    member_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        out = {
            "id": self.id,
            "name": self.name,
            "taskKind": self.task_kind,
            "datasetId": self.dataset_id,
            "overallValue": self.overall_value,
            "metricName": self.metric_name,
            "kind": self.kind,
            "createdAt": self.created_at,
            "submitter": self.submitter,
        }
        if self.member_ids:
            out["memberIds"] = list(self.member_ids)
        return out


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


class Registry:
    """Filesystem-backed store; safe for one writer and many readers."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        for sub in ("datasets", "systems", "reports"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._lock = FileLock(str(self.root / ".lock"))
        self._dataset_cache: dict[str, Dataset] = {}

    # -- datasets -----------------------------------------------------------

    def add_dataset(
        self,
        dataset_id: str,
        task: TaskKind,
        data: bytes,
        train: bytes | None = None,
        columns: tuple[int, ...] | None = None,
    ) -> DatasetMeta:
        if not _ID_RE.match(dataset_id):
            raise ValidationFailed(
                f"dataset id {dataset_id!r} must match {_ID_RE.pattern}"
            )
        samples = _parse_dataset(task, canonical_bytes(data), columns)
        # persist the canonical serialization so column layout is add-time only
        data = _format_dataset(task, samples)
        if train is not None:
            train = canonical_bytes(train)
            if task is not TaskKind.SEQUENCE_LABELING:
                raise ValidationFailed("training statistics apply to sequence labeling only")
            ingest.build_train_stats(train)  # validate now, fail early
        meta = DatasetMeta(
            id=dataset_id,
            task_kind=task.value,
            sample_count=len(samples),
            sha256=hashlib.sha256(data).hexdigest(),
            has_train_stats=train is not None,
            created_at=_now(),
        )
        with self._lock:
            d = self.root / "datasets" / dataset_id
            if d.exists():
                raise ValidationFailed(f"dataset {dataset_id!r} already registered")
            d.mkdir(parents=True)
            _write_atomic(d / "data", data)
            if train is not None:
                _write_atomic(d / "train", train)
            _write_atomic(d / "meta.json", canonical_json_bytes(meta.to_dict()))
        return meta

    def dataset_meta(self, dataset_id: str) -> DatasetMeta:
        path = self.root / "datasets" / dataset_id / "meta.json"
        if not path.exists():
            raise UnknownDataset(f"no dataset {dataset_id!r}")
        raw = json.loads(path.read_text("utf-8"))
        return DatasetMeta(
            id=raw["id"],
            task_kind=raw["taskKind"],
            sample_count=raw["sampleCount"],
            sha256=raw["sha256"],
            has_train_stats=raw["hasTrainStats"],
            created_at=raw["createdAt"],
        )

    def load_dataset(self, dataset_id: str) -> Dataset:
        if dataset_id in self._dataset_cache:
            return self._dataset_cache[dataset_id]
        meta = self.dataset_meta(dataset_id)
        d = self.root / "datasets" / dataset_id
        task = TaskKind(meta.task_kind)
        samples = _parse_dataset(task, (d / "data").read_bytes(), None)
        train_stats = None
        train_path = d / "train"
        if train_path.exists():
            train_stats = ingest.build_train_stats(
                train_path.read_bytes(), source=str(train_path)
            )
        dataset = Dataset(dataset_id, task, samples, train_stats)
        self._dataset_cache[dataset_id] = dataset
        return dataset

    def list_datasets(self, task: TaskKind | None = None) -> list[DatasetMeta]:
        metas = []
        for d in sorted((self.root / "datasets").iterdir()):
            if not (d / "meta.json").exists():
                continue
            meta = self.dataset_meta(d.name)
            if task is None or meta.task_kind == task.value:
                metas.append(meta)
        return metas

    # -- systems ------------------------------------------------------------

    def submit_system(
        self,
        name: str,
        dataset_id: str,
        data: bytes,
        submitter: str | None = None,
        kind: str = "submitted",
        member_ids: Sequence[str] = (),
    ) -> tuple[SystemMeta, bool]:
        """Validate, persist, and cache the overall metric; identical
        bytes return the existing record with ``duplicate=True``."""
        dataset = self.load_dataset(dataset_id)
        data = canonical_bytes(data)
        system_id = content_id(data)
        existing = self.root / "systems" / system_id / "meta.json"
        if existing.exists():
            return self.system_meta(system_id), True
        try:
            system = _parse_system(dataset, system_id, name, data)
        except FinevalError as err:
            if isinstance(err, SampleCountMismatch):
                raise
            raise ValidationFailed(str(err)) from err
        overall = metric_value(
            metric_for_task(dataset.task),
            sample_components(system, dataset).sum(axis=0),
        )
        meta = SystemMeta(
            id=system_id,
            name=name,
            task_kind=dataset.task.value,
            dataset_id=dataset_id,
            overall_value=float(overall),
            metric_name=metric_for_task(dataset.task),
            kind=kind,
            created_at=_now(),
            submitter=submitter,
            member_ids=tuple(member_ids),
        )
        with self._lock:
            d = self.root / "systems" / system_id
            d.mkdir(parents=True, exist_ok=True)
            _write_atomic(d / "output", data)
            _write_atomic(d / "meta.json", canonical_json_bytes(meta.to_dict()))
        return meta, False

    def system_meta(self, system_id: str) -> SystemMeta:
        path = self.root / "systems" / system_id / "meta.json"
        if not path.exists():
            raise UnknownSystem(f"no system {system_id!r}")
        raw = json.loads(path.read_text("utf-8"))
        return SystemMeta(
            id=raw["id"],
            name=raw["name"],
            task_kind=raw["taskKind"],
            dataset_id=raw["datasetId"],
            overall_value=raw["overallValue"],
            metric_name=raw["metricName"],
            kind=raw["kind"],
            created_at=raw["createdAt"],
            submitter=raw.get("submitter"),
            member_ids=tuple(raw.get("memberIds", ())),
        )

    def load_system(self, system_id: str) -> tuple[SystemMeta, SystemOutput, Dataset]:
        meta = self.system_meta(system_id)
        dataset = self.load_dataset(meta.dataset_id)
        data = (self.root / "systems" / system_id / "output").read_bytes()
        system = _parse_system(dataset, system_id, meta.name, data)
        return meta, system, dataset

    def list_systems(self, dataset_id: str | None = None) -> list[SystemMeta]:
        """Leaderboard order: overall value descending, ties by id."""
        metas = []
        for d in sorted((self.root / "systems").iterdir()):
            if not (d / "meta.json").exists():
                continue
            meta = self.system_meta(d.name)
            if dataset_id is None or meta.dataset_id == dataset_id:
                metas.append(meta)
        return sorted(
            metas,
            key=lambda m: (
                -(m.overall_value if m.overall_value is not None else float("-inf")),
                m.id,
            ),
        )

    # -- report cache ---------------------------------------------------------

    def cache_key(self, request: dict[str, Any]) -> str:
        keyed = dict(request)
        keyed["engineVersion"] = ENGINE_VERSION
        return hashlib.sha256(canonical_json_bytes(keyed)).hexdigest()

    def cached_report(self, key: str) -> bytes | None:
        path = self.root / "reports" / f"{key}.json"
        if not path.exists():
            return None
        data = path.read_bytes()
        try:
            body = json.loads(data)
        except ValueError:
            return None
        # key embeds the engine version, but guard against stale files anyway
        if body.get("engineVersion") != ENGINE_VERSION:
            return None
        return data

    def store_report(self, key: str, data: bytes) -> None:
        with self._lock:
            _write_atomic(self.root / "reports" / f"{key}.json", data)


def _parse_dataset(
    task: TaskKind, data: bytes, columns: tuple[int, ...] | None
):
    if task is TaskKind.TEXT_CLASSIFICATION:
        samples, _ = ingest.parse_classification_tsv(data, with_predictions=False)
        return samples
    if task is TaskKind.SEQUENCE_LABELING:
        samples, _ = ingest.parse_conll(data, columns=columns or (0, 1))
        return samples
    return ingest.parse_score_dataset_tsv(data)


def _format_dataset(task: TaskKind, samples) -> bytes:
    if task is TaskKind.TEXT_CLASSIFICATION:
        return ingest.format_classification_tsv(samples)
    if task is TaskKind.SEQUENCE_LABELING:
        return ingest.format_conll(samples)
    return ingest.format_score_dataset_tsv(samples)


def _parse_system(
    dataset: Dataset,
    system_id: str,
    name: str,
    data: bytes,
    conll_columns: tuple[int, int, int] | None = None,
) -> SystemOutput:
    """Parse an output file against its dataset; dataset gold is the
    authority, the file's own gold columns only need to align in shape."""
    task = dataset.task
    if task is TaskKind.TEXT_CLASSIFICATION:
        samples, preds = ingest.parse_classification_tsv(data)
        _check_counts(len(samples), len(dataset.samples))
    elif task is TaskKind.SEQUENCE_LABELING:
        samples, preds = ingest.parse_conll(data, columns=conll_columns or (0, 1, 2))
        _check_counts(len(samples), len(dataset.samples))
        for file_sample, gold_sample in zip(samples, dataset.samples):
            if len(file_sample.tokens) != len(gold_sample.tokens):
                raise ValidationFailed(
                    f"sentence {gold_sample.id}: output has "
                    f"{len(file_sample.tokens)} tokens, dataset has "
                    f"{len(gold_sample.tokens)}"
                )
    else:
        samples, preds = ingest.parse_score_tsv(data)
        _check_counts(len(samples), len(dataset.samples))
        preds = ingest.align_generation_predictions(dataset.samples, samples, preds)
    return SystemOutput(system_id, name, task, tuple(preds))


def _check_counts(got: int, expected: int) -> None:
    if got != expected:
        raise SampleCountMismatch(
            f"output has {got} samples, dataset has {expected}"
        )
