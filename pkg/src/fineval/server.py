"""HTTP API over a registry root, plus static hosting for the web UI.

All analysis endpoints return canonical JSON bytes (sorted keys, 5-dp
reals), are cached on disk keyed by the full request config, and answer
repeat requests byte-identically.  Module errors surface as
``{"code": ..., "message": ...}`` with status 400 (404 for unknown ids).
"""

from __future__ import annotations

import os
import re
from pathlib import Path
from typing import Any

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analysis import (
    bias_analysis,
    bucket_error_cases,
    calibration_analysis,
    common_error_cases,
    pair_analysis,
    single_analysis,
    unique_error_cases,
)
from .combination import combine, combined_report
from .core import TaskKind, task_from_name
from .errors import DatasetMismatch, FinevalError, NeedTwoOrMoreSystems, NeedTwoSystems
from .registry import Registry
from .reliability import BootstrapConfig
from .report import canonical_json_bytes

_INTERVAL_KEY = re.compile(r"^\(.*[\])]$")


def _normalize_bucket(bucket: str) -> str:
    """Undo '+'-to-space query decoding inside interval keys, which never
    legitimately contain spaces (categorical keys may)."""
    if "|" not in bucket:
        return bucket
    attr, key = bucket.split("|", 1)
    if _INTERVAL_KEY.match(key):
        key = key.replace(" ", "+")
    return f"{attr}|{key}"


def _paginate(items: list[dict[str, Any]], page: int, page_size: int) -> dict[str, Any]:
    page = max(1, page)
    page_size = max(1, min(page_size, 500))
    start = (page - 1) * page_size
    return {
        "items": items[start : start + page_size],
        "page": page,
        "pageSize": page_size,
        "total": len(items),
    }


def _json(payload: Any, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json_bytes(payload),
        status_code=status_code,
        media_type="application/json",
    )


class CombineBody(BaseModel):
    systemIds: list[str]
    name: str | None = None
    attrs: str | None = None
    b: int = 1000
    seed: int = 0
    level: float = 0.95


def create_app(root: Path | str, ui_dir: Path | str | None = None) -> FastAPI:
    registry = Registry(root)
    app = FastAPI(title="fineval", version="0.1.0", docs_url="/api/docs")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get("FINEVAL_CORS_ORIGIN", "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(FinevalError)
    async def _fineval_error(_req: Request, err: FinevalError) -> JSONResponse:
        return JSONResponse(
            status_code=err.http_status,
            content={"code": err.code, "message": str(err)},
        )

    def _attrs(attrs: str | None) -> list[str] | None:
        if attrs is None or attrs == "":
            return None
        return [a.strip() for a in attrs.split(",") if a.strip()]

    def _config(b: int, seed: int, level: float) -> BootstrapConfig:
        return BootstrapConfig(replicates=b, confidence_level=level, seed=seed)

    def _cached(key_fields: dict[str, Any], build) -> Response:
        key = registry.cache_key(key_fields)
        cached = registry.cached_report(key)
        if cached is None:
            cached = canonical_json_bytes(build())
            registry.store_report(key, cached)
        return Response(content=cached, media_type="application/json")

    # -- listings ------------------------------------------------------------

    @app.get("/api/v1/tasks")
    def list_tasks() -> Response:
        return _json([t.value for t in TaskKind])

    @app.get("/api/v1/datasets")
    def list_datasets(task: str | None = None) -> Response:
        kind = task_from_name(task) if task else None
        return _json([m.to_dict() for m in registry.list_datasets(kind)])

    @app.get("/api/v1/systems")
    def list_systems(dataset: str | None = None) -> Response:
        return _json([m.to_dict() for m in registry.list_systems(dataset)])

    @app.post("/api/v1/systems")
    def submit_system(
        name: str = Form(...),
        datasetId: str = Form(...),
        submitter: str | None = Form(None),
        file: UploadFile = File(...),
    ) -> Response:
        data = file.file.read()
        meta, duplicate = registry.submit_system(name, datasetId, data, submitter)
        body = meta.to_dict()
        body["duplicate"] = duplicate
        return _json(body, status_code=200 if duplicate else 201)

    # -- analyses ------------------------------------------------------------

    @app.get("/api/v1/analysis/single/{system_id}")
    def analysis_single(
        system_id: str,
        attrs: str | None = None,
        b: int = 1000,
        seed: int = 0,
        level: float = 0.95,
    ) -> Response:
        def build():
            _meta, system, dataset = registry.load_system(system_id)
            report = single_analysis(
                system, dataset, _attrs(attrs), _config(b, seed, level)
            )
            return report.to_dict()

        registry.system_meta(system_id)  # 404 before touching the cache
        return _cached(
            {
                "kind": "single",
                "systemIds": [system_id],
                "attrs": _attrs(attrs),
                "b": b,
                "seed": seed,
                "level": level,
            },
            build,
        )

    @app.get("/api/v1/analysis/pair/{system_a}/{system_b}")
    def analysis_pair(system_a: str, system_b: str, attrs: str | None = None) -> Response:
        def build():
            meta_a, sys_a, dataset = registry.load_system(system_a)
            meta_b, sys_b, _ = registry.load_system(system_b)
            if meta_a.dataset_id != meta_b.dataset_id:
                raise DatasetMismatch(
                    f"systems evaluated on different datasets: "
                    f"{meta_a.dataset_id} vs {meta_b.dataset_id}"
                )
            return pair_analysis(sys_a, sys_b, dataset, _attrs(attrs)).to_dict()

        meta_a = registry.system_meta(system_a)
        meta_b = registry.system_meta(system_b)
        if meta_a.dataset_id != meta_b.dataset_id:
            raise DatasetMismatch(
                f"systems evaluated on different datasets: "
                f"{meta_a.dataset_id} vs {meta_b.dataset_id}"
            )
        return _cached(
            {
                "kind": "pair",
                "systemIds": [system_a, system_b],
                "attrs": _attrs(attrs),
            },
            build,
        )

    @app.get("/api/v1/analysis/bias")
    def analysis_bias(datasets: str, attrs: str | None = None) -> Response:
        ids = [d.strip() for d in datasets.split(",") if d.strip()]

        def build():
            loaded = [registry.load_dataset(i) for i in ids]
            return bias_analysis(loaded, _attrs(attrs)).to_dict()

        for dataset_id in ids:
            registry.dataset_meta(dataset_id)
        return _cached(
            {"kind": "bias", "datasetIds": ids, "attrs": _attrs(attrs)}, build
        )

    @app.post("/api/v1/analysis/combine")
    def analysis_combine(body: CombineBody) -> Response:
        if len(body.systemIds) < 2:
            raise NeedTwoOrMoreSystems("combination needs >= 2 systems")
        loaded = [registry.load_system(i) for i in body.systemIds]
        dataset_ids = {meta.dataset_id for meta, _, _ in loaded}
        if len(dataset_ids) != 1:
            raise DatasetMismatch(
                f"systems span multiple datasets: {sorted(dataset_ids)}"
            )
        dataset = loaded[0][2]
        systems = [system for _, system, _ in loaded]
        combined = combine(systems, dataset)
        meta, _duplicate = registry.submit_system(
            combined.system.name,
            dataset.dataset_id,
            combined.output_bytes,
            kind="combined",
            member_ids=combined.member_ids,
        )
        report = combined_report(
            systems,
            dataset,
            _attrs(body.attrs),
            _config(body.b, body.seed, body.level),
        )
        payload = report.to_dict()
        payload["combinedId"] = meta.id
        return _json(payload)

    # -- error drill-down ------------------------------------------------------

    @app.get("/api/v1/errors/common")
    def errors_common(systems: str, page: int = 1, pageSize: int = 50) -> Response:
        ids = [s.strip() for s in systems.split(",") if s.strip()]
        if len(ids) < 2:
            raise NeedTwoOrMoreSystems("common-error analysis needs >= 2 systems")
        loaded = [registry.load_system(i) for i in ids]
        dataset_ids = {meta.dataset_id for meta, _, _ in loaded}
        if len(dataset_ids) != 1:
            raise DatasetMismatch(
                f"systems span multiple datasets: {sorted(dataset_ids)}"
            )
        cases = common_error_cases([s for _, s, _ in loaded], loaded[0][2])
        return _json(_paginate([c.to_dict() for c in cases], page, pageSize))

    @app.get("/api/v1/errors/unique")
    def errors_unique(a: str, b: str, page: int = 1, pageSize: int = 50) -> Response:
        if not a or not b:
            raise NeedTwoSystems("unique-error analysis needs systems a and b")
        meta_a, sys_a, dataset = registry.load_system(a)
        meta_b, sys_b, _ = registry.load_system(b)
        if meta_a.dataset_id != meta_b.dataset_id:
            raise DatasetMismatch(
                f"systems evaluated on different datasets: "
                f"{meta_a.dataset_id} vs {meta_b.dataset_id}"
            )
        cases = unique_error_cases(sys_a, sys_b, dataset)
        return _json(_paginate([c.to_dict() for c in cases], page, pageSize))

    @app.get("/api/v1/errors/{system_id}")
    def errors_bucket(
        system_id: str, bucket: str, page: int = 1, pageSize: int = 50
    ) -> Response:
        _meta, system, dataset = registry.load_system(system_id)
        cases = bucket_error_cases(system, dataset, _normalize_bucket(bucket))
        return _json(_paginate([c.to_dict() for c in cases], page, pageSize))

    # -- calibration -----------------------------------------------------------

    @app.get("/api/v1/calibration/{system_id}")
    def calibration(system_id: str, bins: int = 10) -> Response:
        def build():
            _meta, system, dataset = registry.load_system(system_id)
            return calibration_analysis(system, dataset, bins)

        registry.system_meta(system_id)
        return _cached(
            {"kind": "calibration", "systemIds": [system_id], "bins": bins}, build
        )

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
