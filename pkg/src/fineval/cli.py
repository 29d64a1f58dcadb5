"""Command-line interface.

JSON goes to stdout only; human-readable diagnostics go to stderr.
Exit codes: 0 success, 1 validation/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import (
    bias_analysis,
    bucket_error_cases,
    calibration_analysis,
    common_error_cases,
    pair_analysis,
    single_analysis,
    unique_error_cases,
)
from .combination import combined_report
from .core import Dataset, SystemOutput, TaskKind, task_from_name
from .errors import FinevalError
from .ingest import (
    build_train_stats,
    canonical_bytes,
    content_id,
    parse_classification_tsv,
    parse_conll,
    parse_score_dataset_tsv,
    parse_score_tsv,
)
from .registry import Registry, _parse_system
from .reliability import BootstrapConfig
from .report import canonical_json_bytes


def _emit(payload, out: str | None) -> None:
    data = canonical_json_bytes(payload)
    if out:
        Path(out).write_bytes(data + b"\n")
    else:
        sys.stdout.buffer.write(data + b"\n")
        sys.stdout.buffer.flush()


def _cols(raw: str | None, n: int) -> tuple[int, ...] | None:
    if raw is None:
        return None
    cols = tuple(int(c) for c in raw.split(","))
    if len(cols) != n:
        raise FinevalError(f"--conll-cols needs {n} comma-separated indices")
    return cols


def _load_dataset(args) -> Dataset:
    task = task_from_name(args.task)
    data = canonical_bytes(Path(args.dataset).read_bytes())
    if task is TaskKind.TEXT_CLASSIFICATION:
        samples, _ = parse_classification_tsv(data, with_predictions=False)
    elif task is TaskKind.SEQUENCE_LABELING:
        cols = _cols(getattr(args, "dataset_cols", None), 2) or (0, 1)
        samples, _ = parse_conll(data, columns=cols)
    else:
        samples = parse_score_dataset_tsv(data)
    dataset_id = getattr(args, "dataset_id", None) or content_id(data)
    train_stats = None
    if getattr(args, "train", None):
        train_stats = build_train_stats(
            canonical_bytes(Path(args.train).read_bytes()), source=args.train
        )
    return Dataset(dataset_id, task, tuple(samples), train_stats)


def _load_system(path: str, dataset: Dataset, conll_cols: str | None = None) -> SystemOutput:
    data = canonical_bytes(Path(path).read_bytes())
    return _parse_system(
        dataset,
        content_id(data),
        Path(path).stem,
        data,
        conll_columns=_cols(conll_cols, 3),
    )


def _bootstrap_config(args) -> BootstrapConfig:
    return BootstrapConfig(
        replicates=args.bootstrap_b,
        confidence_level=args.confidence_level,
        seed=args.seed,
    )


def _add_bootstrap_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--bootstrap-b", type=int, default=1000,
                   help="bootstrap replicates (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed (default 0)")
    p.add_argument("--confidence-level", type=float, default=0.95,
                   help="confidence level (default 0.95)")


def _add_common_flags(p: argparse.ArgumentParser, train: bool = False) -> None:
    p.add_argument("--task", required=True, help="task kind (ner|cls|gen|...)")
    p.add_argument("--dataset", required=True, help="gold dataset file")
    p.add_argument("--dataset-id", help="dataset id to record in reports "
                                         "(default: content hash)")
    p.add_argument("--attrs", help="comma-separated attribute names")
    p.add_argument("--conll-cols", help="system-file column indices token,gold,pred")
    p.add_argument("--dataset-cols", help="dataset-file column indices token,gold")
    p.add_argument("--out", help="write JSON here instead of stdout")
    if train:
        p.add_argument("--train", help="gold training file (enables eFreq)")


def _attr_list(args) -> list[str] | None:
    if not args.attrs:
        return None
    return [a.strip() for a in args.attrs.split(",") if a.strip()]


# -- commands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    task = task_from_name(args.task)
    data = canonical_bytes(Path(args.file).read_bytes())
    if task is TaskKind.TEXT_CLASSIFICATION:
        samples, preds = parse_classification_tsv(
            data, with_predictions=not args.gold_only
        )
    elif task is TaskKind.SEQUENCE_LABELING:
        cols = _cols(args.conll_cols, 2 if args.gold_only else 3)
        samples, preds = parse_conll(
            data, columns=cols or ((0, 1) if args.gold_only else (0, 1, 2))
        )
    else:
        if args.gold_only:
            samples, preds = parse_score_dataset_tsv(data), ()
        else:
            samples, preds = parse_score_tsv(data)
    _emit(
        {
            "ok": True,
            "taskKind": task.value,
            "samples": len(samples),
            "predictions": len(preds),
            "sha256": content_id(data),
        },
        args.out,
    )
    return 0


def cmd_single(args) -> int:
    dataset = _load_dataset(args)
    system = _load_system(args.system, dataset, args.conll_cols)
    report = single_analysis(
        system, dataset, _attr_list(args), _bootstrap_config(args),
        strict_attrs=args.strict_attrs,
    )
    _emit(report.to_dict(), args.out)
    return 0


def cmd_pair(args) -> int:
    dataset = _load_dataset(args)
    system_a = _load_system(args.system_a, dataset, args.conll_cols)
    system_b = _load_system(args.system_b, dataset, args.conll_cols)
    report = pair_analysis(system_a, system_b, dataset, _attr_list(args))
    _emit(report.to_dict(), args.out)
    return 0


def cmd_combine(args) -> int:
    dataset = _load_dataset(args)
    systems = [_load_system(p, dataset, args.conll_cols) for p in args.systems]
    report = combined_report(systems, dataset, _attr_list(args), _bootstrap_config(args))
    _emit(report.to_dict(), args.out)
    return 0


def cmd_bias(args) -> int:
    task = task_from_name(args.task)
    ids = args.dataset_ids.split(",") if args.dataset_ids else None
    if ids and len(ids) != len(args.datasets):
        raise FinevalError("--dataset-ids must match the number of datasets")
    datasets = []
    for i, path in enumerate(args.datasets):
        ns = argparse.Namespace(
            task=args.task, dataset=path,
            dataset_id=ids[i] if ids else Path(path).stem,
            dataset_cols=args.dataset_cols, train=None,
        )
        datasets.append(_load_dataset(ns))
    profile = bias_analysis(datasets, _attr_list(args))
    _emit(profile.to_dict(), args.out)
    return 0


def cmd_calibrate(args) -> int:
    dataset = _load_dataset(args)
    system = _load_system(args.system, dataset)
    _emit(calibration_analysis(system, dataset, args.bins), args.out)
    return 0


def cmd_errors(args) -> int:
    dataset = _load_dataset(args)
    if args.bucket:
        if not args.system:
            raise FinevalError("--bucket mode needs --system")
        system = _load_system(args.system, dataset, args.conll_cols)
        cases = bucket_error_cases(system, dataset, args.bucket)
    elif args.common:
        systems = [_load_system(p, dataset, args.conll_cols) for p in args.systems or []]
        cases = common_error_cases(systems, dataset)
    elif args.unique:
        if not (args.system_a and args.system_b):
            raise FinevalError("--unique mode needs --system-a and --system-b")
        system_a = _load_system(args.system_a, dataset, args.conll_cols)
        system_b = _load_system(args.system_b, dataset, args.conll_cols)
        cases = unique_error_cases(system_a, system_b, dataset)
    else:
        raise FinevalError("choose one of --bucket KEY, --common, --unique")
    _emit({"items": [c.to_dict() for c in cases], "total": len(cases)}, args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.root, args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_registry(args) -> int:
    registry = Registry(args.root)
    if args.registry_cmd == "add-dataset":
        train = Path(args.train).read_bytes() if args.train else None
        meta = registry.add_dataset(
            args.id,
            task_from_name(args.task),
            Path(args.file).read_bytes(),
            train=train,
            columns=_cols(args.conll_cols, 2),
        )
        _emit(meta.to_dict(), args.out)
    elif args.registry_cmd == "add-system":
        meta, duplicate = registry.submit_system(
            args.name,
            args.dataset,
            Path(args.file).read_bytes(),
            submitter=args.submitter,
        )
        body = meta.to_dict()
        body["duplicate"] = duplicate
        _emit(body, args.out)
    else:  # list
        if args.datasets:
            _emit([m.to_dict() for m in registry.list_datasets()], args.out)
        else:
            _emit([m.to_dict() for m in registry.list_systems(args.dataset)], args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fineval",
        description="Fine-grained, statistically qualified evaluation of "
                    "NLP system outputs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse-check an output or dataset file")
    p.add_argument("task")
    p.add_argument("file")
    p.add_argument("--gold-only", action="store_true",
                   help="file carries gold annotations only")
    p.add_argument("--conll-cols")
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("single", help="single-system bucketed report")
    _add_common_flags(p, train=True)
    p.add_argument("--system", required=True, help="system output file")
    p.add_argument("--strict-attrs", action="store_true",
                   help="fail when eFreq is requested without --train")
    _add_bootstrap_flags(p)
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("pair", help="pairwise gap report (A minus B)")
    _add_common_flags(p, train=True)
    p.add_argument("--system-a", required=True)
    p.add_argument("--system-b", required=True)
    p.set_defaults(func=cmd_pair)

    p = sub.add_parser("combine", help="majority-vote combination report")
    _add_common_flags(p, train=True)
    p.add_argument("--systems", nargs="+", required=True, help=">=2 output files")
    _add_bootstrap_flags(p)
    p.set_defaults(func=cmd_combine)

    p = sub.add_parser("bias", help="dataset bias profile over gold data")
    p.add_argument("--task", required=True)
    p.add_argument("--datasets", nargs="+", required=True, help="gold dataset files")
    p.add_argument("--dataset-ids", help="comma-separated ids (default: file stems)")
    p.add_argument("--attrs")
    p.add_argument("--dataset-cols")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bias)

    p = sub.add_parser("calibrate", help="confidence calibration report")
    _add_common_flags(p)
    p.add_argument("--system", required=True)
    p.add_argument("--bins", type=int, default=10)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("errors", help="error-case tables (bucket/common/unique)")
    _add_common_flags(p, train=True)
    p.add_argument("--system", help="system file (bucket mode)")
    p.add_argument("--systems", nargs="+", help="system files (common mode)")
    p.add_argument("--system-a")
    p.add_argument("--system-b")
    p.add_argument("--bucket", help="bucket address, e.g. 'eLen|(3,+inf)'")
    p.add_argument("--common", action="store_true")
    p.add_argument("--unique", action="store_true")
    p.set_defaults(func=cmd_errors)

    p = sub.add_parser("serve", help="run the HTTP API over a registry root")
    p.add_argument("--root", default=os.environ.get("FINEVAL_ROOT", "fineval-root"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--ui-dir", help="directory of built web UI assets")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("registry", help="manage a registry root")
    rsub = p.add_subparsers(dest="registry_cmd", required=True)
    pr = rsub.add_parser("add-dataset")
    pr.add_argument("--root", default=os.environ.get("FINEVAL_ROOT", "fineval-root"))
    pr.add_argument("--id", required=True)
    pr.add_argument("--task", required=True)
    pr.add_argument("--file", required=True)
    pr.add_argument("--train")
    pr.add_argument("--conll-cols")
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_registry)
    pr = rsub.add_parser("add-system")
    pr.add_argument("--root", default=os.environ.get("FINEVAL_ROOT", "fineval-root"))
    pr.add_argument("--dataset", required=True)
    pr.add_argument("--name", required=True)
    pr.add_argument("--file", required=True)
    pr.add_argument("--submitter")
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_registry)
    pr = rsub.add_parser("list")
    pr.add_argument("--root", default=os.environ.get("FINEVAL_ROOT", "fineval-root"))
    pr.add_argument("--dataset")
    pr.add_argument("--datasets", action="store_true", help="list datasets instead")
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_registry)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FinevalError as err:
        print(f"error [{err.code}]: {err}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as err:
        print(f"error [IO]: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
