"""CLI: exit codes, JSON-on-stdout contract, cross-command consistency."""

import json
import subprocess
import sys

import pytest

from conftest import write_scenario_files

CLI = [sys.executable, "-m", "fineval"]


def run_cli(*args, env=None):
    return subprocess.run(
        CLI + list(args), capture_output=True, timeout=180, env=env
    )


@pytest.fixture(scope="module")
def scenario(tmp_path_factory):
    return write_scenario_files(tmp_path_factory.mktemp("scen"))


def test_validate_ok(scenario):
    result = run_cli("validate", "ner", str(scenario["paths"]["sysA"]))
    assert result.returncode == 0
    body = json.loads(result.stdout)
    assert body["ok"] and body["samples"] == len(scenario["dataset"].samples)


def test_validate_malformed_exits_one(tmp_path):
    bad = tmp_path / "malformed.conll"
    bad.write_bytes(b"John B-PER\n")  # missing prediction column
    result = run_cli("validate", "ner", str(bad))
    assert result.returncode == 1
    assert result.stdout == b""
    assert b"ColumnOutOfRange" in result.stderr
    assert b"line 1" in result.stderr


def test_usage_error_exits_two():
    result = run_cli("single", "--task", "ner")
    assert result.returncode == 2


def test_single_report_structure(scenario):
    result = run_cli(
        "single",
        "--task", "ner",
        "--dataset", str(scenario["paths"]["dataset"]),
        "--system", str(scenario["paths"]["sysA"]),
        "--attrs", "eLen,sLen,eLab",
        "--bootstrap-b", "40",
        "--seed", "3",
    )
    assert result.returncode == 0, result.stderr
    body = json.loads(result.stdout)
    assert set(body["perAttribute"]) == {"eLen", "sLen", "eLab"}
    assert body["bootstrap"]["replicates"] == 40
    assert body["systemNames"] == ["sysA"]


def test_pair_output_matches_single_subtraction(scenario):
    args = [
        "--task", "ner",
        "--dataset", str(scenario["paths"]["dataset"]),
        "--attrs", "eLen,eLab",
    ]
    pair = run_cli(
        "pair", *args,
        "--system-a", str(scenario["paths"]["sysA"]),
        "--system-b", str(scenario["paths"]["sysB"]),
    )
    assert pair.returncode == 0, pair.stderr
    pair_body = json.loads(pair.stdout)

    singles = {}
    for name in ("sysA", "sysB"):
        result = run_cli(
            "single", *args,
            "--system", str(scenario["paths"][name]),
            "--bootstrap-b", "10",
        )
        singles[name] = json.loads(result.stdout)

    for attr, series in pair_body["perAttribute"].items():
        value_a = {b["key"]: b["value"] for b in singles["sysA"]["perAttribute"][attr]}
        value_b = {b["key"]: b["value"] for b in singles["sysB"]["perAttribute"][attr]}
        for bucket in series:
            va, vb = value_a.get(bucket["key"]), value_b.get(bucket["key"])
            if va is None or vb is None:
                assert bucket["gap"] is None
            else:
                assert bucket["gap"] == pytest.approx(va - vb, abs=1e-5)


def test_combine_command(scenario):
    result = run_cli(
        "combine",
        "--task", "ner",
        "--dataset", str(scenario["paths"]["dataset"]),
        "--systems",
        str(scenario["paths"]["sysA"]),
        str(scenario["paths"]["sysB"]),
        str(scenario["paths"]["sysC"]),
        "--bootstrap-b", "20",
    )
    assert result.returncode == 0, result.stderr
    body = json.loads(result.stdout)
    assert len(body["members"]) == 3
    assert body["overall"]["value"] >= max(m["value"] for m in body["members"])


def test_bias_command(scenario, tmp_path):
    result = run_cli(
        "bias",
        "--task", "ner",
        "--datasets", str(scenario["paths"]["dataset"]),
        "--attrs", "eLen",
    )
    assert result.returncode == 0, result.stderr
    body = json.loads(result.stdout)
    assert "gold" in body["datasetIds"]


def test_errors_common_command(scenario):
    result = run_cli(
        "errors",
        "--task", "ner",
        "--dataset", str(scenario["paths"]["dataset"]),
        "--common",
        "--systems",
        str(scenario["paths"]["sysA"]),
        str(scenario["paths"]["sysB"]),
        str(scenario["paths"]["sysC"]),
    )
    assert result.returncode == 0, result.stderr
    body = json.loads(result.stdout)
    assert [c["sampleId"] for c in body["items"]] == [scenario["hard_sentence"]]


def test_errors_bucket_command(scenario):
    result = run_cli(
        "errors",
        "--task", "ner",
        "--dataset", str(scenario["paths"]["dataset"]),
        "--system", str(scenario["paths"]["sysA"]),
        "--bucket", "eLen|(3,+inf)",
    )
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["total"] == 12


def test_calibrate_command(tmp_path):
    data = "\n".join(
        f"text {i}\tpos\t{'pos' if i % 2 else 'neg'}\t0.8" for i in range(10)
    )
    path = tmp_path / "cls.tsv"
    path.write_text(data + "\n")
    gold = tmp_path / "gold.tsv"
    gold.write_text("\n".join(f"text {i}\tpos" for i in range(10)) + "\n")
    result = run_cli(
        "calibrate",
        "--task", "cls",
        "--dataset", str(gold),
        "--system", str(path),
    )
    assert result.returncode == 0, result.stderr
    body = json.loads(result.stdout)
    assert body["ece"] == pytest.approx(0.3, abs=1e-9)


def test_registry_workflow_and_persistence(scenario, tmp_path):
    root = tmp_path / "root"
    add = run_cli(
        "registry", "add-dataset",
        "--root", str(root),
        "--id", "conll-syn",
        "--task", "ner",
        "--file", str(scenario["paths"]["dataset"]),
    )
    assert add.returncode == 0, add.stderr
    for name in ("sysA", "sysB"):
        added = run_cli(
            "registry", "add-system",
            "--root", str(root),
            "--dataset", "conll-syn",
            "--name", name,
            "--file", str(scenario["paths"][name]),
        )
        assert added.returncode == 0, added.stderr
    listing = run_cli("registry", "list", "--root", str(root), "--dataset", "conll-syn")
    rows = json.loads(listing.stdout)
    assert [r["name"] for r in rows] == ["sysA", "sysB"]
    # a second process sees identical state (restart persistence)
    listing2 = run_cli("registry", "list", "--root", str(root), "--dataset", "conll-syn")
    assert listing2.stdout == listing.stdout
