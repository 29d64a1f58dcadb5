"""Registry and HTTP API tour, in-process.

Registers a dataset, submits two systems, and walks the same endpoints
the web UI consumes: leaderboard, single analysis, bucket drill-down,
combination.  Uses the test client so no port is opened; `fineval serve`
exposes the identical app over HTTP.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from fineval.server import create_app

GOLD = """John B-PER
visited O
New B-LOC
York I-LOC

Ada B-PER
wrote O
code O
"""

SYS_GOOD = """John B-PER B-PER
visited O O
New B-LOC B-LOC
York I-LOC I-LOC

Ada B-PER B-PER
wrote O O
code O O
"""

SYS_WEAK = """John B-PER B-PER
visited O O
New B-LOC O
York I-LOC O

Ada B-PER O
wrote O O
code O O
"""


def show(title, payload):
    print(f"--- {title}")
    print(json.dumps(payload, indent=2)[:600])
    print()


with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp) / "registry"
    client = TestClient(create_app(root))

    from fineval.core import TaskKind
    from fineval.registry import Registry

    Registry(root).add_dataset("demo-ner", TaskKind.SEQUENCE_LABELING, GOLD.encode())

    ids = {}
    for name, data in (("good", SYS_GOOD), ("weak", SYS_WEAK)):
        response = client.post(
            "/api/v1/systems",
            data={"name": name, "datasetId": "demo-ner"},
            files={"file": (f"{name}.conll", data.encode())},
        )
        ids[name] = response.json()["id"]
        print(f"submitted {name}: {ids[name][:12]}... "
              f"overall={response.json()['overallValue']}")

    print()
    show("leaderboard", client.get("/api/v1/systems?dataset=demo-ner").json())
    show(
        "single analysis (eLen buckets)",
        client.get(
            f"/api/v1/analysis/single/{ids['weak']}",
            params={"attrs": "eLen", "b": 200},
        ).json()["perAttribute"],
    )
    show(
        "drill-down: weak system's errors in bucket eLab|PER",
        client.get(
            f"/api/v1/errors/{ids['weak']}", params={"bucket": "eLab|PER"}
        ).json(),
    )
    combined = client.post(
        "/api/v1/analysis/combine",
        json={"systemIds": [ids["good"], ids["weak"]], "b": 100},
    ).json()
    show("combined report members", combined["members"])
    print("combined system persisted as", combined["combinedId"][:12], "...")
