"""Generate viewer test fixtures from the real service endpoints.

Builds a small two-element scene (a two-layer wall and a door block), runs
the HTTP app in-process, and records /model, a slider sweep of /section
responses, and poche /pick responses into tests/fixtures/.
"""

import json
import pathlib

import numpy as np
from fastapi.testclient import TestClient

from sectionlab.core import (BuildingModel, Element, HatchPattern, LayerSpec,
                             TriMesh)
from sectionlab.metastore import MetadataRecord, MetaStore
from sectionlab.service import create_app

HERE = pathlib.Path(__file__).resolve().parent
OUT = HERE.parent / "tests" / "fixtures"

CUBE_V = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0],
                   [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]], dtype=float)
CUBE_T = np.array([[0, 2, 1], [0, 3, 2], [4, 5, 6], [4, 6, 7],
                   [0, 1, 5], [0, 5, 4], [2, 3, 7], [2, 7, 6],
                   [1, 2, 6], [1, 6, 5], [3, 0, 4], [3, 4, 7]])


def box_mesh(origin, size):
    v = CUBE_V * np.asarray(size, dtype=float) + np.asarray(origin, dtype=float)
    return TriMesh(v, CUBE_T, watertight=True)


def build_model():
    wall = Element("wall-7", "Walls", "Basic Wall", (
        (LayerSpec(0, "plaster", HatchPattern.DIAGONAL45, 0.4),
         box_mesh((0, 0, 0), (2.0, 0.4, 2.0))),
        (LayerSpec(1, "insulation", HatchPattern.CROSSHATCH, 0.3),
         box_mesh((0, 0.4, 0), (2.0, 0.3, 2.0))),
    ))
    door = Element("door-1", "Doors", "Single Door", (
        (LayerSpec(0, "wood", HatchPattern.NONE, 0.1),
         box_mesh((2.5, 0, 0), (0.9, 0.1, 2.0))),
    ))
    return BuildingModel((wall, door))


def build_store():
    store = MetaStore.empty()
    store = store.put(MetadataRecord("wall-7", "Walls", "Basic Wall", (
        ("FireRating", "2hr"), ("Thickness", "0.7"))))
    store = store.put(MetadataRecord("door-1", "Doors", "Single Door", (
        ("Width", "0.9"),)))
    return store


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    app = create_app(build_model(), build_store())
    client = TestClient(app)

    (OUT / "model.json").write_bytes(client.get("/api/v1/model").content)

    # slider sweep: X-Pos marching across the model (kept should shrink)
    offsets = [0.0, 0.4, 0.8, 1.2, 1.6, 2.0]
    sweep = []
    for offset in offsets:
        r = client.post("/api/v1/section", json={
            "planes": [{"axis": "x", "sign": "pos", "offset": offset,
                        "active": True}],
            "mode": "section"})
        assert r.status_code == 200
        sweep.append({"offset": offset, "response": r.json()})
    (OUT / "section_sweep_x_pos.json").write_text(
        json.dumps(sweep, sort_keys=True, separators=(",", ":")) + "\n")

    # poche pick: section at y=0.55 cuts both wall layers; ray flies down -y
    r = client.post("/api/v1/section", json={
        "planes": [{"axis": "x", "sign": "pos", "offset": 0.0, "active": False},
                   {"axis": "y", "sign": "neg", "offset": 0.55, "active": True}],
        "mode": "section"})
    assert r.status_code == 200
    (OUT / "section_y_neg.json").write_bytes(r.content)

    pick = client.post("/api/v1/pick", json={
        "origin": [0.7, 3.0, 0.9], "direction": [0.0, -1.0, 0.0],
        "active_plane": "y-neg"})
    assert pick.status_code == 200
    doc = pick.json()
    assert doc["is_poche"] and doc["hit"]["element"] == "wall-7" \
        and doc["hit"]["layer"] == 1, doc["hit"]
    (OUT / "pick_poche.json").write_bytes(pick.content)

    miss = client.post("/api/v1/pick", json={
        "origin": [0, 0, 9], "direction": [0.0, 0.0, 1.0]})
    (OUT / "pick_miss.json").write_bytes(miss.content)

    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
