"""Thin HTTP JSON API over the library: model summary, sectioning, picking,
metadata retrieval.

No logic lives here. Every handler calls the corresponding library function
and serializes its result with the shared serializers below, so an HTTP
response is byte-equivalent to serializing the in-process result. A single
session (one model, one section box) is served; box updates swap an
immutable snapshot under a lock so concurrent picks see either the old or
the new box, never a mixture.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import picking as picking_mod
from . import sectioning
from .core import Axis, BuildingModel, Ray, SectionBox, Sign, aabb, parse_plane_token
from .errors import SectionLabError
from .hatch import generate_poche
from .metastore import MetaStore
from .sectioning import RenderLayer, SectionMode

API_PREFIX = "/api/v1"
DEFAULT_PORT = 7077


@dataclass
class SessionState:
    model: BuildingModel
    store: MetaStore
    box: SectionBox
    mode: SectionMode = SectionMode.SECTION
    highlight: tuple | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)


def _dumps(payload) -> bytes:
    return (json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n").encode()


def _json_response(payload, status: int = 200) -> Response:
    return Response(content=_dumps(payload), status_code=status,
                    media_type="application/json")


def _round_floats(values) -> list:
    return [float(v) for v in np.asarray(values, dtype=float).ravel()]


# ---------------------------------------------------------------------------
# serializers (shared by handlers and parity tests)
# ---------------------------------------------------------------------------

def serialize_model_summary(model: BuildingModel, store: MetaStore) -> dict:
    box = aabb(model)
    elements = []
    for element in sorted(model.elements, key=lambda e: e.element_id):
        layers = []
        for spec, mesh in element.meshes:
            layers.append({
                "index": spec.layer_index,
                "material": spec.material_name,
                "hatch": spec.hatch_pattern.value,
                "thickness_m": spec.thickness_m,
                "triangle_count": int(len(mesh.triangles)),
            })
        elements.append({
            "id": element.element_id,
            "category": element.category,
            "family": element.family,
            "layers": layers,
            "has_metadata": store.get(element.element_id) is not None,
        })
    return {
        "aabb": {"min": _round_floats(box.lo), "max": _round_floats(box.hi)},
        "elements": elements,
        "units": "m",
    }


def serialize_box(box: SectionBox) -> dict:
    return {
        "planes": [
            {"axis": p.axis.name.lower(), "sign": p.sign.value,
             "offset": float(p.offset), "active": bool(p.active)}
            for p in box.planes
        ]
    }


def _serialize_batch(batch) -> dict:
    return {
        "element": batch.element_id,
        "layer": batch.layer_index,
        "positions": _round_floats(batch.vertices),
        "indices": [int(i) for i in np.asarray(batch.triangles, dtype=np.int64).ravel()],
    }


def serialize_layer_set(layers: sectioning.RenderLayerSet,
                        result: sectioning.SectionResult) -> dict:
    out = {}
    for layer in RenderLayer:
        batches = sorted(layers[layer], key=lambda b: (b.element_id, b.layer_index))
        out[layer.value] = [_serialize_batch(b) for b in batches]
    caps = []
    for cap in sorted(result.caps, key=lambda c: (c.element_id, c.layer_index,
                                                  c.plane.token)):
        ui, vi = sectioning.FRAME_UV[(cap.plane.axis, cap.plane.sign)]
        hatch3d = []
        for (a, b) in cap.hatch:
            pa = [0.0, 0.0, 0.0]
            pb = [0.0, 0.0, 0.0]
            pa[cap.plane.axis.value] = pb[cap.plane.axis.value] = float(cap.plane.offset)
            pa[ui], pa[vi] = float(a[0]), float(a[1])
            pb[ui], pb[vi] = float(b[0]), float(b[1])
            hatch3d.append([pa, pb])
        caps.append({
            "element": cap.element_id,
            "layer": cap.layer_index,
            "plane": cap.plane.token,
            "area": cap.area(),
            "open_profile": bool(cap.open_profile),
            "hatch": hatch3d,
        })
    return {"layers": out, "caps": caps, "box": serialize_box(result.box)}


def serialize_pick(result: picking_mod.PickResult, store: MetaStore) -> dict:
    if result.hit is None:
        return {"hit": None, "is_poche": False, "metadata": None, "highlight": None}
    hit = result.hit
    record = store.get(hit.element_id)
    metadata = None
    if record is not None:
        metadata = {
            "element_id": record.element_id,
            "category": record.category,
            "family": record.family,
            "parameters": dict(record.parameters),
        }
    highlight = None
    if result.highlight is not None:
        highlight = {
            "style": result.highlight.style.value,
            "element": result.highlight.element_id,
            "layer": result.highlight.layer_index,
            "batches": [
                {"positions": _round_floats(v),
                 "indices": [int(i) for i in np.asarray(t, dtype=np.int64).ravel()]}
                for v, t in result.highlight.batches
            ],
        }
    return {
        "hit": {
            "element": hit.element_id,
            "layer": hit.layer_index,
            "distance": float(hit.distance),
            "point": _round_floats(hit.point),
            "normal": _round_floats(hit.normal),
            "source": hit.source.value,
        },
        "is_poche": bool(result.is_poche),
        "metadata": metadata,
        "highlight": highlight,
    }


def serialize_metadata(record) -> dict:
    return {
        "element_id": record.element_id,
        "category": record.category,
        "family": record.family,
        "parameters": dict(record.parameters),
    }


# ---------------------------------------------------------------------------
# request handling
# ---------------------------------------------------------------------------

def _error(status: int, message: str) -> Response:
    return _json_response({"error": message}, status=status)


def _apply_section_request(state: SessionState, body: dict):
    """Validate + apply a /section body; returns (layer_set, result, mode)."""
    if not isinstance(body, dict):
        raise _Schema("body must be a JSON object")
    planes = body.get("planes", [])
    if not isinstance(planes, list):
        raise _Schema("'planes' must be a list")
    mode_token = body.get("mode", "section")
    try:
        mode = SectionMode(mode_token)
    except ValueError:
        raise _Schema(f"unknown mode {mode_token!r}") from None

    bounds = aabb(state.model)
    with state.lock:
        box = state.box
        for update in planes:
            if not isinstance(update, dict) or "axis" not in update or \
                    "sign" not in update:
                raise _Schema("each plane update needs axis and sign")
            try:
                axis = Axis[str(update["axis"]).upper()]
                sign = Sign(str(update["sign"]).lower())
            except (KeyError, ValueError):
                raise _UnknownPlane(
                    f"unknown axis/sign {update.get('axis')}/{update.get('sign')}"
                ) from None
            offset = update.get("offset", box.plane(axis, sign).offset)
            try:
                offset = float(offset)
            except (TypeError, ValueError):
                raise _Schema(f"offset {offset!r} is not a number") from None
            if not np.isfinite(offset):
                raise _Schema("offset must be finite")
            active = bool(update.get("active", True))
            box = box.with_plane(axis, sign, offset, active, bounds=bounds)
        state.box = box
        state.mode = mode

    highlight = body.get("highlight")
    if highlight is not None:
        if not isinstance(highlight, dict) or "element" not in highlight:
            raise _Schema("'highlight' needs an element field")
        highlight = (highlight["element"], highlight.get("layer"))

    context_ids = body.get("context_elements")
    result = sectioning.clip_model(state.model, box)
    result = generate_poche(result)
    layer_set = sectioning.classify_layers(
        result, mode, highlight=highlight,
        context_ids=context_ids if mode is SectionMode.REVEAL else None)
    return layer_set, result


class _Schema(Exception):
    pass


class _UnknownPlane(Exception):
    pass


def create_app(model: BuildingModel, store: MetaStore | None = None,
               ui_dir=None) -> FastAPI:
    """Build the single-session application serving the given model."""
    app = FastAPI(title="sectionlab", docs_url=None, redoc_url=None)
    state = None
    if model is not None:
        state = SessionState(model=model, store=store or MetaStore.empty(),
                             box=SectionBox.for_model(model))
    app.state.session = state

    @app.get(f"{API_PREFIX}/model")
    def get_model():
        if state is None:
            return _error(503, "no model loaded")
        return _json_response(serialize_model_summary(state.model, state.store))

    @app.get(f"{API_PREFIX}/box")
    def get_box():
        if state is None:
            return _error(503, "no model loaded")
        return _json_response(serialize_box(state.box))

    @app.post(f"{API_PREFIX}/section")
    async def post_section(request: Request):
        if state is None:
            return _error(503, "no model loaded")
        try:
            body = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError:
            return _error(400, "invalid JSON body")
        try:
            layer_set, result = _apply_section_request(state, body)
        except _UnknownPlane as exc:
            return _error(422, str(exc))
        except (_Schema, SectionLabError) as exc:
            return _error(400, str(exc))
        return _json_response(serialize_layer_set(layer_set, result))

    @app.post(f"{API_PREFIX}/pick")
    async def post_pick(request: Request):
        if state is None:
            return _error(503, "no model loaded")
        try:
            body = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError:
            return _error(400, "invalid JSON body")
        origin = body.get("origin")
        direction = body.get("direction")
        if (not isinstance(origin, list) or len(origin) != 3
                or not isinstance(direction, list) or len(direction) != 3):
            return _error(400, "origin and direction must be 3-vectors")
        d = np.asarray(direction, dtype=float)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            return _error(400, "direction must be unit length")
        active_plane = None
        token = body.get("active_plane")
        if token:
            try:
                axis, sign = parse_plane_token(str(token))
            except ValueError as exc:
                return _error(400, str(exc))
            active_plane = state.box.plane(axis, sign)
        with state.lock:
            box = state.box
            mode = state.mode
        result = sectioning.clip_model(state.model, box)
        ray = Ray(origin, d)
        pick = picking_mod.pick(result, ray, active_plane=active_plane, mode=mode)
        return _json_response(serialize_pick(pick, state.store))

    @app.get(f"{API_PREFIX}/metadata/{{element_id}}")
    def get_metadata(element_id: str):
        if state is None:
            return _error(503, "no model loaded")
        record = state.store.get(element_id)
        if record is None:
            return _error(404, f"no metadata for {element_id!r}")
        return _json_response(serialize_metadata(record))

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app


def run_server(model, store, port: int = DEFAULT_PORT, ui_dir=None) -> None:
    import uvicorn

    app = create_app(model, store, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
