"""File ingestion: geometry, metadata CSV, layer sidecar, validation.

External formats owned by this module:

* Geometry: a Wavefront-OBJ subset with only ``v``/``f``/``o`` records.
  Object group names carry element identity: ``<element_id>`` or
  ``<element_id>#<layer_index>``. Coordinates are meters. Faces are
  triangles with plain 1-based vertex indices (no ``/`` forms).
* Metadata CSV: UTF-8, header exactly
  ``element_id,category,family,parameter,value``, RFC-4180 quoting, LF.
* Layer sidecar: JSON mapping ``"<id>#<k>"`` to
  ``{"material": str, "hatch": str, "thickness_m": number}``.
* Metadata JSON: one top-level object keyed by element id, each value
  ``{"category", "family", "parameters": {...}}``, two-space indent,
  lexicographic keys, trailing newline — byte-deterministic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .core import BuildingModel, Element, HatchPattern, LayerSpec, TriMesh
from .errors import ConflictError, DuplicateId, HeaderError, LayerRefError, ParseError

CSV_HEADER = ["element_id", "category", "family", "parameter", "value"]


@dataclass(frozen=True)
class MetadataRecordRow:
    """One long-format metadata row: a single parameter of one element."""

    element_id: str
    category: str
    family: str
    parameter: str
    value: str

    def __post_init__(self):
        if not self.element_id:
            raise ValueError("element_id must be nonempty")
        if not self.parameter:
            raise ValueError("parameter must be nonempty")


@dataclass
class ValidationReport:
    """Cross-reference report between geometry and metadata id sets."""

    orphan_geometry_ids: list = field(default_factory=list)
    orphan_metadata_ids: list = field(default_factory=list)
    duplicate_rows: list = field(default_factory=list)
    element_count: int = 0
    row_count: int = 0

    @property
    def clean(self) -> bool:
        return not (self.orphan_geometry_ids or self.orphan_metadata_ids
                    or self.duplicate_rows)


# ---------------------------------------------------------------------------
# geometry
# ---------------------------------------------------------------------------

def _split_group_name(name: str, path, line_no: int):
    """Group name grammar: ``id`` or ``id "#" decimal-layer-index``."""
    if "#" not in name:
        return name, 0
    element_id, _, tail = name.rpartition("#")
    if not element_id:
        raise ParseError(f"group name {name!r} has empty element id", path, line_no)
    if not tail.isdigit():
        raise ParseError(f"group name {name!r} has non-decimal layer index", path, line_no)
    return element_id, int(tail)


def load_geometry(path, layer_specs=None) -> BuildingModel:
    """Parse the OBJ-subset geometry file into a :class:`BuildingModel`.

    One element per distinct group-name prefix; ``id#k`` groups become layer
    ``k`` of element ``id``. When ``layer_specs`` (a mapping from
    ``(element_id, layer_index)`` to :class:`LayerSpec`, e.g. from
    :func:`load_layer_sidecar`) is given, every group must resolve in it or
    :class:`LayerRefError` is raised; without it default specs are
    synthesized.
    """
    vertices = []
    groups = {}       # (element_id, layer_index) -> list of triangles
    order = []        # first-seen order of (element_id, layer_index)
    current = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            rec = parts[0]
            if rec == "o":
                if len(parts) != 2:
                    raise ParseError("'o' record needs exactly one name", path, line_no)
                key = _split_group_name(parts[1], path, line_no)
                if key in groups:
                    raise DuplicateId(
                        f"{path}:{line_no}: group {parts[1]!r} already defined")
                groups[key] = []
                order.append(key)
                current = key
            elif rec == "v":
                if len(parts) != 4:
                    raise ParseError("'v' record needs three coordinates", path, line_no)
                try:
                    vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
                except ValueError:
                    raise ParseError("non-numeric vertex coordinate", path, line_no) from None
            elif rec == "f":
                if current is None:
                    raise ParseError("'f' record before any 'o' group", path, line_no)
                if len(parts) != 4:
                    raise ParseError("'f' record needs exactly three indices", path, line_no)
                idx = []
                for p in parts[1:]:
                    if "/" in p or not p.lstrip("-").isdigit():
                        raise ParseError(f"face index {p!r} is not a plain integer",
                                         path, line_no)
                    i = int(p)
                    if i == 0 or abs(i) > len(vertices):
                        raise ParseError(f"face index {p} out of range", path, line_no)
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                groups[current].append(tuple(idx))
            else:
                raise ParseError(f"unsupported record {rec!r}", path, line_no)

    by_element = {}
    for element_id, layer_index in order:
        by_element.setdefault(element_id, []).append(layer_index)

    elements = []
    for element_id, layer_indices in by_element.items():
        pairs = []
        for k in layer_indices:
            tris = groups[(element_id, k)]
            if not tris:
                raise ParseError(f"group {element_id!r} layer {k} has no faces", path)
            used = sorted({i for tri in tris for i in tri})
            remap = {g: l for l, g in enumerate(used)}
            local_vertices = [vertices[g] for g in used]
            local_tris = [tuple(remap[i] for i in tri) for tri in tris]
            mesh = TriMesh(local_vertices, local_tris)
            if layer_specs is not None:
                spec = layer_specs.get((element_id, k))
                if spec is None:
                    raise LayerRefError(
                        f"no layer spec for {element_id}#{k} in sidecar")
            else:
                spec = LayerSpec(layer_index=k, material_name="default")
            pairs.append((spec, mesh))
        elements.append(Element(element_id=element_id, meshes=tuple(pairs)))
    return BuildingModel(tuple(elements))


def load_layer_sidecar(path):
    """Parse the layer sidecar JSON into ``{(element_id, k): LayerSpec}``."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid sidecar JSON: {exc}", path) from None
    specs = {}
    for key, body in doc.items():
        element_id, _, tail = key.rpartition("#")
        if not element_id or not tail.isdigit():
            raise ParseError(f"sidecar key {key!r} is not '<id>#<k>'", path)
        try:
            hatch = HatchPattern(body.get("hatch", "diagonal45"))
        except ValueError:
            raise LayerRefError(
                f"{path}: unknown hatch {body.get('hatch')!r} for {key}") from None
        specs[(element_id, int(tail))] = LayerSpec(
            layer_index=int(tail),
            material_name=str(body.get("material", "default")),
            hatch_pattern=hatch,
            thickness_m=float(body.get("thickness_m", 0.0)),
        )
    return specs


# ---------------------------------------------------------------------------
# metadata CSV
# ---------------------------------------------------------------------------

def parse_metadata_csv(path) -> list:
    """Parse the metadata CSV into :class:`MetadataRecordRow` items."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_metadata_csv_text(fh.read(), path=path)


def parse_metadata_csv_text(text: str, path=None) -> list:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise HeaderError("empty file, expected header", path, 1) from None
    if header != CSV_HEADER:
        raise HeaderError(
            f"expected header {','.join(CSV_HEADER)!r}, got {','.join(header)!r}",
            path, 1)
    rows = []
    for fields_ in reader:
        line_no = reader.line_num
        if not fields_:
            continue
        if len(fields_) != 5:
            raise ParseError(f"expected 5 fields, got {len(fields_)}", path, line_no)
        try:
            rows.append(MetadataRecordRow(*fields_))
        except ValueError as exc:
            raise ParseError(str(exc), path, line_no) from None
    return rows


def write_metadata_csv(rows) -> str:
    """Serialize rows back to the CSV format (RFC-4180, LF endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([r.element_id, r.category, r.family, r.parameter, r.value])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# metadata JSON
# ---------------------------------------------------------------------------

def csv_to_json(rows) -> str:
    """Convert rows to the metadata JSON document (deterministic bytes).

    Top-level object keyed by element id; conflicting category/family (or
    conflicting values for one parameter) raise :class:`ConflictError`.
    """
    doc = {}
    for row in rows:
        entry = doc.get(row.element_id)
        if entry is None:
            doc[row.element_id] = {
                "category": row.category,
                "family": row.family,
                "parameters": {row.parameter: row.value},
            }
            continue
        if entry["category"] != row.category or entry["family"] != row.family:
            raise ConflictError(
                f"conflicting category/family for element {row.element_id!r}")
        existing = entry["parameters"].get(row.parameter)
        if existing is not None and existing != row.value:
            raise ConflictError(
                f"conflicting values for {row.element_id!r} parameter "
                f"{row.parameter!r}")
        entry["parameters"][row.parameter] = row.value
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def json_to_rows(text: str) -> list:
    """Inverse of :func:`csv_to_json`; rows ordered by (element_id, parameter)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid metadata JSON: {exc}") from None
    rows = []
    for element_id in sorted(doc):
        entry = doc[element_id]
        for parameter in sorted(entry.get("parameters", {})):
            rows.append(MetadataRecordRow(
                element_id=element_id,
                category=entry.get("category", ""),
                family=entry.get("family", ""),
                parameter=parameter,
                value=entry["parameters"][parameter],
            ))
    return rows


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_model(model: BuildingModel, rows) -> ValidationReport:
    """Exact set-difference cross-check of geometry ids vs metadata ids."""
    geometry_ids = set(model.element_ids)
    metadata_ids = {r.element_id for r in rows}
    seen = set()
    duplicates = []
    for r in rows:
        key = (r.element_id, r.parameter)
        if key in seen:
            duplicates.append(key)
        seen.add(key)
    return ValidationReport(
        orphan_geometry_ids=sorted(geometry_ids - metadata_ids),
        orphan_metadata_ids=sorted(metadata_ids - geometry_ids),
        duplicate_rows=sorted(set(duplicates)),
        element_count=len(model.elements),
        row_count=len(rows),
    )
