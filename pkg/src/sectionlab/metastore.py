"""Keyed metadata storage and retrieval by element id.

A store is an immutable snapshot; ``put`` returns a new snapshot, so readers
never observe partial updates. Persistence uses the metadata JSON format
from :mod:`sectionlab.ingest`, which makes persisted bytes a deterministic
function of store contents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType

from .errors import ParseError


@dataclass(frozen=True)
class MetadataRecord:
    element_id: str
    category: str = ""
    family: str = ""
    parameters: tuple = ()  # ordered (key, value) pairs

    def __post_init__(self):
        if not self.element_id:
            raise ValueError("element_id must be nonempty")
        params = tuple((str(k), str(v)) for k, v in self.parameters)
        keys = [k for k, _ in params]
        if len(set(keys)) != len(keys):
            raise ValueError(f"record {self.element_id!r} repeats a parameter key")
        object.__setattr__(self, "parameters", params)

    def parameter_map(self) -> dict:
        return dict(self.parameters)


@dataclass(frozen=True)
class MetaStore:
    """Immutable snapshot of element metadata keyed by id."""

    _records: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    @staticmethod
    def empty() -> "MetaStore":
        return MetaStore()

    def put(self, record: MetadataRecord) -> "MetaStore":
        """New snapshot with the record stored; last writer wins per id."""
        records = dict(self._records)
        records[record.element_id] = record
        return MetaStore(MappingProxyType(records))

    def get(self, element_id: str):
        """The stored record, or None; absence is a value, not an error."""
        return self._records.get(element_id)

    def ids(self) -> list:
        return sorted(self._records)

    def records(self) -> list:
        return [self._records[k] for k in sorted(self._records)]

    def __len__(self) -> int:
        return len(self._records)

    def to_json(self) -> str:
        doc = {
            r.element_id: {
                "category": r.category,
                "family": r.family,
                "parameters": dict(r.parameters),
            }
            for r in self._records.values()
        }
        return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def from_rows(rows) -> MetaStore:
    """Build a store from metadata CSV rows (grouped by element id)."""
    grouped = {}
    for row in rows:
        entry = grouped.setdefault(row.element_id, {
            "category": row.category, "family": row.family, "parameters": {}})
        entry["parameters"][row.parameter] = row.value
    store = MetaStore.empty()
    for element_id, entry in grouped.items():
        store = store.put(MetadataRecord(
            element_id=element_id,
            category=entry["category"],
            family=entry["family"],
            parameters=tuple(sorted(entry["parameters"].items())),
        ))
    return store


def persist(store: MetaStore, path) -> None:
    """Write the store to disk in the metadata JSON format."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(store.to_json())
    except OSError as exc:
        raise OSError(f"cannot persist metadata store to {path}: {exc}") from exc


def load_store(path) -> MetaStore:
    """Load a store persisted by :func:`persist`."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read metadata store from {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid metadata JSON: {exc}", path) from None
    store = MetaStore.empty()
    for element_id in sorted(doc):
        entry = doc[element_id]
        store = store.put(MetadataRecord(
            element_id=element_id,
            category=entry.get("category", ""),
            family=entry.get("family", ""),
            parameters=tuple(sorted(entry.get("parameters", {}).items())),
        ))
    return store
