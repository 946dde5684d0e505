import pytest

from sectionlab import metastore
from sectionlab.errors import ParseError
from sectionlab.metastore import MetadataRecord, MetaStore


def record(eid, category="Walls", **params):
    return MetadataRecord(eid, category, "Fam", tuple(sorted(params.items())))


def test_put_get_identity():
    store = MetaStore.empty().put(record("wall-7", FireRating="2hr"))
    got = store.get("wall-7")
    assert got.element_id == "wall-7"
    assert got.parameter_map() == {"FireRating": "2hr"}


def test_last_writer_wins():
    store = MetaStore.empty()
    store = store.put(record("x", category="A"))
    store = store.put(record("x", category="B"))
    assert store.get("x").category == "B"
    assert len(store) == 1


def test_get_unknown_is_absent_value():
    assert MetaStore.empty().get("nope") is None


def test_put_returns_new_snapshot():
    s0 = MetaStore.empty()
    s1 = s0.put(record("a"))
    assert s0.get("a") is None
    assert s1.get("a") is not None


def test_many_random_puts_match_reference_map():
    import numpy as np
    rng = np.random.default_rng(17)
    store = MetaStore.empty()
    reference = {}
    for _ in range(10000):
        eid = f"e{rng.integers(0, 500)}"
        cat = f"cat{rng.integers(0, 5)}"
        rec = record(eid, category=cat, n=str(rng.integers(0, 9)))
        store = store.put(rec)
        reference[eid] = rec
    assert len(store) == len(reference)
    for eid, rec in reference.items():
        assert store.get(eid) == rec
    for eid in (f"e{i}" for i in range(500, 520)):
        assert store.get(eid) is None


def test_persist_load_roundtrip(tmp_path):
    store = MetaStore.empty()
    store = store.put(record("b", Width="0.3"))
    store = store.put(record("a", FireRating="2hr", Height="2.1"))
    path = tmp_path / "meta.json"
    metastore.persist(store, path)
    loaded = metastore.load_store(path)
    assert loaded.ids() == store.ids()
    for eid in store.ids():
        assert loaded.get(eid) == store.get(eid)


def test_empty_store_roundtrip(tmp_path):
    path = tmp_path / "meta.json"
    metastore.persist(MetaStore.empty(), path)
    assert path.read_text() == "{}\n"
    assert len(metastore.load_store(path)) == 0


def test_persist_deterministic_bytes(tmp_path):
    import numpy as np
    rng = np.random.default_rng(19)
    store = MetaStore.empty()
    for i in rng.permutation(50):
        store = store.put(record(f"e{i}", k=str(i)))
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    metastore.persist(store, p1)
    metastore.persist(store, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        metastore.load_store(path)


def test_io_error_carries_path():
    with pytest.raises(OSError, match="no/such"):
        metastore.load_store("no/such/file.json")


def test_from_rows_groups_parameters():
    from sectionlab.ingest import MetadataRecordRow
    rows = [MetadataRecordRow("w", "Walls", "F", "a", "1"),
            MetadataRecordRow("w", "Walls", "F", "b", "2")]
    store = metastore.from_rows(rows)
    assert store.get("w").parameter_map() == {"a": "1", "b": "2"}
