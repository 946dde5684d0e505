import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectionlab import ingest
from sectionlab.core import HatchPattern
from sectionlab.errors import (ConflictError, DuplicateId, HeaderError,
                               LayerRefError, ParseError)
from sectionlab.ingest import MetadataRecordRow

from .oracles import naive_csv_parse

CUBE_OBJ = """o {name}
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 3 2
f 1 4 3
f 5 6 7
f 5 7 8
f 1 2 6
f 1 6 5
f 3 4 8
f 3 8 7
f 2 3 7
f 2 7 6
f 4 1 5
f 4 5 8
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestGeometry:
    def test_layered_groups_become_one_element(self, tmp_path):
        text = CUBE_OBJ.format(name="wall-7#0") + CUBE_OBJ.format(name="wall-7#1")
        model = ingest.load_geometry(write(tmp_path, "m.obj", text))
        assert model.element_ids == ["wall-7"]
        layers = [spec.layer_index for spec, _ in model.elements[0].meshes]
        assert layers == [0, 1]

    def test_plain_group_passthrough(self, tmp_path):
        model = ingest.load_geometry(
            write(tmp_path, "m.obj", CUBE_OBJ.format(name="door-1")))
        assert model.element_ids == ["door-1"]
        (spec, mesh), = model.elements[0].meshes
        assert spec.layer_index == 0
        assert len(mesh.triangles) == 12

    def test_duplicate_group_rejected(self, tmp_path):
        text = CUBE_OBJ.format(name="a#0") + CUBE_OBJ.format(name="a#0")
        with pytest.raises(DuplicateId):
            ingest.load_geometry(write(tmp_path, "m.obj", text))

    def test_plain_and_hash_zero_collide(self, tmp_path):
        text = CUBE_OBJ.format(name="a") + CUBE_OBJ.format(name="a#0")
        with pytest.raises(DuplicateId):
            ingest.load_geometry(write(tmp_path, "m.obj", text))

    def test_malformed_line_reports_line_number(self, tmp_path):
        bad = "o a\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n"
        with pytest.raises(ParseError, match=":5:"):
            ingest.load_geometry(write(tmp_path, "m.obj", bad))

    def test_slash_faces_rejected(self, tmp_path):
        bad = "o a\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n"
        with pytest.raises(ParseError, match="plain integer"):
            ingest.load_geometry(write(tmp_path, "m.obj", bad))

    def test_sidecar_resolves_layers(self, tmp_path):
        sidecar = {"wall-7#0": {"material": "plaster", "hatch": "crosshatch",
                                "thickness_m": 0.02}}
        path = write(tmp_path, "layers.json", json.dumps(sidecar))
        specs = ingest.load_layer_sidecar(path)
        model = ingest.load_geometry(
            write(tmp_path, "m.obj", CUBE_OBJ.format(name="wall-7#0")),
            layer_specs=specs)
        (spec, _), = model.elements[0].meshes
        assert spec.material_name == "plaster"
        assert spec.hatch_pattern is HatchPattern.CROSSHATCH

    def test_dangling_layer_errors_with_sidecar(self, tmp_path):
        path = write(tmp_path, "layers.json", json.dumps({"other#0": {"material": "x"}}))
        specs = ingest.load_layer_sidecar(path)
        with pytest.raises(LayerRefError, match="wall-7#0"):
            ingest.load_geometry(
                write(tmp_path, "m.obj", CUBE_OBJ.format(name="wall-7#0")),
                layer_specs=specs)

    def test_unknown_hatch_in_sidecar(self, tmp_path):
        path = write(tmp_path, "layers.json",
                     json.dumps({"a#0": {"material": "x", "hatch": "swirly"}}))
        with pytest.raises(LayerRefError, match="swirly"):
            ingest.load_layer_sidecar(path)

    def test_roundtrip_preserves_multisets(self, tmp_path):
        from sectionlab.drawing import export_model_mesh
        text = CUBE_OBJ.format(name="wall-7#0") + CUBE_OBJ.format(name="door-1")
        model = ingest.load_geometry(write(tmp_path, "m.obj", text))
        data = export_model_mesh(model)
        model2 = ingest.load_geometry(write(tmp_path, "m2.obj", data.decode()))
        assert model.element_ids == model2.element_ids
        for e1, e2 in zip(model.elements, model2.elements):
            for (s1, m1), (s2, m2) in zip(e1.meshes, e2.meshes):
                t1 = {tuple(np.round(np.asarray(m1.vertices)[tri].ravel(), 12))
                      for tri in np.asarray(m1.triangles)}
                t2 = {tuple(np.round(np.asarray(m2.vertices)[tri].ravel(), 12))
                      for tri in np.asarray(m2.triangles)}
                assert t1 == t2


class TestMetadataCsv:
    def test_single_row(self, tmp_path):
        path = write(tmp_path, "m.csv",
                     "element_id,category,family,parameter,value\n"
                     "wall-7,Walls,Basic Wall,FireRating,2hr\n")
        rows = ingest.parse_metadata_csv(path)
        assert rows == [MetadataRecordRow("wall-7", "Walls", "Basic Wall",
                                          "FireRating", "2hr")]

    def test_quoted_comma(self, tmp_path):
        path = write(tmp_path, "m.csv",
                     "element_id,category,family,parameter,value\n"
                     'wall-7,Walls,Basic Wall,Note,"a,b"\n')
        rows = ingest.parse_metadata_csv(path)
        assert rows[0].value == "a,b"

    def test_missing_header(self, tmp_path):
        path = write(tmp_path, "m.csv", "id,cat\nx,y\n")
        with pytest.raises(HeaderError):
            ingest.parse_metadata_csv(path)

    def test_wrong_column_count_reports_line(self, tmp_path):
        path = write(tmp_path, "m.csv",
                     "element_id,category,family,parameter,value\n"
                     "wall-7,Walls,Basic Wall,FireRating\n")
        with pytest.raises(ParseError, match=":2:"):
            ingest.parse_metadata_csv(path)

    def test_random_csv_matches_naive_parser(self):
        rng = np.random.default_rng(23)
        alphabet = list('abcXYZ019 ,"\'-_')
        rows = []
        for i in range(1000):
            fields = ["".join(rng.choice(alphabet,
                                         size=rng.integers(1, 9)).tolist())
                      for _ in range(5)]
            fields[0] = f"id-{i}"
            fields[3] = f"param-{i}"
            rows.append(MetadataRecordRow(*fields))
        text = ingest.write_metadata_csv(rows)
        parsed = ingest.parse_metadata_csv_text(text)
        naive = naive_csv_parse(text)
        assert naive[0] == ingest.CSV_HEADER
        assert len(parsed) == len(naive) - 1 == 1000
        for row, fields in zip(parsed, naive[1:]):
            assert [row.element_id, row.category, row.family,
                    row.parameter, row.value] == fields


class TestMetadataJson:
    def test_single_row_document(self):
        rows = [MetadataRecordRow("wall-7", "Walls", "Basic Wall",
                                  "FireRating", "2hr")]
        doc = json.loads(ingest.csv_to_json(rows))
        assert doc == {"wall-7": {"category": "Walls", "family": "Basic Wall",
                                  "parameters": {"FireRating": "2hr"}}}

    def test_empty_rows(self):
        assert ingest.csv_to_json([]) == "{}\n"

    def test_conflicting_category_raises(self):
        rows = [MetadataRecordRow("x", "A", "F", "p1", "v"),
                MetadataRecordRow("x", "B", "F", "p2", "v")]
        with pytest.raises(ConflictError, match="'x'"):
            ingest.csv_to_json(rows)

    def test_conflicting_parameter_value_raises(self):
        rows = [MetadataRecordRow("x", "A", "F", "p", "1"),
                MetadataRecordRow("x", "A", "F", "p", "2")]
        with pytest.raises(ConflictError):
            ingest.csv_to_json(rows)

    def test_json_roundtrip_byte_identical(self):
        rows = [MetadataRecordRow("b", "B", "F2", "p2", "v2"),
                MetadataRecordRow("a", "A", "F1", "p1", "v1"),
                MetadataRecordRow("a", "A", "F1", "p0", "v0")]
        doc = ingest.csv_to_json(rows)
        doc2 = ingest.csv_to_json(ingest.json_to_rows(doc))
        assert doc == doc2

    @given(st.lists(
        st.tuples(st.sampled_from(["a", "b", "c", "d"]),
                  st.text(st.characters(min_codepoint=32, max_codepoint=126),
                          min_size=1, max_size=8)),
        min_size=0, max_size=20, unique_by=lambda t: t))
    @settings(max_examples=100, deadline=None)
    def test_roundtrip_property(self, pairs):
        rows = [MetadataRecordRow(eid, "Cat", "Fam", f"param-{i}", val)
                for i, (eid, val) in enumerate(pairs)]
        doc = ingest.csv_to_json(rows)
        back = ingest.json_to_rows(doc)
        assert sorted((r.element_id, r.parameter, r.value) for r in rows) == \
            sorted((r.element_id, r.parameter, r.value) for r in back)
        assert ingest.csv_to_json(back) == doc


class TestValidation:
    def test_matching_sets_clean(self, tmp_path, unit_cube_model):
        rows = [MetadataRecordRow("cube-1", "Walls", "Test Wall", "p", "v")]
        report = ingest.validate_model(unit_cube_model, rows)
        assert report.clean

    def test_set_differences(self, two_cube_model):
        rows = [MetadataRecordRow("cube-b", "Doors", "D", "p", "v"),
                MetadataRecordRow("cube-c", "Doors", "D", "p", "v")]
        report = ingest.validate_model(two_cube_model, rows)
        assert report.orphan_geometry_ids == ["cube-a"]
        assert report.orphan_metadata_ids == ["cube-c"]

    def test_random_sets_match_oracle(self):
        rng = np.random.default_rng(31)
        from .conftest import cube_mesh
        from sectionlab.core import BuildingModel, Element, LayerSpec
        for _ in range(20):
            geo_ids = {f"g{i}" for i in rng.choice(30, size=10, replace=False)}
            meta_ids = {f"g{i}" for i in rng.choice(30, size=10, replace=False)}
            elements = tuple(
                Element(g, meshes=((LayerSpec(0, "m"), cube_mesh()),))
                for g in sorted(geo_ids))
            rows = [MetadataRecordRow(m, "c", "f", "p", "v")
                    for m in sorted(meta_ids)]
            report = ingest.validate_model(BuildingModel(elements), rows)
            assert set(report.orphan_geometry_ids) == geo_ids - meta_ids
            assert set(report.orphan_metadata_ids) == meta_ids - geo_ids
