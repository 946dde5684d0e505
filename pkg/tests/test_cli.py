import json

import numpy as np
import pytest

from sectionlab.cli import run
from sectionlab.study import TLX_HEADER

CUBE_OBJ = """o wall-7#0
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

META_CSV = ("element_id,category,family,parameter,value\n"
            "wall-7,Walls,Basic Wall,FireRating,2hr\n")


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "model.obj").write_text(CUBE_OBJ)
    (tmp_path / "meta.csv").write_text(META_CSV)
    return tmp_path


def run_cli(capsys, argv):
    code = run([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestIngest:
    def test_emits_metadata_json(self, workspace, capsys):
        out_path = workspace / "meta.json"
        code, out, err = run_cli(capsys, [
            "ingest", "--model", workspace / "model.obj",
            "--meta", workspace / "meta.csv", "--out", out_path])
        assert code == 0
        doc = json.loads(out_path.read_text())
        assert doc["wall-7"]["parameters"] == {"FireRating": "2hr"}
        assert "clean: yes" in out

    def test_missing_file_exit_2(self, workspace, capsys):
        code, out, err = run_cli(capsys, [
            "ingest", "--model", workspace / "nope.obj",
            "--meta", workspace / "meta.csv"])
        assert code == 2
        assert "error" in err


class TestSlice:
    def test_svg_unit_square_cap(self, workspace, capsys):
        svg_path = workspace / "out.svg"
        code, out, err = run_cli(capsys, [
            "slice", "--model", workspace / "model.obj",
            "--x-pos", "0.5", "--svg", svg_path])
        assert code == 0
        from .oracles import svg_cap_areas
        areas = svg_cap_areas(svg_path.read_bytes())
        assert len(areas) == 1
        assert areas[0] == pytest.approx(1.0, abs=1e-6)

    def test_output_deterministic(self, workspace, capsys):
        svg_path = workspace / "out.svg"
        argv = ["slice", "--model", workspace / "model.obj",
                "--x-pos", "0.5", "--svg", svg_path, "--json"]
        code1, out1, _ = run_cli(capsys, argv)
        first = svg_path.read_bytes()
        code2, out2, _ = run_cli(capsys, argv)
        assert (code1, out1) == (code2, out2)
        assert svg_path.read_bytes() == first

    def test_obj_sides(self, workspace, capsys):
        obj_path = workspace / "caps.obj"
        code, out, err = run_cli(capsys, [
            "slice", "--model", workspace / "model.obj", "--x-pos", "0.5",
            "--obj", obj_path, "--side", "caps", "--json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["kept_volume"] == pytest.approx(0.5, abs=1e-12)
        assert obj_path.read_text().count("f ") == 2


class TestPick:
    def test_poche_pick_with_metadata(self, workspace, capsys):
        run_cli(capsys, ["ingest", "--model", workspace / "model.obj",
                         "--meta", workspace / "meta.csv",
                         "--out", workspace / "meta.json"])
        code, out, err = run_cli(capsys, [
            "pick", "--model", workspace / "model.obj", "--x-pos", "0.5",
            "--origin=-1,0.5,0.5", "--dir", "1,0,0",
            "--poche-plane", "x-pos", "--meta", workspace / "meta.json"])
        assert code == 0
        assert "poche" in out
        assert "FireRating: 2hr" in out

    def test_bad_vector_usage_error(self, workspace, capsys):
        code, out, err = run_cli(capsys, [
            "pick", "--model", workspace / "model.obj",
            "--origin", "1,2", "--dir", "1,0,0"])
        assert code == 1


class TestAlign:
    def test_fifteen_mm(self, workspace, capsys):
        ann = {"reference": {"p0": [0, 0], "p1": [600, 0], "length_m": 3.0},
               "samples": [{"model": [0, 0], "physical": [3, 0]}]}
        path = workspace / "ann.json"
        path.write_text(json.dumps(ann))
        code, out, err = run_cli(capsys, ["align", path])
        assert code == 0
        assert "mean error: 15.00 mm" in out


def study_csv(rows):
    head = ("participant_id,sbst_pre,sbst_post,art_pre,art_post,"
            "pretest_total_min,sbst_post_min,art_post_min,excluded\n")
    return head + "".join(rows)


class TestAnalyze:
    def test_all_improved_prints_0313(self, workspace, capsys):
        rng = np.random.default_rng(113)
        rows = []
        for i in range(6):
            sp = 60 + i
            ap = 55 + 2 * i
            rows.append(f"p{i},{sp},{sp + 5 + i},{ap},{ap + 4 + i},"
                        f"{20 + i},{4 + i * 0.5},{6 + i * 0.3},0\n")
        path = workspace / "study.csv"
        path.write_text(study_csv(rows))
        code, out, err = run_cli(capsys, ["analyze", path])
        assert code == 0
        assert "p=0.0313" in out
        assert "SBST Score (%)" in out

    def test_json_report(self, workspace, capsys):
        path = workspace / "study.csv"
        path.write_text(study_csv(["p1,70,80,60,75,25,8,12,0\n",
                                   "p2,90,85,80,95,35,10,10,0\n"]))
        code, out, err = run_cli(capsys, ["analyze", path, "--json"])
        assert code == 0
        doc = json.loads(out)
        assert doc["n_total"] == 2
        assert "sbst_time" in doc["summaries"]

    def test_bad_header_exit_2(self, workspace, capsys):
        path = workspace / "study.csv"
        path.write_text("nope\n1\n")
        code, out, err = run_cli(capsys, ["analyze", path])
        assert code == 2


def tlx_csv_line(pid, rates, winner="first"):
    cells = [pid] + [str(r) for r in rates]
    for col in TLX_HEADER[7:]:
        _, a, b = col.split("_", 2)
        cells.append(a if winner == "first" else b)
    return ",".join(cells) + "\n"


class TestTlx:
    def test_all_max_overall_100(self, workspace, capsys):
        path = workspace / "tlx.csv"
        path.write_text(",".join(TLX_HEADER) + "\n"
                        + tlx_csv_line("p1", [100] * 6))
        code, out, err = run_cli(capsys, ["tlx", path])
        assert code == 0
        assert "mean 100.00" in out

    def test_json_weights(self, workspace, capsys):
        path = workspace / "tlx.csv"
        path.write_text(",".join(TLX_HEADER) + "\n"
                        + tlx_csv_line("p1", [50, 40, 30, 20, 10, 0]))
        code, out, err = run_cli(capsys, ["tlx", path, "--json"])
        doc = json.loads(out)
        weights = doc["per_participant"]["p1"]["weights"]
        assert sum(weights.values()) == 15


class TestUsage:
    def test_unknown_flag_exit_1(self, workspace, capsys):
        code, out, err = run_cli(capsys, ["slice", "--bogus", "1"])
        assert code == 1
        assert "usage" in err.lower()

    def test_no_subcommand_exit_1(self, capsys):
        code, out, err = run_cli(capsys, [])
        assert code == 1
