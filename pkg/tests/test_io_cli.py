import json

import numpy as np
import pytest

from polynormal import fixtures
from polynormal.cli import main
from polynormal.errors import ParseError, ValidationError
from polynormal.fileio import (
    off_string,
    polytope_from_json,
    read_polytope,
    sheets_off_scene,
    write_polytope,
)


@pytest.fixture()
def tetra_off(tmp_path):
    path = tmp_path / "regular_tetra.off"
    write_polytope(fixtures.regular_tetrahedron(), path)
    return path


def test_off_round_trip(tmp_path, cube):
    path = tmp_path / "cube.off"
    write_polytope(cube, path)
    back = read_polytope(path)
    assert (back.n_vertices, back.n_edges, back.n_facets) == (8, 12, 6)
    again = tmp_path / "cube2.off"
    write_polytope(back, again)
    assert read_polytope(again).n_faces == back.n_faces
    a = sorted(map(tuple, np.round(back.vertices, 12)))
    b = sorted(map(tuple, np.round(cube.vertices, 12)))
    assert a == b


def test_off_accepts_comments_and_validates_indices(tmp_path):
    good = tmp_path / "ok.off"
    good.write_text("# a comment\nOFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                    "3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n")
    P = read_polytope(good)
    assert P.n_vertices == 4
    bad = tmp_path / "bad.off"
    bad.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 9\n")
    with pytest.raises(ParseError) as err:
        read_polytope(bad)
    assert err.value.line == 7
    assert "line 7" in str(err.value)


def test_off_header_and_numeric_errors(tmp_path):
    p = tmp_path / "x.off"
    p.write_text("OFFX\n1 0 0\n")
    with pytest.raises(ParseError):
        read_polytope(p)
    p.write_text("OFF\n3 0 0\n0 0 zero\n1 0 0\n0 1 0\n")
    with pytest.raises(ParseError) as err:
        read_polytope(p)
    assert err.value.line == 3


def test_json_schemas(tmp_path):
    hs = tmp_path / "halfspaces.json"
    hs.write_text(json.dumps({"halfspaces": [
        [1, 0, 0, 1], [-1, 0, 0, 1], [0, 1, 0, 1],
        [0, -1, 0, 1], [0, 0, 1, 1], [0, 0, -1, 1]]}))
    assert read_polytope(hs).n_vertices == 8
    tetra_planes = fixtures.regular_tetrahedron()
    doc = {"halfspaces": [list(n) + [float(b)] for n, b in
                          zip(tetra_planes.facet_normals, tetra_planes.facet_offsets)]}
    assert polytope_from_json(doc).n_vertices == 4
    poly = tmp_path / "poly.json"
    poly.write_text(json.dumps({"polygon": [[0, 0], [1, 0], [0.3, 0.8]]}))
    P = read_polytope(poly)
    assert P.dim == 2 and P.n_vertices == 3
    verts = tmp_path / "verts.json"
    write_polytope(fixtures.regular_tetrahedron(), verts)
    assert read_polytope(verts).n_vertices == 4
    with pytest.raises(ParseError):
        polytope_from_json({"nope": []})
    with pytest.raises(ParseError):
        polytope_from_json({"vertices": [[1, 2], [3]]})


def test_nonconvex_input_rejected(tmp_path):
    doc = {"polygon": [[0, 0], [1, 0], [1, 1], [0.5, 0.4], [0, 1]]}
    p = tmp_path / "reflex.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(ValidationError):
        read_polytope(p)


def test_off_string_is_parseable(cube):
    text = off_string(cube)
    assert text.startswith("OFF\n8 6 12\n")


def test_sheets_off_scene(flat_tetra_10):
    scene = sheets_off_scene(flat_tetra_10)
    head = scene.splitlines()
    nv, nf, _ = map(int, head[1].split())
    assert nf > 0 and nv >= 3 * nf


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_cli_count(tetra_off, capsys):
    code, out = run_cli(capsys, "count", "--point", "0,0,0", str(tetra_off))
    assert code == 0
    doc = json.loads(out)
    assert doc["payload"]["n"] == 14
    assert doc["payload"]["profile"] == {"min": 4, "saddle": 6, "max": 4}
    assert doc["parameters"]["seed"] == 0
    assert len(doc["digest"]) == 64
    # key-sorted output
    assert list(doc) == sorted(doc)


def test_cli_max(tmp_path, capsys, flat_tetra_10):
    path = tmp_path / "flat10.json"
    write_polytope(flat_tetra_10, path)
    code, out = run_cli(capsys, "max", str(path))
    assert code == 0
    assert json.loads(out)["payload"]["N"] == 10


def test_cli_max_chamber_report(tmp_path, capsys, flat_tetra_10):
    path = tmp_path / "flat10.json"
    write_polytope(flat_tetra_10, path)
    code, out = run_cli(capsys, "max", "--chambers", str(path))
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["N"] == 10
    assert 4.0 < payload["EN"] < 14.0
    assert all(set(c) == {"volume", "count"} for c in payload["chambers"])
    total = sum(c["volume"] for c in payload["chambers"])
    assert abs(total - flat_tetra_10.volume) < 1e-6 * flat_tetra_10.volume


def test_cli_average(tetra_off, capsys):
    code, out = run_cli(capsys, "average", str(tetra_off))
    assert code == 0
    assert abs(json.loads(out)["payload"]["EN"] - 14.0) < 1e-9
    code, out = run_cli(capsys, "average", "--mc", "1500", "--seed", "4", str(tetra_off))
    doc = json.loads(out)
    assert doc["payload"]["EN"] == 14.0
    assert doc["parameters"]["seed"] == 4


def test_cli_classify_prism(tmp_path, capsys):
    path = tmp_path / "prism.off"
    write_polytope(fixtures.generic_prism(seed=3), path)
    code, out = run_cli(capsys, "classify", str(path))
    assert code == 0
    doc = json.loads(out)
    verdicts = [v["verdict"] for v in doc["payload"]["vertices"]]
    assert "nice" in verdicts
    assert doc["payload"]["certificate"] is not None


def test_cli_sheets(tetra_off, capsys):
    code, out = run_cli(capsys, "sheets", str(tetra_off))
    assert code == 0
    planes = json.loads(out)["payload"]["planes"]
    assert len(planes) == 24
    code, out = run_cli(capsys, "sheets", "--export", "off", str(tetra_off))
    assert code == 0 and out.startswith("OFF\n")


def test_cli_audit(tmp_path, capsys, obtuse_triangle):
    path = tmp_path / "obtuse.json"
    write_polytope(obtuse_triangle, path)
    # values starting with a dash need the = form
    code, out = run_cli(capsys, "audit", "--from", "0,0.12", "--to=-0.7,0.03", str(path))
    assert code == 0
    crossings = json.loads(out)["payload"]["crossings"]
    assert any(abs(c["count_after"] - c["count_before"]) == 2 for c in crossings)


def test_cli_scan(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 3, "n_polytopes": 2, "facet_range": [4, 5],
                               "shape_family": "tangent_planes", "mc_samples": 1000}))
    code, out = run_cli(capsys, "scan", "--config", str(cfg))
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert "summary" in json.loads(lines[-1])


def test_cli_exit_codes(tetra_off, tmp_path, capsys):
    code, _ = run_cli(capsys, "count", "--point", "0,0", str(tetra_off))
    assert code == 2
    bad = tmp_path / "bad.off"
    bad.write_text("OFF\n1 0 0\nnope\n")
    code, _ = run_cli(capsys, "count", "--point", "0,0,0", str(bad))
    assert code == 2
    code, _ = run_cli(capsys, "count", "--point", "0,0,0", str(tmp_path / "missing.off"))
    assert code == 2


def test_cli_env_tolerance(tetra_off, capsys, monkeypatch):
    monkeypatch.setenv("POLYNORMAL_TOL", "1e-7")
    code, out = run_cli(capsys, "count", "--point", "0.05,0,0", str(tetra_off))
    assert code == 0
    assert json.loads(out)["parameters"]["tol"] == 1e-7


def test_cli_quiet(tetra_off, capsys):
    code, out = run_cli(capsys, "count", "--point", "0,0,0", "--quiet", str(tetra_off))
    assert code == 0 and out == ""
