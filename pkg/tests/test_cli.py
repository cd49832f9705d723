import json

import pytest

from flexslice.cli import main
from flexslice.topology import load_graph

from test_harness import TINY_GRAPH, TINY_TEMPLATE


@pytest.fixture
def files(tmp_path):
    (tmp_path / "g.json").write_text(json.dumps(TINY_GRAPH))
    (tmp_path / "t.json").write_text(json.dumps(TINY_TEMPLATE))
    return tmp_path


def test_topo_gen_and_load(tmp_path, capsys):
    out = tmp_path / "ft.json"
    assert main(["topo", "gen", "6-ary", "--out", str(out)]) == 0
    net = load_graph(out.read_text())
    assert (len(net.node_ids), len(net.link_ends)) == (99, 324)
    assert main(["topo", "load", str(out)]) == 0
    assert "99 nodes, 324 directed links" in capsys.readouterr().out


def test_solve_writes_report_and_csv(files, capsys):
    args = ["solve", "--topology", str(files / "g.json"), "--slices", str(files / "t.json"), "--count", "2",
            "--setting", "k1", "--algo", "bfn", "--seed", "4", "--out", str(files / "r.json"), "--csv", str(files / "r.csv")]
    assert main(args) == 0
    report = json.loads((files / "r.json").read_text())
    assert report["scenario"]["setting"] == "k1-only" and report["scenario"]["seed"] == 4
    assert (files / "r.csv").read_text().startswith("label,")
    assert "accepted" in capsys.readouterr().out


def test_solve_beta_inf(files):
    args = ["solve", "--topology", str(files / "g.json"), "--slices", str(files / "t.json"), "--count", "1",
            "--algo", "bnb", "--beta", "inf", "--out", str(files / "r.json")]
    assert main(args) == 0
    assert json.loads((files / "r.json").read_text())["scenario"]["beta"] is None


def test_bad_setting_is_reported(files, capsys):
    assert main(["solve", "--topology", "2-ary", "--setting", "k7", "--out", str(files / "r.json")]) == 2
    assert "error:" in capsys.readouterr().err
    assert not (files / "r.json").exists()


def test_export_and_import(files, capsys):
    common = ["--topology", str(files / "g.json"), "--slices", str(files / "t.json"), "--count", "1"]
    assert main(["export-lp", *common, "--out", str(files / "m.lp")]) == 0
    text = (files / "m.lp").read_text()
    assert text.startswith("\\") and "Binary" in text
    (files / "sol.txt").write_text("")
    assert main(["import-solution", *common, str(files / "sol.txt")]) == 0
    assert "accepted 0/1" in capsys.readouterr().out


def test_compare(files):
    spec = {
        "base": {"topology": str(files / "g.json"), "template": str(files / "t.json"), "count": 2},
        "variants": [{"setting": "flexible"}, {"setting": "k1"}, {"algorithm": "bfn"}],
    }
    (files / "c.json").write_text(json.dumps(spec))
    assert main(["compare", "--specs", str(files / "c.json"), "--out", str(files / "c.csv")]) == 0
    assert len((files / "c.csv").read_text().strip().splitlines()) == 4
