import json
from pathlib import Path

import pytest

from scatter import __version__
from scatter.cli import main
from scatter.diagram import equivalent
from scatter.formats import diagram_from_json, diagram_to_json, dumps, loads

from conftest import line_pair, single_wall

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def no_env_cache(monkeypatch):
    monkeypatch.delenv("SCATTER_CACHE", raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def fixture(name):
    return FIXTURES / name


def test_seed_init(capsys):
    code, out, _ = run(capsys, "seed-init", fixture("a2.json"), "--kind", "hdtv_x", "--order", 3)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "scatter/v1" and doc["meta"]["kind"] == "hdtv_x"
    assert len(doc["walls"]) == 2


def test_kronecker_hdtv_x_exit_3(capsys):
    code, out, err = run(capsys, "seed-init", fixture("kronecker.json"), "--kind", "hdtv_x",
                         "--order", 3)
    assert code == 3 and out == ""
    err_doc = json.loads(err)
    assert err_doc["exit_code"] == 3 and "not primitive" in err_doc["message"]


def test_input_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "check", tmp_path / "missing.json")
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "check", bad)[0] == 2
    rank3 = tmp_path / "r3.json"
    assert run(capsys, "seed-init", fixture("central3.json"), "--kind", "hdtv_x", "--order", 2,
               "--out", rank3)[0] == 0
    assert run(capsys, "plot", rank3)[0] == 2


def test_complete_and_check(capsys, tmp_path):
    out = tmp_path / "done.json"
    rep = tmp_path / "report.json"
    code, _, err = run(capsys, "complete", fixture("line_pair.json"), "--out", out, "--report", rep)
    assert code == 0 and "1 added" in err
    d, _ = diagram_from_json(loads(out.read_text()))
    assert len(d.walls) == 3
    report = json.loads(rep.read_text())
    assert report["kind"] == "completion-report" and len(report["added"]) == 1
    code, text, _ = run(capsys, "check", out)
    assert code == 0 and json.loads(text)["consistent"] is True
    # the report itself is accepted where a diagram is expected
    assert run(capsys, "check", rep)[0] == 0


def test_check_fails_on_inconsistent(capsys):
    code, text, _ = run(capsys, "check", fixture("line_pair.json"))
    assert code == 1
    doc = json.loads(text)
    assert doc["consistent"] is False and len(doc["failures"]) == 1


def test_cache_round_trip(capsys, tmp_path):
    cache = tmp_path / "cache"
    cold = run(capsys, "complete", fixture("line_pair.json"), "--cache", cache)
    entries = list(cache.rglob("*.json"))
    assert len(entries) == 1
    warm = run(capsys, "complete", fixture("line_pair.json"), "--cache", cache)
    assert cold[0] == warm[0] == 0 and cold[1] == warm[1]
    assert "cache hit" in warm[2]
    uncached = run(capsys, "complete", fixture("line_pair.json"))
    assert uncached[1] == cold[1] and not list(tmp_path.glob(".tmp-*"))


def test_cache_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("SCATTER_CACHE", str(tmp_path / "env"))
    run(capsys, "complete", fixture("line_pair.json"), "--order", 3)
    assert len(list((tmp_path / "env").rglob("*.json"))) == 1


def test_psi_then_equiv(capsys, tmp_path):
    ap, hx = tmp_path / "ap.json", tmp_path / "hx.json"
    apc, hxc, ps = tmp_path / "apc.json", tmp_path / "hxc.json", tmp_path / "psi.json"
    run(capsys, "seed-init", fixture("a2.json"), "--kind", "aprin", "--order", 4, "--out", ap)
    run(capsys, "seed-init", fixture("a2.json"), "--kind", "hdtv_x", "--order", 4, "--out", hx)
    run(capsys, "complete", ap, "--out", apc)
    run(capsys, "complete", hx, "--out", hxc)
    assert run(capsys, "psi", apc, "--out", ps)[0] == 0
    code, text, _ = run(capsys, "equiv", ps, hxc)
    assert code == 0 and json.loads(text)["equivalent"] is True
    assert run(capsys, "equiv", ps, hx)[0] == 1


def test_psi_needs_seed(capsys):
    assert run(capsys, "psi", fixture("line_pair.json"))[0] == 2


def test_psi_condition_exit_4(capsys, tmp_path):
    ap = tmp_path / "ap.json"
    run(capsys, "seed-init", fixture("a2.json"), "--kind", "aprin", "--order", 2, "--out", ap)
    doc = json.loads(ap.read_text())
    doc["walls"][0]["normal"] = [1, 1, 0, 1]  # tilted out of (n,0)^perp
    ap.write_text(json.dumps(doc))
    assert run(capsys, "psi", ap)[0] == 4


def test_theta_command(capsys):
    code, text, _ = run(capsys, "theta", fixture("single_wall.json"), "--m=-1,-1", "--p", "1/10,1")
    assert code == 0
    doc = json.loads(text)
    assert sorted(t["m"] for t in doc["series"]) == [[-1, -1], [0, -1]]
    again = run(capsys, "theta", fixture("single_wall.json"), "--m=-1,-1", "--p", "1/10,1")
    assert again[1] == text
    assert run(capsys, "theta", fixture("single_wall.json"), "--m=-1,-1", "--p", "1/3,0")[0] == 4


def test_multiply_command(capsys):
    code, text, _ = run(capsys, "multiply", fixture("single_wall.json"), "--m1", "1,0",
                        "--m2", "0,1")
    assert code == 0
    (row,) = json.loads(text)["rows"].values()
    assert list(row) == ["1,1"]
    for strategy in ("decomposition", "broken-pairs"):
        code, text, _ = run(capsys, "multiply", fixture("single_wall.json"), "--m1", "0,1",
                            "--m2=-1,-1", "--strategy", strategy)
        assert code == 0 and sorted(json.loads(text)["rows"]["0,1;-1,-1"]) == ["-1,0", "0,0"]
    # inconsistent diagrams are refused
    assert run(capsys, "multiply", fixture("line_pair.json"), "--m1", "1,0", "--m2", "0,1")[0] == 4


def test_plot(capsys, tmp_path):
    code, svg, _ = run(capsys, "plot", fixture("line_pair.json"))
    assert code == 0 and svg.startswith("<?xml") and svg.count('class="wall"') == 2
    done = tmp_path / "done.json"
    run(capsys, "complete", fixture("line_pair.json"), "--out", done)
    svg2 = run(capsys, "plot", done)[1]
    assert svg2.count('class="wall"') == 3
    assert run(capsys, "plot", done)[1] == svg2
    empty = tmp_path / "empty.json"
    empty.write_text(dumps(diagram_to_json(line_pair(2).with_walls([]), {})))
    assert run(capsys, "plot", empty)[1].count('class="wall"') == 0


@pytest.mark.parametrize("name", ["line_pair.json", "single_wall.json"])
def test_fixture_round_trip(name):
    text = fixture(name).read_text()
    d, meta = diagram_from_json(loads(text))
    assert dumps(diagram_to_json(d, meta)) == text


def test_seed_fixture_round_trip(capsys, tmp_path):
    for name in ("a2.json", "kronecker.json", "central3.json"):
        out = tmp_path / name
        assert run(capsys, "seed-init", fixture(name), "--kind", "aprin", "--order", 2,
                   "--out", out)[0] == 0
        d, meta = diagram_from_json(loads(out.read_text()))
        assert dumps(diagram_to_json(d, meta)) == out.read_text()


def test_fixtures_match_builders():
    assert diagram_from_json(loads(fixture("line_pair.json").read_text()))[0] == line_pair(8)
    assert equivalent(diagram_from_json(loads(fixture("single_wall.json").read_text()))[0],
                      single_wall(4))


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and __version__ in capsys.readouterr().out
