import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from icap import capacity, cli, verify

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "examples" / "paper"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_fixture_copies_match_bundled():
    for path in sorted(FIXTURES.glob("ex*.json")):
        assert json.loads(path.read_text()) == json.loads(verify.fixture_text(path.stem))


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", FIXTURES / "ex1.json", "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["regimes"]["VeryStrong"]["satisfied"] is True
    assert "VeryStrong" in doc["satisfied"]


def test_sumrate_example3(capsys):
    code, out, _ = run(capsys, "sumrate", FIXTURES / "ex3.json", "--output", "json")
    assert code == 0
    assert json.loads(out)["value_nats"] == pytest.approx(5.6622, abs=1e-3)


def test_sumrate_not_in_regime_is_exit_1_and_tagged(capsys):
    code, out, _ = run(capsys, "sumrate", FIXTURES / "ex1.json", "--output", "json")
    assert code == 1
    doc = json.loads(out)
    assert doc["proven"] is False and "tag" in doc


def test_radius_nilpotent(capsys, tmp_path):
    p = tmp_path / "nilpotent2.json"
    p.write_text("[[0, 1], [0, 0]]")
    code, out, _ = run(capsys, "radius", "--matrix", p, "--output", "json")
    assert code == 0
    assert json.loads(out)["radius"] == pytest.approx(0.5, abs=1e-12)
    p.write_text('{"X": [[0, 1], [0, 0]]}')
    assert run(capsys, "radius", "--matrix", p)[0] == 0


def test_region_table_csv_json(capsys):
    code, out, _ = run(capsys, "region", FIXTURES / "ex2.json")
    assert code == 0
    lines = out.splitlines()
    assert sum(1 for l in lines if "<=" in l) == 3
    assert sum(1 for l in lines if l.strip().startswith("(")) == 5
    code, out, _ = run(capsys, "region", FIXTURES / "ex1.json", "--csv")
    rows = out.strip().splitlines()
    assert rows[0] == "R1,R2" and len(rows) == 5
    code, out, _ = run(capsys, "region", FIXTURES / "ex2.json", "--output", "json")
    doc = json.loads(out)
    assert len(doc["vertices"]) == 5 and doc["proven"] is True


def test_empty_region_single_vertex():
    region = capacity.region_from_limits(0.0, 0.0, 0.0)
    text = cli.render_region(region, "csv")
    assert text.splitlines() == ["R1,R2", "0.0,0.0"]


def test_units_bits(capsys):
    _, nats, _ = run(capsys, "sumrate", FIXTURES / "ex4.json", "--output", "json")
    _, bits, _ = run(capsys, "sumrate", FIXTURES / "ex4.json", "--output", "json", "--units", "bits")
    assert json.loads(bits)["value_bits"] == pytest.approx(json.loads(nats)["value_nats"] / math.log(2), abs=1e-12)
    _, rn, _ = run(capsys, "region", FIXTURES / "ex2.json", "--output", "json")
    _, rb, _ = run(capsys, "region", FIXTURES / "ex2.json", "--output", "json", "--units", "bits")
    for a, b in zip(json.loads(rn)["bounds"], json.loads(rb)["bounds"]):
        assert b["limit"] == pytest.approx(a["limit"] / math.log(2), abs=1e-12)


@pytest.mark.parametrize("cmd", ["classify", "sumrate", "riccati"])
def test_output_is_deterministic(capsys, cmd):
    a = run(capsys, cmd, FIXTURES / "ex5.json", "--output", "json")
    b = run(capsys, cmd, FIXTURES / "ex5.json", "--output", "json")
    assert a == b


def test_riccati_pair_document(capsys, tmp_path):
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"A1": [[0.3]], "A2": [[0.3]]}))
    code, out, _ = run(capsys, "riccati", p, "--output", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["feasible"] and "Sigma1" in doc
    p.write_text(json.dumps({"A1": [[0.7]], "A2": [[0.7]]}))
    assert run(capsys, "riccati", p)[0] == 1


def test_offset_override(capsys, tmp_path):
    p = tmp_path / "b.json"
    p.write_text(json.dumps({"B1": [[-0.2, 0.2, -0.4]], "B2": [[0.2, 1, 0.4]]}))
    code, out, _ = run(capsys, "riccati", FIXTURES / "ex4.json", "--offset-b", p, "--output", "json")
    assert code == 0
    assert json.loads(out)["offset_rule"] == "given"
    p.write_text(json.dumps({"B7": [[0]]}))
    assert run(capsys, "classify", FIXTURES / "ex4.json", "--offset-b", p)[0] == 2


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bogus"], 2),
        (["classify"], 2),
        (["classify", "/nonexistent.json"], 2),
        (["classify", "{p}/ex1.json", "--tol-eq", "-1"], 2),
        (["example", "9"], 2),
    ],
)
def test_usage_errors(capsys, argv, code):
    argv = [a.format(p=FIXTURES) for a in argv]
    got, out, err = run(capsys, *argv)
    assert got == code
    assert "icap: error[" in err


def test_malformed_instance(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"H1": [[1]]}')
    code, _, err = run(capsys, "classify", p)
    assert code == 2
    assert err.startswith("icap: error[ParseError]")
    p.write_text("not json")
    assert run(capsys, "classify", p)[0] == 2


def test_env_tolerance(capsys, monkeypatch):
    monkeypatch.setenv("ICAP_TOL_EQ", "abc")
    assert run(capsys, "classify", FIXTURES / "ex1.json")[0] == 2
    monkeypatch.setenv("ICAP_TOL_EQ", "1e-7")
    assert run(capsys, "classify", FIXTURES / "ex1.json")[0] == 0


def test_example_command(capsys):
    code, out, _ = run(capsys, "example", "2")
    assert code == 0 and out.startswith("Example 2: PASS")


def test_verify_all_examples_only(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify-all", "--examples-only", "--report", report)
    doc = json.loads(report.read_text())
    assert len(doc["examples"]) == 5
    assert code == (0 if doc["pass"] else 1)


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "icap.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("icap ")
