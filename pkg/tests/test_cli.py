from __future__ import annotations

import json

import pytest

from quatgen.cli import EXIT_INPUT, EXIT_OK, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_construct_case_a(capsys):
    code, out, _ = run(capsys, "construct", "-q", "3", "-R", "T,T+1")
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["odd"] == 1 and data["presentation"] == {"a": "T^2 + T", "b": "2"}
    assert data["ramified_places"] == ["T", "T + 1"] and data["ramification_ok"]


def test_construct_case_b(capsys):
    code, out, _ = run(capsys, "construct", "-q", "3", "-R", "T, T^2 + 1")
    data = json.loads(out)
    assert code == EXIT_OK and data["odd"] == 0
    assert data["ramified_places"] == ["T", "T^2 + 1"]
    assert not data["ramified_at_infinity"]


@pytest.mark.parametrize("argv", [
    ["construct", "-q", "3", "-R", "T"],
    ["construct", "-q", "4", "-R", "T,T+1"],
    ["construct", "-q", "3", "-R", "T2,T"],
    ["construct", "-q", "3"],
    ["frobnicate"],
])
def test_input_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_INPUT


@pytest.fixture(scope="module")
def quotient_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("q") / "case_b.json"
    assert main(["quotient", "-q", "3", "-R", "T,T^2+1", "--out", str(path)]) == EXIT_OK
    return path


def test_quotient_stats_and_reimport(capsys, quotient_file):
    data = json.loads(quotient_file.read_text())
    assert data["stats"]["V"] == 20 and data["stats"]["E"] == 40
    code, out, _ = run(capsys, "quotient", "--from-file", str(quotient_file))
    again = json.loads(out)
    assert code == EXIT_OK and again["stats"] == data["stats"]
    assert again["checks"]["vertex_count"]["ok"]


def test_quotient_dot(capsys):
    code, out, _ = run(capsys, "quotient", "-q", "3", "-R", "T,T+1", "--format", "dot")
    assert code == EXIT_OK and out.startswith("graph quotient {")


def test_generators_case_b(capsys, quotient_file):
    code, out, _ = run(capsys, "generators", "--from-file", str(quotient_file))
    data = json.loads(out)
    assert code == EXIT_OK
    assert data["edge_generators"] == 21 and data["max_norm"] <= data["theorem_bound"] == 26


def test_reduce(capsys, quotient_file):
    code, out, _ = run(capsys, "reduce", "2;0;0;0", "--from-file", str(quotient_file))
    data = json.loads(out)
    assert code == EXIT_OK and data["word"] == [] and data["scalar"] == 2
    code, _, _ = run(capsys, "reduce", "T;0;0;0", "--from-file", str(quotient_file))
    assert code == EXIT_INPUT


def test_verify_is_deterministic(capsys, quotient_file):
    argv = ["verify", "--from-file", str(quotient_file), "--samples", "40", "--seed", "3",
            "--ball-cap", "60"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == EXIT_OK and out1 == out2
    data = json.loads(out1)
    assert data["seed"] == 3 and data["distance_oracle"] == {"ok": True, "radius": 3, "vertices": 53}
    assert all(r["violations"] == [] for r in data["disjointness"].values())


def test_verify_case_a(capsys):
    code, out, _ = run(capsys, "verify", "-q", "3", "-R", "T,T+1", "--samples", "50", "--ball-cap", "20")
    assert code == EXIT_OK
    assert json.loads(out)["checks"]["vertex_count"]["ok"]


def test_tampered_file_is_rejected(capsys, quotient_file, tmp_path):
    data = json.loads(quotient_file.read_text())
    data["stats"]["diameter"] += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, _, err = run(capsys, "verify", "--from-file", str(bad), "--samples", "5")
    assert code == 3 and "diameter" in err
