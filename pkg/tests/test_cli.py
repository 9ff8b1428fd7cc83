import json
from importlib.resources import files

import pytest

from mdpst.cli import main

EXAMPLE = str(files("mdpst").joinpath("fixtures", "worked_example.json"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def hexfiles(tmp_path_factory):
    d = tmp_path_factory.mktemp("hex")
    assert main(["hexworld", "--nx", "10", "--ny", "5", "-o", str(d / "hex.json"),
                 "--layout-out", str(d / "lay.json")]) == 0
    assert main(["automaton", "--automaton", "fixture:persist_avoid", "-o", str(d / "ldba.json")]) == 0
    return d


def test_validate_model_and_truncated_json(tmp_path, capsys):
    assert run(capsys, "validate", EXAMPLE)[0] == 0
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": [')
    code, _, err = run(capsys, "validate", bad)
    assert code == 1 and "line 1" in err


def test_validate_reports_model_errors(tmp_path, capsys):
    d = json.loads(open(EXAMPLE).read())
    d["transitions"][0]["outcomes"][0]["prob"] = 0.5
    path = tmp_path / "m.json"
    path.write_text(json.dumps(d))
    code, out, _ = run(capsys, "validate", path)
    assert code == 1 and "probability mass" in out


def test_validate_automaton(hexfiles, capsys):
    code, out, _ = run(capsys, "validate", hexfiles / "ldba.json")
    assert code == 0 and "Ldba(states=4" in out


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "wr", "--nope")[0] == 2
    assert run(capsys, "synth", "-o", "x.json")[0] == 2


def test_missing_file(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/model.json")
    assert code == 1 and "error" in err


def test_product_reports_800_states(hexfiles, tmp_path, capsys):
    code, out, _ = run(capsys, "product", "--model", hexfiles / "hex.json", "--automaton",
                       hexfiles / "ldba.json", "-o", tmp_path / "p.json", "--dot", tmp_path / "p.dot")
    assert code == 0 and "800 states" in out
    assert (tmp_path / "p.dot").read_text().startswith("digraph")
    code, out, _ = run(capsys, "product", "--model", hexfiles / "hex.json", "--automaton",
                       "fixture:persist_avoid_dra", "-o", tmp_path / "d.json")
    assert code == 0 and "1600 states" in out


def test_worked_example_pipeline(tmp_path, capsys):
    code, out, _ = run(capsys, "wr", "--product", EXAMPLE, "-o", tmp_path / "wr.json")
    assert code == 0
    wr = json.loads((tmp_path / "wr.json").read_text())
    assert wr["states"] == [1, 2, 3] and len(wr["iterations"]) == 2
    code, out, _ = run(capsys, "oracle", "--product", EXAMPLE, "--objective", "reach",
                       "--targets", 1, 2, 3)
    assert code == 0 and out.strip() == "value 0.8"
    code, out, _ = run(capsys, "synth", "--product", EXAMPLE, "-o", tmp_path / "s.json",
                       "--report", tmp_path / "r.json", "--theta", "1e-9")
    assert code == 0 and out.startswith("value 0.8")
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["value"] == pytest.approx(0.8) and "T_sys" in report


def test_numeric_classifier_flag(tmp_path, capsys):
    code, _, _ = run(capsys, "wr", "--product", EXAMPLE, "-o", tmp_path / "wr.json",
                     "--classifier", "numeric", "--theta", "1e-9", "--kappa", "1e-2")
    assert code == 0
    assert json.loads((tmp_path / "wr.json").read_text())["states"] == [1, 2, 3]


def test_synth_and_simulate(hexfiles, tmp_path, capsys):
    code, out, _ = run(capsys, "synth", "--model", hexfiles / "hex.json", "--automaton",
                       hexfiles / "ldba.json", "-o", tmp_path / "s.json", "--round-robin")
    assert code == 0
    code, out, _ = run(capsys, "simulate", "--model", hexfiles / "hex.json", "--automaton",
                       hexfiles / "ldba.json", "--strategy", tmp_path / "s.json", "--runs", 50,
                       "--steps", 1000, "--seed", 3, "-o", tmp_path / "sim.json",
                       "--csv", tmp_path / "sim.csv", "--trajectory", tmp_path / "traj.csv")
    assert code == 0 and "satisfied 50/50" in out
    rows = (tmp_path / "traj.csv").read_text().splitlines()
    assert rows[1].split(",")[2] == "N"


def test_outputs_are_byte_identical(hexfiles, tmp_path, capsys):
    outs = []
    for k in range(2):
        strat, prod = tmp_path / f"s{k}.json", tmp_path / f"p{k}.json"
        run(capsys, "synth", "--model", hexfiles / "hex.json", "--automaton", hexfiles / "ldba.json",
            "-o", strat)
        run(capsys, "product", "--model", hexfiles / "hex.json", "--automaton", hexfiles / "ldba.json",
            "-o", prod)
        outs.append((strat.read_bytes(), prod.read_bytes()))
    assert outs[0] == outs[1]


def test_hexworld_layout_options(hexfiles, tmp_path, capsys):
    code, _, _ = run(capsys, "hexworld", "--nx", 10, "--ny", 5, "--layout", hexfiles / "lay.json",
                     "-o", tmp_path / "h.json")
    assert code == 0
    assert (tmp_path / "h.json").read_bytes() == (hexfiles / "hex.json").read_bytes()
    code, _, err = run(capsys, "hexworld", "--nx", 5, "--ny", 3, "-o", tmp_path / "x.json")
    assert code == 1 and "too small" in err
    code, _, err = run(capsys, "hexworld", "--nx", 8, "--ny", 5, "--layout", hexfiles / "lay.json",
                       "-o", tmp_path / "x.json")
    assert code == 1


def test_unknown_fixture(tmp_path, capsys):
    code, _, err = run(capsys, "automaton", "--automaton", "fixture:nope", "-o", tmp_path / "a.json")
    assert code == 1 and "unknown automaton fixture" in err
