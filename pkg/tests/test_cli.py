import json
import subprocess
import sys
from pathlib import Path

import pytest

from isoreduce.cli import evaluate_request, main, run_suite
from isoreduce.reduction import CATALOG

DATA = Path(__file__).parent / "data"
FIXTURES = sorted((DATA / "fixtures").glob("*.json"))
MALFORMED = json.loads((DATA / "malformed" / "expected.json").read_text())

# values derived by hand for the fixture records
HAND_VALUES = {
    "e2_pos_ori": [[0, 1, 1, 0, 1]],
    "e3_aff_stiefel": [[1, 0, 3, 0, 4, 0, 4]],
    "o3_stiefel": [[0, 0, 1, 0, 0]],
    "se2_group": [[1, -1, 0, -2], [0, 0, 1, -1]],
    "se2_point": [[2, 1, 1, 1], [2, 1, 1, -1], [2, 8, 2, 0]],
    "se3_pos_ori": [[3, -1, 4, 2, 2, 2], [1, 0, 0, 1, 1, 0]],
    "so3_sphere": [[2, 2, 2, 1], [2, 2, 2, -1]],
}


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_listing(capsys):
    code, out, _ = run(["catalog", "--json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["count"] == 17
    by_key = {e["key"]: e for e in doc["entries"]}
    assert by_key["SE2/R2/point"]["features"] == 4
    assert by_key["E3/R3/aff-stiefel"]["features"] == 7
    code, out, _ = run(["catalog"], capsys)
    assert code == 0 and out.strip().endswith("17 configurations")
    assert "SE3/R3/pos-ori" in out


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.stem)
def test_eval_matches_golden_and_hand_values(path, tmp_path, capsys):
    outputs = []
    for i in range(2):
        target = tmp_path / f"run{i}.json"
        assert run(["eval", "--input", str(path), "--output", str(target)], capsys)[0] == 0
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0] == (DATA / "golden" / path.name).read_bytes()
    doc = json.loads(outputs[0])
    assert [r["values"] for r in doc["records"]] == HAND_VALUES[path.stem]
    assert doc["labels"] == list(CATALOG[doc["config"]].labels)


def test_context_passes_through(capsys):
    code, out, _ = run(["eval", "--input", str(DATA / "fixtures" / "se3_pos_ori.json")], capsys)
    assert code == 0
    recs = json.loads(out)["records"]
    assert recs[0]["context"] == [0.5, 7] and "context" not in recs[1]


def test_csv_output_matches_golden(tmp_path, capsys):
    target = tmp_path / "out.csv"
    assert run(["eval", "--input", str(DATA / "fixtures" / "se3_pos_ori.json"), "--output", str(target)], capsys)[0] == 0
    assert target.read_bytes() == (DATA / "golden" / "se3_pos_ori.csv").read_bytes()


@pytest.mark.parametrize("name", sorted(MALFORMED))
def test_malformed_exit_codes(name, capsys):
    code, out, err = run(["eval", "--input", str(DATA / "malformed" / name)], capsys)
    assert code == MALFORMED[name]["exit"]
    assert MALFORMED[name]["message"] in err
    assert out == ""


def test_config_flag_and_conflict(capsys):
    path = str(DATA / "fixtures" / "se2_point.json")
    assert run(["eval", "--config", "SE2/R2/point", "--input", path], capsys)[0] == 0
    code, _, err = run(["eval", "--config", "E2/R2/point", "--input", path], capsys)
    assert code == 2 and "conflicts" in err


def test_missing_input_file(capsys):
    assert run(["eval", "--input", "/nonexistent/request.json"], capsys)[0] == 2


def test_tolerance_option_projects_inputs():
    doc = {
        "config": "SO3/S2/sphere",
        "options": {"tol": 1e-6},
        "records": [{"s": [1 + 1e-8, 0, 0], "r": [0, 1, 0], "pose": {"kind": "sphere", "alpha": [0, 0, 1]}}],
    }
    assert evaluate_request(doc)["records"][0]["values"] == [2.0, 2.0, 2.0, 1.0]


def test_verify_chain_exit_zero(capsys):
    code, out, _ = run(["verify", "--suite", "chain", "--trials", "50"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["passed"] and report["results"][0]["max_residue"] <= 1e-9


def test_verify_threshold_violation_exit_one(capsys):
    # rounding leaves a nonzero deviation on a lifted entry, so tol 0 must fail
    argv = ["verify", "--suite", "invariance", "--config", "E3/R3/pos-ori", "--trials", "50", "--tol", "0"]
    code, out, err = run(argv, capsys)
    assert json.loads(out)["results"][0]["max_deviation"] > 0
    assert code == 1 and "FAIL invariance E3/R3/pos-ori" in err


def test_verify_bad_arguments(capsys):
    assert run(["verify", "--suite", "invariance", "--config", "nope", "--trials", "5"], capsys)[0] == 2
    assert run(["verify", "--suite", "chain", "--trials", "0"], capsys)[0] == 2
    assert run(["verify", "--suite", "cross-reduction", "--config", "E2/R2/point", "--trials", "5"], capsys)[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "bogus"])
    assert exc.value.code == 2


@pytest.mark.parametrize("suite", ["invariance", "separation", "canonicalizer", "cross-reduction", "chain"])
def test_verify_reports_are_deterministic(suite):
    config = "SE3/R3/pos-ori" if suite not in ("cross-reduction", "chain") else "all"
    a = run_suite(suite, config, seed=42, trials=20)
    b = run_suite(suite, config, seed=42, trials=20)
    assert a == b and a["passed"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "isoreduce", "eval", "--input", str(DATA / "malformed" / "long_alpha.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3 and "record 1" in proc.stderr
