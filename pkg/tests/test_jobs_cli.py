from __future__ import annotations

import json

import pytest
import structlog

from hh_cfrac.cli import main
from hh_cfrac.errors import MalformedInput, PrecisionLoss
from hh_cfrac.jobs import parse_job

QUARTIC = ["1", "0", "0", "0", "1"]
GENERIC = ["1", "0.3", "-0.7", "0.45", "1.3"]


@pytest.fixture
def job_file(tmp_path):
    def write(**fields):
        path = tmp_path / "job.json"
        path.write_text(json.dumps(fields), encoding="utf-8")
        return str(path)

    return write


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_expand_quartic(job_file, capsys):
    rc, out, _ = run(capsys, "expand", job_file(X=QUARTIC, y="1", depth=4))
    assert rc == 0
    doc = json.loads(out)
    assert doc["precision_bits"] == 256
    assert len(doc["nodes"]) == 5
    assert doc["chain"]["passed"]


def test_stdout_carries_only_the_artifact(job_file, capsys):
    structlog.reset_defaults()
    rc, out, err = run(capsys, "--log-level", "DEBUG", "expand", job_file(X=QUARTIC, y="1", depth=2))
    assert rc == 0
    assert out.startswith("{")
    assert json.loads(out)["genus"] == 1
    assert "DEBUG Registry registered command module" in err


def test_expand_output_is_deterministic(job_file, capsys):
    path = job_file(X=GENERIC, y="0.7+0.2i", depth=2)
    _, first, _ = run(capsys, "expand", path)
    _, second, _ = run(capsys, "expand", path)
    assert first == second


def test_out_option_writes_file(job_file, capsys, tmp_path):
    target = tmp_path / "tree.json"
    rc, out, _ = run(capsys, "expand", job_file(X=QUARTIC, y="1", depth=1), "--out", str(target))
    assert rc == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["genus"] == 1


def test_perfect_square_is_an_input_error(job_file, capsys):
    rc, _, err = run(capsys, "expand", job_file(X=["1", "0", "2", "0", "1"], y="1"))
    assert rc == 2
    assert "PerfectSquare" in err


def test_malformed_coefficient(job_file, capsys):
    rc, _, err = run(capsys, "expand", job_file(X=["1", "zz", "0", "0", "1"], y="1"))
    assert rc == 2
    assert "MalformedInput" in err


def test_unknown_field_and_missing_file(job_file, capsys, tmp_path):
    rc, _, _ = run(capsys, "expand", job_file(X=QUARTIC, y="1", colour="red"))
    assert rc == 2
    rc, _, _ = run(capsys, "expand", str(tmp_path / "missing.json"))
    assert rc == 2


def test_y_at_centre_is_a_numerical_degeneration(job_file, capsys):
    rc, _, err = run(capsys, "expand", job_file(X=QUARTIC, y="0"))
    assert rc == 3
    assert err.startswith("ERROR TAtZero")


def test_verify_generic_job(job_file, capsys):
    rc, out, _ = run(capsys, "verify", job_file(X=GENERIC, y="0.7+0.2i", depth=3))
    doc = json.loads(out)
    assert rc == 0, [c for c in doc["checks"] if not c["passed"]]
    names = {c["name"] for c in doc["checks"]}
    assert {"chain", "bal_uniqueness", "ramification", "approximation[1.1.1]"} <= names


def test_verify_reports_numerical_degeneration(job_file, capsys, monkeypatch):
    from hh_cfrac.commands import verify

    def lossy(job):
        raise PrecisionLoss("root residual above certification bound")

    monkeypatch.setattr(verify, "_ramification", lossy)
    rc, out, err = run(capsys, "verify", job_file(X=GENERIC, y="0.7+0.2i", depth=1))
    assert rc == 3
    doc = json.loads(out)
    assert not doc["passed"]
    [check] = [c for c in doc["checks"] if c["name"] == "ramification"]
    assert check == {
        "name": "ramification",
        "passed": False,
        "error": "PrecisionLoss",
        "reason": "root residual above certification bound",
    }
    assert "WARNING PrecisionLoss check not evaluated" in err


def test_convergents_table(job_file, capsys):
    rc, out, _ = run(capsys, "convergents", job_file(X=GENERIC, y="0.7+0.2i", depth=3), "--table")
    assert rc == 0
    assert out.startswith("path 1.1.1\ntheorem")


def test_convergents_best_choice(job_file, capsys):
    rc, out, _ = run(capsys, "convergents", job_file(X=GENERIC, y="0.7", depth=3, candidates=["0.7", "0", "inf"]))
    assert rc == 0
    assert json.loads(out)["best_choice"]["epsilon_first"]


def test_symmetry_even_seed(job_file, capsys):
    rc, out, _ = run(capsys, "symmetry", job_file(X=["1", "0", "0", "0", "-1"], y="1", depth=4))
    assert rc == 0
    doc = json.loads(out)
    assert doc["even_criterion"] == {"X(y)=0": True, "even_center_found": True}


def test_curve_and_index(job_file, capsys):
    rc, out, _ = run(capsys, "curve", job_file(X=QUARTIC, y="1", point_x="1"))
    assert rc == 0
    doc = json.loads(out)
    assert doc["ramification"]["deg_R_e"] == 4
    assert doc["ramification"]["deg_R_or"] == 4
    assert doc["index"]["agrees"]


def test_growth_csv(job_file, capsys):
    rc, out, _ = run(capsys, "growth", job_file(X=QUARTIC, y="1", point_x="1", depth=3), "--format", "csv")
    assert rc == 0
    assert out.splitlines() == ["level,raw_count,distinct_count", "1,2,1", "2,2,1", "3,2,1"]


def test_growth_needs_a_start(job_file, capsys):
    rc, _, _ = run(capsys, "growth", job_file(X=QUARTIC, y="1"))
    assert rc == 2


@pytest.mark.parametrize(
    "raw",
    [
        {"X": QUARTIC[:-1], "y": "1"},
        {"X": QUARTIC, "y": "1", "genus": 2},
        {"X": ["1", "0", "0"], "y": "1"},
        {"X": QUARTIC},
    ],
)
def test_job_validation(raw):
    with pytest.raises(MalformedInput):
        parse_job(raw)


def test_job_defaults():
    job = parse_job({"X": QUARTIC, "y": "1"})
    assert job.depth == 4
    assert job.policy == "all"
    assert job.precision_bits == 256
    assert job.resolved_genus() == 1
    assert job.resolved_order() == 2 * 6 + 8
