import json

import pandas as pd
import pytest

import paqs
from rng import ShotStream


def run(capsys, *argv):
    code = paqs.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_situations_text(capsys):
    code, out, _ = run(capsys, "situations", "stern_gerlach")
    assert code == 0
    assert "QS(psi, z)" in out and "QS(psi, x)" in out
    assert "P_up" in out and "0.5" in out


def test_situations_json_reports_p_true_power(capsys):
    code, out, _ = run(capsys, "--format", "json", "situations", "eigenstate", "--basis", "z")
    assert code == 0
    doc = json.loads(out)
    pairs = doc["situations"][0]["pairs"]
    assert [(p["power"], p["potentia"]) for p in pairs] == [("P_up", 1.0), ("P_down", 0.0)]


def test_measure_eigenstate_counts(capsys):
    code, out, _ = run(capsys, "--format", "json", "measure", "eigenstate")
    assert code == 0
    experiment = json.loads(out)["experiments"][0]
    assert [p["count"] for p in experiment["powers"]] == [100, 0]
    assert experiment["psa_hash_before"] == experiment["psa_hash_after"]
    assert experiment["opposition"][0]["violations"] == 0


def test_measure_output_is_byte_stable(capsys):
    argv = ("--format", "json", "measure", "stern_gerlach", "--shots", "2000")
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == 0
    assert first[1] == second[1]


def test_measure_jobs_do_not_change_output(capsys):
    argv = ("measure", "generic", "--shots", "500")
    assert run(capsys, *argv)[1] == run(capsys, *argv, "--jobs", "4")[1]


def test_measure_without_seed_draws_one(capsys):
    code, out, _ = run(capsys, "measure", "stern_gerlach", "--psa", "psi", "--basis", "z", "--shots", "10")
    assert code == 0
    assert "No seed" in out and "drew seed" in out


def test_measure_needs_psa_and_basis_together(capsys):
    code, _, err = run(capsys, "measure", "stern_gerlach", "--psa", "psi")
    assert code == 2
    assert "together" in err


def test_measure_records_and_reports(capsys, tmp_path):
    db = str(tmp_path / "runs.db")
    csv = tmp_path / "summary.csv"
    assert run(capsys, "measure", "thirds", "--shots", "1000", "--record", "--db", db)[0] == 0
    assert run(capsys, "measure", "thirds", "--shots", "1000", "--seed", "5", "--record", "--db", db)[0] == 0
    code, out, _ = run(capsys, "report", "--db", db, "--export", str(csv))
    assert code == 0
    assert "thirds" in out
    summary = pd.read_csv(csv)
    assert list(summary["Runs"]) == [2, 2]
    assert list(summary["Shots"]) == [2000, 2000]
    code, out, _ = run(capsys, "report", "--db", db, "--clear")
    assert code == 0 and "Cleared 2" in out


def test_report_on_empty_ledger(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "--db", str(tmp_path / "none.db"))
    assert code == 0
    assert "No recorded runs" in out


def test_evolve_rabi(capsys):
    code, out, _ = run(capsys, "--format", "json", "evolve", "rabi")
    assert code == 0
    steps = json.loads(out)["steps"]
    assert [s["potentia"]["P_down"] for s in steps] == pytest.approx([0.0, 0.5, 1.0], abs=1e-9)


def test_evolve_without_block(capsys):
    code, _, err = run(capsys, "evolve", "stern_gerlach")
    assert code == 2
    assert "no evolution block" in err


@pytest.mark.parametrize("argv, expected", [
    (("logic", "check", "(A & ~A) -> B", "--expect", "invalid"), 0),
    (("logic", "check", "(A & ~A) -> B", "--expect", "valid"), 1),
    (("logic", "check", "(A & ~*A) -> B", "--expect", "valid"), 0),
    (("logic", "trivial", "A", "~A", "--expect", "nontrivial"), 0),
    (("logic", "trivial", "A", "~*A", "--expect", "trivial"), 0),
    (("logic", "trivial", "--scenario", "stern_gerlach", "--psa", "psi", "--basis", "z",
      "--expect", "nontrivial"), 0),
    (("logic", "trivial", "--scenario", "stern_gerlach", "--psa", "psi", "--basis", "z", "--reinforce",
      "--expect", "nontrivial"), 0),
])
def test_logic_exit_codes(capsys, argv, expected):
    assert run(capsys, *argv)[0] == expected


def test_logic_check_prints_countermodel(capsys):
    code, out, _ = run(capsys, "logic", "check", "(A & ~A) -> B")
    assert code == 0
    assert "INVALID" in out
    assert "B=0" in out and "~A=1" in out


def test_logic_trivial_reports_weak_contradictions(capsys):
    code, out, _ = run(capsys, "--format", "json", "logic", "trivial", "A & ~A")
    doc = json.loads(out)
    assert doc["classification"] == "weakly-inconsistent-nontrivial"
    assert doc["contradictions"] == ["A"]


def test_logic_syntax_error(capsys):
    code, _, err = run(capsys, "logic", "check", "A $ B")
    assert code == 2
    assert "position 2" in err


def test_logic_closure_cap(capsys):
    code, _, _ = run(capsys, "logic", "check", "A & B", "--max-closure", "2")
    assert code == 3


def test_logic_proof(capsys, tmp_path):
    good = tmp_path / "good.txt"
    good.write_text("A ; hyp\nA -> B ; hyp\nB ; mp 1 2\n")
    code, out, _ = run(capsys, "logic", "proof", str(good))
    assert code == 0 and "PROOF ACCEPTED: B" in out

    bad = tmp_path / "bad.txt"
    bad.write_text("A -> B ; axiom K\n")
    code, out, _ = run(capsys, "logic", "proof", str(bad))
    assert code == 1 and "REJECTED at step 1" in out

    code, _, _ = run(capsys, "logic", "proof", str(tmp_path / "missing.txt"))
    assert code == 2


def test_lattice_witness(capsys):
    code, out, _ = run(capsys, "lattice", "witness")
    assert code == 0
    assert "has rank 1 (equals c: True)" in out
    assert "a and c commute: False" in out
    assert run(capsys, "lattice", "witness", "--dim", "1")[0] == 2


def test_lattice_verify_small_run(capsys):
    code, out, _ = run(capsys, "--format", "json", "lattice", "verify", "--dim", "2", "3", "--trials", "20")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert {law["checked"] for law in doc["laws"]} == {20}


def test_missing_scenario_file(capsys, tmp_path):
    code, _, err = run(capsys, "situations", str(tmp_path / "nowhere.json"))
    assert code == 2
    assert err.startswith("❌")


def test_bad_environment(capsys, monkeypatch):
    monkeypatch.setenv("PAQS_MAX_DIM", "one")
    code, _, err = run(capsys, "lattice", "witness")
    assert code == 2
    assert "PAQS_MAX_DIM" in err


def test_one_seed_gives_each_block_its_own_stream(capsys):
    code, out, _ = run(capsys, "--format", "json", "measure", "stern_gerlach", "--seed", "5", "--shots", "100")
    assert code == 0
    z, x = json.loads(out)["experiments"]
    assert z["seed"] == ShotStream(5).for_path("psi", "z", 0).seed
    assert x["seed"] == ShotStream(5).for_path("psi", "x", 1).seed
    assert z["seed"] != x["seed"]


def test_explicit_block_keeps_the_given_seed(capsys):
    code, out, _ = run(capsys, "--format", "json", "measure", "stern_gerlach",
                       "--psa", "psi", "--basis", "z", "--seed", "5", "--shots", "100")
    assert json.loads(out)["experiments"][0]["seed"] == 5


def test_lattice_witness_json_reports_commutation(capsys):
    code, out, _ = run(capsys, "--format", "json", "lattice", "witness")
    assert code == 0
    assert json.loads(out)["a_c_commute"] is False


def test_programming_errors_are_not_reported_as_input_errors(monkeypatch):
    def broken(args):
        raise ValueError("bug")

    monkeypatch.setattr(paqs, "cmd_lattice_witness", broken)
    with pytest.raises(ValueError, match="bug"):
        paqs.main(["lattice", "witness"])
