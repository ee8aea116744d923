import pandas as pd
import pytest

import experiment_db
import experiment_report
from errors import ConfigError
from powers import run_experiment


@pytest.fixture
def db(tmp_path):
    return str(tmp_path / "ledger" / "runs.db")


def _record(db, scenario, seed, shots=1000):
    qs = scenario.situation("psi", "z")
    result = run_experiment(qs, shots, seed)
    return experiment_db.record_run(db, result, scenario.name, "abc123"), result


def test_missing_ledger_is_empty(db):
    runs = experiment_db.load_runs(db)
    assert runs.empty
    assert list(runs.columns) == experiment_db.RUN_COLUMNS
    assert experiment_db.clear_runs(db) == 0


def test_record_and_load(db, thirds):
    run_id, result = _record(db, thirds, 2024)
    assert run_id == 1
    runs = experiment_db.load_runs(db)
    assert list(runs["power"]) == ["P_up", "P_down"]
    assert list(runs["count"]) == list(result.counts)
    assert set(runs["seed"]) == {"2024"}
    assert set(runs["generator"]) == {"PCG64"}


def test_large_seeds_survive_storage(db, thirds):
    _record(db, thirds, 2 ** 64 - 1, shots=10)
    assert experiment_db.load_runs(db)["seed"].iloc[0] == str(2 ** 64 - 1)


def test_clear_runs(db, thirds):
    _record(db, thirds, 1)
    _record(db, thirds, 2)
    assert experiment_db.clear_runs(db) == 2
    assert experiment_db.load_runs(db).empty


def test_unwritable_ledger(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ConfigError):
        experiment_db.connect(str(blocker / "runs.db"))


def test_summary_pools_runs(db, thirds, stern_gerlach):
    _, first = _record(db, thirds, 1)
    _, second = _record(db, thirds, 2)
    _record(db, stern_gerlach, 3)
    summary = experiment_report.summarize_runs(experiment_db.load_runs(db))
    assert list(summary.columns) == experiment_report.SUMMARY_COLUMNS
    thirds_rows = summary[summary["Scenario"] == "thirds"]
    assert list(thirds_rows["Runs"]) == [2, 2]
    assert list(thirds_rows["Count"]) == [a + b for a, b in zip(first.counts, second.counts)]
    assert thirds_rows["Potentia"].iloc[0] == pytest.approx(1 / 3)
    assert (summary["Deviation"] <= summary["Bound"]).all()


def test_summary_of_nothing():
    summary = experiment_report.summarize_runs(pd.DataFrame(columns=experiment_db.RUN_COLUMNS))
    assert summary.empty


def test_show_and_export(db, thirds, tmp_path, capsys):
    _record(db, thirds, 1)
    summary = experiment_report.summarize_runs(experiment_db.load_runs(db))
    experiment_report.show_summary(summary)
    assert "🟢" in capsys.readouterr().out
    path = experiment_report.export_report_to_csv(summary, str(tmp_path / "out" / "summary.csv"))
    assert list(pd.read_csv(path)["Power"]) == ["P_up", "P_down"]
