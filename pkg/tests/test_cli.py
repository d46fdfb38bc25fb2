import json

import numpy as np
import pandas as pd
import pytest

from lssreduce.cli import EXIT_INVALID, EXIT_OK, EXIT_RANK, main, parse_per_mode
from lssreduce.generate import random_lss
from lssreduce.model import load_model, save_model
from lssreduce.subspaces import reach_space


@pytest.fixture
def model_path(tmp_path):
    return save_model(random_lss(8, 2, 1, 1, seed=3), tmp_path / "model.json")


def test_gen_writes_a_loadable_model(tmp_path):
    out = tmp_path / "gen.json"
    assert main(["gen", "--n", "5", "--D", "3", "--seed", "4", "--out", str(out)]) == EXIT_OK
    model = load_model(out)
    assert (model.n, model.D, model.m, model.p) == (5, 3, 1, 1)


def test_gen_is_deterministic(tmp_path):
    for name in ("a.json", "b.json"):
        main(["gen", "--n", "4", "--seed", "9", "--unstable", "--out", str(tmp_path / name)])
    assert (tmp_path / "a.json").read_text() == (tmp_path / "b.json").read_text()


def test_gen_with_per_mode_abscissa(tmp_path):
    out = tmp_path / "mixed.json"
    code = main(["gen", "--n", "6", "--seed", "2", "--abscissa", "1=-0.5,2=0.5", "--out", str(out)])
    assert code == EXIT_OK
    model = load_model(out)
    for q, target in ((1, -0.5), (2, 0.5)):
        assert np.max(np.linalg.eigvals(model.A(q)).real) == pytest.approx(target, abs=1e-9)


def test_reduce_n_match_writes_model_and_report(model_path, tmp_path):
    out, report = tmp_path / "r.json", tmp_path / "report.json"
    code = main(["reduce", "--model", str(model_path), "--method", "n-match", "--N", "1", "--mode", "R",
                 "--out", str(out), "--report", str(report)])
    assert code == EXIT_OK
    assert load_model(out).n == reach_space(load_model(model_path), 1).rank
    summary = json.loads(report.read_text())
    assert summary["matched_depth"] == 1
    assert summary["original_dim"] == 8
    assert summary["max_error"] <= 1e-8
    assert summary["check"] == "done"


def test_reduce_two_sided_guard_failure_exits_with_rank_code(model_path, tmp_path, capsys):
    code = main(["reduce", "--model", str(model_path), "--N", "1", "--mode", "T", "--out", str(tmp_path / "r.json")])
    assert code == EXIT_RANK
    assert "rank(V)=8" in capsys.readouterr().err
    assert not (tmp_path / "r.json").exists()


def test_reduce_invalid_model_exits_with_one(tmp_path):
    bad = tmp_path / "bad.json"
    data = random_lss(3, 2, seed=0).to_dict()
    data["modes"][1]["A"] = [[1.0, 0.0], [0.0, 1.0]]
    bad.write_text(json.dumps(data))
    assert main(["reduce", "--model", str(bad), "--N", "1", "--out", str(tmp_path / "r.json")]) == EXIT_INVALID


def test_missing_model_exits_with_one(tmp_path):
    assert main(["verify", "--model", str(tmp_path / "nope.json")]) == EXIT_INVALID


def test_reduce_sequence(model_path, tmp_path):
    report = tmp_path / "seq.json"
    code = main(["reduce", "--model", str(model_path), "--method", "sequence", "--upsilon", "12",
                 "--out", str(tmp_path / "r.json"), "--report", str(report)])
    assert code == EXIT_OK
    summary = json.loads(report.read_text())
    assert summary["method"] == "sequence"
    assert summary["upsilon"] == "12"
    assert summary["max_error"] <= 1e-6


def test_reduce_keeps_the_model_when_the_check_is_too_large(model_path, tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("LSS_MAX_WORDS", "5")
    out, report = tmp_path / "r.json", tmp_path / "seq.json"
    code = main(["reduce", "--model", str(model_path), "--method", "sequence", "--upsilon", "1212",
                 "--out", str(out), "--report", str(report)])
    assert code == EXIT_OK
    assert load_model(out).n <= 8
    summary = json.loads(report.read_text())
    assert summary["max_error"] is None
    assert summary["check"] == "skipped"
    assert "5" in summary["check_skipped"]
    assert "Check skipped" in capsys.readouterr().out


def test_reduce_nice_with_selected_dimension(model_path, tmp_path):
    sel, report = tmp_path / "sel.json", tmp_path / "nice.json"
    code = main(["reduce", "--model", str(model_path), "--method", "nice", "--select-dim", "4",
                 "--save-selection", str(sel), "--out", str(tmp_path / "r.json"), "--report", str(report)])
    assert code == EXIT_OK
    assert load_model(tmp_path / "r.json").n == 4
    assert json.loads(report.read_text())["selection_size"] == 4

    code = main(["reduce", "--model", str(model_path), "--method", "nice", "--selection", str(sel),
                 "--out", str(tmp_path / "r2.json")])
    assert code == EXIT_OK
    assert load_model(tmp_path / "r2.json").n == 4


def test_reduce_nice_rejects_selection_that_is_not_nice(model_path, tmp_path):
    sel = tmp_path / "sel.json"
    sel.write_text(json.dumps({"x0_words": [], "columns": [{"w": "12", "q": 1, "j": 1}]}))
    code = main(["reduce", "--model", str(model_path), "--method", "nice", "--selection", str(sel),
                 "--out", str(tmp_path / "r.json")])
    assert code == EXIT_INVALID


def test_reduce_nice_rejects_selection_outside_the_model(model_path, tmp_path):
    sel = tmp_path / "sel.json"
    sel.write_text(json.dumps({"x0_words": [""], "columns": [{"w": "", "q": 3, "j": 1}]}))
    code = main(["reduce", "--model", str(model_path), "--method", "nice", "--selection", str(sel),
                 "--out", str(tmp_path / "r.json")])
    assert code == EXIT_INVALID
    assert not (tmp_path / "r.json").exists()


def test_simulate_writes_csv(model_path, tmp_path):
    out = tmp_path / "y.csv"
    code = main(["simulate", "--model", str(model_path), "--switching", "1:0.7,2:0.3", "--dt", "0.01",
                 "--out", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t", "v1"]
    assert len(frame) == 101


def test_compare_with_itself(model_path, tmp_path):
    out = tmp_path / "results"
    code = main(["compare", "--model", str(model_path), "--reduced", str(model_path), "--seeds", "6",
                 "--dt", "0.01", "--out", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out / "bfr.csv")
    assert len(frame) == 6
    assert (frame["bfr"] == 100.0).all()
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["mean_bfr"] == 100.0
    assert (out / "traces.csv").exists()


def test_markov_and_verify(model_path, tmp_path):
    markov = tmp_path / "markov.json"
    assert main(["markov", "--model", str(model_path), "--N", "2", "--out", str(markov)]) == EXIT_OK
    data = json.loads(markov.read_text())
    assert len(data) == 7
    assert "" in data and "21" in data

    report = tmp_path / "verify.json"
    assert main(["verify", "--model", str(model_path), "--reduced", str(model_path), "--N", "2",
                 "--report", str(report)]) == EXIT_OK
    result = json.loads(report.read_text())
    assert result["max_markov_error"] == 0.0
    assert set(result) >= {"span_reachable", "observable", "minimal"}


def test_parse_per_mode():
    assert parse_per_mode("1=0.4,2=0.1") == {1: 0.4, 2: 0.1}
    assert parse_per_mode("0.2") == 0.2
    assert parse_per_mode("1=-0.5,2=0.5") == {1: -0.5, 2: 0.5}
