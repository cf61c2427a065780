import json

import pytest

from pathsearch.cli import OUT_ENV, main
from pathsearch.experiments import Scenario, UnsupportedScenarioError, read_records, run, scenario_json


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["run", "--family", "grid", "--size", "4", "4", "--reps", "5", "--seed", "1",
                 "--out", str(out), "--transcripts"])
    assert code == 0
    rows = read_records((out / "runs.csv").read_text())
    assert len(rows) == 5 and all(r.ok for r in rows)
    assert len(list((out / "transcripts").glob("*.jsonl"))) == 5
    assert capsys.readouterr().out.startswith("scenario,runs,min,max")


def test_bound_violation_sets_exit_code(tmp_path):
    code = main(["run", "--family", "grid", "--size", "8", "8", "--reps", "20", "--seed", "1",
                 "--out", str(tmp_path)])
    rows = read_records((tmp_path / "runs.csv").read_text())
    assert any(not r.upper_ok for r in rows)
    assert code == 1


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
    assert main(["run", "--family", "path", "--size", "8", "--searcher", "tree", "--oracle", "adversary"]) == 0
    assert (tmp_path / "env" / "summary.csv").exists()


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenarios": [
        {"name": "a", "family": "tree", "size": [20], "searcher": "tree", "seed": 3, "reps": 4},
        {"name": "b", "family": "grid", "size": [3, 3], "searcher": "separator", "oracle": "exhaustive"},
    ]}))
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert main(["report", str(tmp_path / "runs.csv")]) == 0


def test_bad_scenarios():
    with pytest.raises(UnsupportedScenarioError):
        Scenario.from_dict({"name": "x", "colour": "red"})
    with pytest.raises(UnsupportedScenarioError):
        run(Scenario("x", oracle="adversary", setting="S1"))
    with pytest.raises(UnsupportedScenarioError):
        run(Scenario("x"))  # random oracle without a seed
    with pytest.raises(UnsupportedScenarioError):
        run(Scenario("x", family="path", size=[5], searcher="bisection", seed=0))


def test_runs_are_deterministic():
    sc = Scenario("d", "grid", [5, 5], "S1", "A", "bisection", "random", 10, seed=7)
    assert [r.row() for r in run(sc)] == [r.row() for r in run(sc)]
    assert json.loads(scenario_json(sc))["seed"] == 7


def test_solve_and_relations(capsys):
    assert main(["solve", "--family", "path", "--size", "4", "--setting", "S2", "--kind", "B"]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("path4,0,S2,B,2,")
    assert main(["solve", "--family", "pendant", "--size", "4", "--relations"]) == 0
    assert "s_1/2 = " in capsys.readouterr().out


def test_separator_command(capsys):
    assert main(["separator", "--size", "3", "3"]) == 0
    assert len(json.loads(capsys.readouterr().out)["cut"]) == 3
    assert main(["separator", "--size", "8", "8", "--method", "hyperplane"]) == 0
    assert len(json.loads(capsys.readouterr().out)["cut"]) == 8
    assert main(["separator", "--family", "tree", "--size", "15", "--method", "centroid"]) == 0


def test_blowup_commands(tmp_path):
    assert main(["blowup", "build", "--seed", "3", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "blowup-2x2-seed3.json").exists()
    assert (tmp_path / "blowup-2x2-seed3.blocks.json").exists()
    assert main(["blowup", "verify", "--oracle", "adversary"]) == 0
    assert main(["blowup", "verify", "--dims", "2", "2", "2", "--seed", "5"]) == 0


def test_replay_command(tmp_path):
    out = tmp_path / "o"
    main(["run", "--family", "grid", "--size", "3", "3", "--seed", "2", "--out", str(out), "--transcripts"])
    (transcript,) = (out / "transcripts").glob("*.jsonl")
    from pathsearch.graph import Setting, build_grid, random_instance

    inst = random_instance(build_grid((3, 3)), 0, Setting.S2, 2)
    good = tmp_path / "inst.json"
    good.write_text(json.dumps(inst.to_json()))
    assert main(["replay", str(transcript), str(good)]) == 0
    # the search is a function of its answers, so another endpoint must disagree somewhere
    seed = 3
    while random_instance(build_grid((3, 3)), 0, Setting.S2, seed).endpoint == inst.endpoint:
        seed += 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(random_instance(build_grid((3, 3)), 0, Setting.S2, seed).to_json()))
    assert main(["replay", str(transcript), str(bad)]) == 1


def test_replay_blowup_export(tmp_path):
    main(["blowup", "build", "--seed", "1", "--out", str(tmp_path)])
    from pathsearch.blowup import build_good_system
    from pathsearch.graph import build_grid, gen_setting2
    from pathsearch.oracles import TruthfulOracle
    from pathsearch.searchers import grid_bisection_search

    base = build_grid((2, 2))
    gs = build_good_system(base, gen_setting2(base, 0, seed=1))
    blown = build_grid((8, 8))
    oracle = TruthfulOracle(blown, gs.instance, "B")
    grid_bisection_search(blown, oracle)
    tr = tmp_path / "t.jsonl"
    tr.write_text(oracle.transcript.to_jsonl())
    assert main(["replay", str(tr), str(tmp_path / "blowup-2x2-seed1.json")]) == 0


def test_usage_errors():
    with pytest.raises(SystemExit):
        main([])
    with pytest.raises(SystemExit):
        main(["separator", "--method", "magic"])
