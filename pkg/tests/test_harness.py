import json

import pytest

from delegation_lab import cli, mc
from delegation_lab.harness import (HEADER, ConfigError, ExperimentConfig, csv_text, load_configs,
                                    parse_dist, parse_joint, run_all, run_experiment,
                                    verify_all_configs)


def cfg(**kw):
    return ExperimentConfig.from_dict(kw)


@pytest.mark.parametrize("bad, where", [
    ({}, "config.experiment"),
    ({"experiment": "nope"}, "config.experiment"),
    ({"experiment": "prophet_half"}, "config.instance.pool"),
    ({"experiment": "prophet_half", "instance": {"pool": []}}, "config.instance.pool"),
    ({"experiment": "prophet_half", "instance": {"pool": [{"dist": {"uniform": [0, 1]}, "count": 0}]}},
     "config.instance.pool[0].count"),
    ({"experiment": "prophet_one_minus_inv_e", "instance": {"dist": {"bogus": 1}}}, "config.instance.dist"),
    ({"experiment": "prophet_0745", "instance": {"dist": {"uniform": [0, 1]}}, "n": 10}, "config.trials"),
    ({"experiment": "lemma_suite", "n": 0}, "config.n"),
    ({"experiment": "lemma_suite", "trials": -1}, "config.trials"),
    ({"experiment": "lemma_suite", "seed": "x"}, "config.seed"),
    ({"experiment": "lemma_suite", "colour": 1}, "config"),
    ({"experiment": "binary_mx", "instance": {}}, "config.instance"),
    ({"experiment": "binary_mx", "instance": {"boxes": [{"x": 1, "y": 1, "c": 5, "p": 0.5}]}},
     "config.instance.boxes"),
])
def test_config_errors_name_the_field(bad, where):
    with pytest.raises(ConfigError) as e:
        ExperimentConfig.from_dict(bad)
    assert e.value.where == where


def test_parsers():
    assert parse_dist({"point": 3}, "d").cdf(3) == 1
    assert parse_dist({"atoms": [[1, 0.5], [2, 0.5]]}, "d").mean() == pytest.approx(1.5)
    j = parse_joint({"product": {"x": {"uniform": [0, 1]}, "y": {"uniform": [0, 2]}}}, "j")
    assert j.independent()
    with pytest.raises(ConfigError):
        parse_joint({"product": {"x": {"uniform": [0, 1]}}}, "j")
    with pytest.raises(ConfigError):
        parse_joint({"points": [[1, 1, 0.3]]}, "j")


def test_load_configs(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiments": [{"experiment": "lemma_suite", "n": 3},
                                             {"experiment": "tightness_one_minus_inv_e"}]}))
    assert [c.experiment for c in load_configs(str(p))] == ["lemma_suite", "tightness_one_minus_inv_e"]
    p.write_text(json.dumps({"experiment": "lemma_suite", "n": 3}))
    assert len(load_configs(str(p))) == 1
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_configs(str(p))


def test_rows_and_csv_format():
    rows = run_experiment(cfg(experiment="prophet_one_minus_inv_e", instance={"dist": {"uniform": [0, 1]}}, n=1))
    assert len(rows) == 1 and rows[0].passed
    assert rows[0].ratio == pytest.approx(0.864664716763, abs=1e-12)
    text = csv_text(rows)
    lines = text.splitlines()
    assert lines[0].startswith("# delegation-lab") and mc.RNG_ID in lines[0]
    assert lines[1].split(",") == HEADER and HEADER[-1] == "pass"
    assert lines[2].endswith(",true")


def test_prophet_half_rows():
    pool = [{"dist": {"atoms": [[1, 0.9], [10, 0.1]]}}, {"dist": {"point": 2}}]
    rows = run_experiment(cfg(experiment="prophet_half", instance={"pool": pool}, n=2))
    assert len(rows) == 2 and all(r.passed and r.trials == 0 for r in rows)
    assert rows[0].mechanism_descriptor.startswith("mix q=")


def test_mc_rows_are_deterministic():
    c = cfg(experiment="prophet_half", instance={"pool": [{"dist": {"uniform": [0, 1]}, "count": 3}]},
            n=3, trials=20_000, seed=5)
    a, b = csv_text(run_all([c])), csv_text(run_all([c]))
    assert a == b
    other = ExperimentConfig.from_dict({**c.__dict__, "seed": 6})
    assert csv_text(run_all([other])) != a


def test_upper_rows_and_lemmas():
    r = run_experiment(cfg(experiment="tightness_one_minus_inv_e", instance={"phi_max": 3, "steps_per_unit": 100}))[0]
    assert r.passed and r.margin >= 0 and "argmax phi=1" in r.mechanism_descriptor
    rows = run_experiment(cfg(experiment="lemma_suite", n=5))
    assert rows and all(x.passed for x in rows)


def test_box_experiments_small():
    rows = run_experiment(cfg(experiment="binary_mx", instance={"random": {"count": 5, "m_max": 5}}, seed=1))
    assert len(rows) == 6 and all(r.passed for r in rows)
    boxes = [{"x": 10, "y": 2, "c": 0.5, "p": 0.5}, {"x": 4, "y": 10, "c": 0.5, "p": 0.5}]
    r = run_experiment(cfg(experiment="binary_mx", instance={"boxes": boxes}))[0]
    assert r.value_mech == pytest.approx(4.5) and "[9,inf)" in r.mechanism_descriptor
    rows = run_experiment(cfg(experiment="budgeted_0316", instance={"boxes": boxes, "budget": 1}))
    assert rows[0].value_benchmark == pytest.approx(4.5) and all(x.passed for x in rows)


def test_output_field_writes_csv(tmp_path):
    out = tmp_path / "sub" / "r.csv"
    run_experiment(cfg(experiment="lemma_suite", n=3, output=str(out)))
    assert out.read_text().splitlines()[1].split(",") == HEADER


def test_verify_all_shape():
    cfgs = verify_all_configs(42)
    names = [c.experiment for c in cfgs]
    assert names.count("prophet_half") == 9
    assert {c.seed for c in cfgs} == {42}


def test_cli_verbs(tmp_path, capsys):
    assert cli.main(["alpha"]) == 0
    assert "0.7454403321" in capsys.readouterr().out
    assert cli.main(["beta", "--n", "3"]) == 0
    assert "0.2309532046" in capsys.readouterr().out
    assert cli.main(["lemmas", "--n", "3"]) == 0
    assert cli.main(["beta", "--n", "1"]) == 2
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"experiment": "tightness_one_minus_inv_e",
                             "instance": {"phi_max": 2, "steps_per_unit": 50}}))
    out = tmp_path / "o.csv"
    assert cli.main(["run", str(p), "--out", str(out)]) == 0
    assert out.exists()
    p.write_text(json.dumps({"experiment": "bogus"}))
    assert cli.main(["run", str(p)]) == 2
