"""CLI surfaces, exit codes, report determinism."""

import json

import pytest

from treelab.cli import RunConfig, build_parser, main, run_suite


def strip_times(doc):
    """Drop wall-clock fields; everything else must be byte-stable."""

    def clean(x):
        if isinstance(x, dict):
            return {k: clean(v) for k, v in x.items() if k != "elapsed_s"}
        if isinstance(x, list):
            return [clean(v) for v in x]
        return x

    return clean(doc)


def test_verify_all_p2_passes(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(
        [
            "verify", "all", "--p", "2", "--e", "1", "--depth", "4",
            "--seed", "7", "--random", "3", "--json", str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["aggregate"] == "pass"
    assert doc["tool"] == "treelab"
    assert doc["reports"]


def test_corrpro_reports_expected_dimension(capsys):
    code = main(["verify", "corrpro", "--p", "3", "--depth", "4", "--module", "jbar"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    (rep,) = doc["reports"]
    assert rep["dims"]["dim_h0_fixed"] == 4


def test_replay_determinism():
    cfg = RunConfig(command="lemma21", p=3, seed=9, n_random=4)
    a = run_suite(cfg)
    b = run_suite(RunConfig(command="lemma21", p=3, seed=9, n_random=4))
    assert json.dumps(strip_times(a), sort_keys=True) == json.dumps(strip_times(b), sort_keys=True)


def test_jobs_do_not_change_the_reports():
    # the parallelism degree may differ in the config echo, but the report
    # list must be identical and identically ordered
    one = run_suite(RunConfig(command="all", p=2, seed=3, n_random=2, depth=2, jobs=1))
    two = run_suite(RunConfig(command="all", p=2, seed=3, n_random=2, depth=2, jobs=4))
    assert json.dumps(strip_times(one)["reports"], sort_keys=True) == json.dumps(
        strip_times(two)["reports"], sort_keys=True
    )
    assert one["aggregate"] == two["aggregate"]


def test_seed_required_for_randomized_runs():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "lemma21", "--p", "3"])
    assert exc.value.code == 2


def test_validation_bounds():
    for bad in (
        RunConfig(command="corrpro", p=11),
        RunConfig(command="corrpro", p=3, e=4),
        RunConfig(command="corrpro", p=3, depth=9),
        RunConfig(command="corrpro", p=3, module=""),
        RunConfig(command="lemma21", p=3, seed=None),
    ):
        with pytest.raises(ValueError):
            bad.validate()


def test_empty_module_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "corrpro", "--p", "3", "--depth", "2", "--module", ""])
    assert exc.value.code == 2


def test_unknown_module_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "corrpro", "--p", "3", "--depth", "2", "--module", "nope"])
    assert exc.value.code == 2


def test_reduce_command(tmp_path):
    out = tmp_path / "reduce.json"
    code = main(
        [
            "reduce", "--p", "3", "--depth", "3", "--module", "jbar",
            "--seed", "5", "--count", "3", "--json", str(out),
        ]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["aggregate"] == "pass"
    assert len(doc["runs"]) == 3
    for run in doc["runs"]:
        assert run["certificate_exact"] and run["in_edge_image"]


def test_catalog_emit_and_list(tmp_path, capsys):
    out = tmp_path / "cat.json"
    assert main(["catalog", "emit", "--p", "3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    names = [m["name"] for m in doc["modules"]]
    assert names == ["trivial", "steinberg", "jbar", "ps:0", "ps:1"]
    assert main(["catalog", "list", "--p", "2"]) == 0
    listed = capsys.readouterr().out
    assert "jbar" in listed and "steinberg" in listed


def test_hecke_cli_subset_of_checks(capsys):
    code = main(["verify", "hecke", "--p", "2", "--check", "dim,assoc"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    lemmas = {r["lemma"] for r in doc["reports"]}
    assert lemmas == {"hecke_dim", "jbar_star_invariants", "hecke_assoc"}


def test_parser_rejects_unknown_suite():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["verify", "bogus", "--p", "2"])
