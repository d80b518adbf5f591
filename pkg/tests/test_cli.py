import json
import math

import pytest

from hybridnet.cli import (ALGORITHMS, EXIT_FAIL, EXIT_OK, EXIT_USAGE, ExperimentSpec, fit_scaling,
                           load_report, main, make_graph, read_config, run_experiment, run_one,
                           spec_from_mapping, summarize)
from hybridnet.graph import path_graph


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def last_json(text):
    return json.loads(text.strip().splitlines()[-1])


# --- experiments --------------------------------------------------------------

def test_mst_single_record(tmp_path):
    out = tmp_path / "r.jsonl"
    recs = run_experiment(ExperimentSpec("mst", n=[16]), out)
    assert len(recs) == 1 and recs[0]["correct"] is True
    lines = load_report(out)
    assert len(lines) == 2 and lines[-1]["summary"] is True and lines[-1]["runs"] == 1


def test_empty_grid_warns(tmp_path):
    out = tmp_path / "empty.jsonl"
    with pytest.warns(RuntimeWarning):
        assert run_experiment(ExperimentSpec("girth", n=[]), out) == []
    assert out.read_text() == ""


def test_same_spec_same_bytes(tmp_path):
    spec = ExperimentSpec("learn-rand", n=[24, 32], seeds=[1, 2])
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(spec, a)
    run_experiment(spec, b)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("algorithm", sorted(ALGORITHMS))
def test_every_algorithm_runs_correctly(algorithm):
    family = "clique" if algorithm == "apsp-unweighted" else "random-m"
    W = 1 if algorithm in ("apsp-unweighted", "girth") or algorithm.startswith("cycles") else 9
    spec = ExperimentSpec(algorithm, family=family, n=[14], W=W)
    rec = run_one(spec, 14, 0)
    assert rec["correct"] is True and rec["violations"] == 0


def test_record_round_trips_to_the_same_run():
    spec = ExperimentSpec("diameter-vt", n=[30], seeds=[4], W=5, plugin="exact")
    rec = run_one(spec, 30, 4)
    again = dict(rec["spec"])
    again["n"] = [again["n"]]
    again["seeds"] = [again.pop("seed")]
    assert run_one(spec_from_mapping(again), 30, 4) == rec


def test_unknown_algorithm_and_family():
    with pytest.raises(ValueError):
        ExperimentSpec("quantum").validate()
    with pytest.raises(ValueError):
        ExperimentSpec("mst", family="torus").validate()
    with pytest.raises(ValueError):
        spec_from_mapping({"algorithm": "mst", "colour": "red"})


def test_make_graph_families():
    for fam in ("path", "cycle", "clique", "tree", "random-m", "bounded-degree"):
        g = make_graph(fam, 12, 0)
        assert g.n == 12 and g.connected


def test_summary_is_pure():
    recs = [{"rounds": 3, "correct": True}, {"rounds": 5, "correct": False}]
    assert summarize(recs) == summarize(list(recs))
    assert summarize(recs)["failed"] == 1


# --- scaling fits ---------------------------------------------------------------

def test_fit_linear_and_sqrt():
    xs = [16, 64, 256, 1024]
    s, r2 = fit_scaling([{"n": x, "rounds": x} for x in xs])
    assert s == pytest.approx(1.0) and r2 == pytest.approx(1.0)
    s, _ = fit_scaling([{"n": x, "rounds": math.sqrt(x)} for x in xs])
    assert s == pytest.approx(0.5)


def test_fit_degenerate_inputs():
    with pytest.raises(ValueError):
        fit_scaling([{"n": x, "rounds": x} for x in (1, 2, 3)])
    with pytest.raises(ValueError):
        fit_scaling([{"n": x, "rounds": 7} for x in (1, 2, 3, 4)])
    with pytest.raises(ValueError):
        fit_scaling([{"n": x, "rounds": 0} for x in (1, 2, 3, 4)])


def test_fit_reads_report_files(tmp_path):
    out = tmp_path / "rep.jsonl"
    run_experiment(ExperimentSpec("learn-det", n=[32, 64, 128, 256]), out)
    slope, r2 = fit_scaling(str(out))
    assert 0 < slope <= 0.75


# --- configuration --------------------------------------------------------------

def test_read_config(tmp_path):
    p = tmp_path / "exp.cfg"
    p.write_text("# experiment\nalgorithm = girth\nn = 16, 32\nseeds=1 2 # two seeds\nm-factor = 3\n")
    cfg = read_config(p)
    assert cfg == {"algorithm": "girth", "n": "16, 32", "seeds": "1 2", "m_factor": "3"}
    spec = spec_from_mapping(cfg)
    assert spec.n == [16, 32] and spec.seeds == [1, 2] and spec.m_factor == 3.0
    p.write_text("just words\n")
    with pytest.raises(ValueError, match="key=value"):
        read_config(p)


def test_flags_override_config(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("n = 40\nfamily = path\n")
    code, out, _ = run_cli(capsys, "girth", "--config", str(p), "--n", "12")
    rec = last_json(out)
    assert code == EXIT_OK and rec["n"] == 12 and rec["spec"]["family"] == "path"


def test_seed_environment_variable(monkeypatch, capsys):
    monkeypatch.setenv("HYBRIDNET_SEED", "17")
    _, out, _ = run_cli(capsys, "learn", "--mode", "rand", "--n", "20")
    assert last_json(out)["seed"] == 17
    _, out, _ = run_cli(capsys, "learn", "--mode", "rand", "--n", "20", "--seed", "3")
    assert last_json(out)["seed"] == 3


# --- subcommands and exit codes ----------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["learn", "--n", "24"],
    ["apsp", "--n", "24", "--W", "20"],
    ["apsp", "--unweighted", "--n", "24", "--eps", "0.5"],
    ["cuts", "--n", "14", "--W", "9"],
    ["girth", "--family", "cycle", "--n", "11"],
    ["mst", "--n", "30", "--W", "100"],
    ["diameter", "--mode", "rv", "--family", "bounded-degree", "--n", "40"],
    ["diameter", "--mode", "virtual-tree", "--plugin", "exact", "--n", "40", "--W", "7"],
    ["cycles", "--op", "detect", "--r", "5", "--n", "20"],
    ["cycles", "--op", "count", "--r", "4", "--n", "20"],
])
def test_algorithm_subcommands(argv, capsys):
    code, out, _ = run_cli(capsys, *argv)
    assert code == EXIT_OK and last_json(out)["correct"] is True


def test_usage_errors(capsys, tmp_path):
    assert run_cli(capsys)[0] == EXIT_USAGE
    assert run_cli(capsys, "teleport")[0] == EXIT_USAGE
    assert run_cli(capsys, "learn", "--n", "ten")[0] == EXIT_USAGE
    assert run_cli(capsys, "learn", "--graph", str(tmp_path / "missing.txt"))[0] == EXIT_USAGE
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2 u w\n1 2 1\n1 2 4\n")
    code, _, err = run_cli(capsys, "girth", "--graph", str(bad))
    assert code == EXIT_USAGE and "line 3" in err


def test_help_exits_zero(capsys):
    assert run_cli(capsys, "--help")[0] == EXIT_OK


def test_capacity_violation_exits_one(capsys):
    code, _, err = run_cli(capsys, "learn", "--n", "20", "--preset", "CONGEST")
    assert code == EXIT_FAIL and "capacity" in err


def test_graph_file_input(tmp_path, capsys):
    p = tmp_path / "g.txt"
    p.write_text(path_graph(9).dumps())
    code, out, _ = run_cli(capsys, "learn", "--graph", str(p), "--outputs")
    rec = last_json(out)
    assert code == EXIT_OK and rec["n"] == 9 and "outputs" in json.dumps(rec)


# --- gadget and oracle ------------------------------------------------------------

def test_gadget_hex_witness(capsys):
    code, out, _ = run_cli(capsys, "gadget", "--kind", "radius-bcc", "--k", "2",
                           "--x-hex", "2", "--y-hex", "2", "--verify")
    rec = last_json(out)
    assert code == EXIT_OK and rec["intersecting"] is True
    assert rec["verdict"]["observed"] == 3 and rec["verdict"]["claim_holds"] is True


def test_gadget_hex_errors(capsys):
    assert run_cli(capsys, "gadget", "--kind", "radius-bcc", "--x-hex", "zz", "--y-hex", "0")[0] == EXIT_USAGE
    assert run_cli(capsys, "gadget", "--kind", "radius-bcc", "--x-hex", "1f", "--y-hex", "0")[0] == EXIT_USAGE
    assert run_cli(capsys, "gadget", "--kind", "radius-bcc", "--x-hex", "1")[0] == EXIT_USAGE


def test_gadget_random_disjoint_and_emit(tmp_path, capsys):
    g = tmp_path / "inst.txt"
    code, out, _ = run_cli(capsys, "gadget", "--kind", "dgirth-hybrid", "--k", "4", "--ell", "2",
                           "--random-disjoint", "--seed", "5", "--verify", "--emit-graph", str(g))
    rec = last_json(out)
    assert code == EXIT_OK and rec["intersecting"] is False
    assert g.read_text().startswith(f"{rec['n']} {rec['m']} d")


def test_gadget_mincut_and_experimental_gate(capsys):
    code, out, _ = run_cli(capsys, "gadget", "--kind", "mincut-hard", "--n", "20", "--weight", "20",
                           "--verify")
    assert code == EXIT_OK and last_json(out)["verdict"]["claim_holds"] is True
    assert run_cli(capsys, "gadget", "--kind", "detect5cycle", "--k", "3")[0] == EXIT_USAGE
    code, out, _ = run_cli(capsys, "gadget", "--kind", "detect5cycle", "--k", "3", "--experimental",
                           "--verify")
    assert code == EXIT_OK and last_json(out)["verdict"]["experimental"] is True


def test_oracle_subcommand(tmp_path, capsys):
    p = tmp_path / "c6.txt"
    p.write_text("6 6 u u\n1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n")
    code, out, _ = run_cli(capsys, "oracle", "--op", "radius", "--graph", str(p))
    res = last_json(out)["result"]
    assert code == EXIT_OK and res["radius"] == 3 and res["diameter"] == 3
    _, out, _ = run_cli(capsys, "oracle", "--op", "cycles", "--r", "6", "--graph", str(p))
    assert last_json(out)["result"] == 1
    _, out, _ = run_cli(capsys, "oracle", "--op", "mincut", "--graph", str(p))
    assert last_json(out)["result"]["value"] == 2


def test_bench_writes_report_and_fit(tmp_path, capsys):
    out = tmp_path / "bench.jsonl"
    code, stdout, _ = run_cli(capsys, "bench", "--algorithm", "learn-det", "--n", "32,64,128,256",
                              "--seeds", "0", "--out", str(out), "--fit")
    summary = last_json(stdout)
    assert code == EXIT_OK and summary["runs"] == 4 and summary["slope"] <= 0.75
    assert len(load_report(out)) == 5


def test_verify_subset(capsys):
    code, out, _ = run_cli(capsys, "verify", "--quick", "--only", "5,6")
    lines = out.strip().splitlines()
    assert code == EXIT_OK
    assert sum(line.startswith("[PASS]") for line in lines) == 2
