import csv
import json

from fermibound.cli import run_from_argv
from fermibound.models import ising_energy_per_site_limit, ising_exact_energy


def run_json(capsys, argv):
    code = run_from_argv(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_usage_errors_exit_64(capsys):
    assert run_from_argv([]) == 64
    assert run_from_argv(["--model", "ising"]) == 64
    assert run_from_argv(["--model", "ising", "--sites", "1"]) == 64
    assert run_from_argv(
        ["--model", "ising", "--sites", "6", "--tau-e", "-1"]
    ) == 64
    assert run_from_argv(
        ["--model", "ising", "--sites", "6", "--patience", "0"]
    ) == 64
    capsys.readouterr()


def test_unknown_flag_exits_64(capsys):
    assert run_from_argv(["--model", "ising", "--sites", "6", "--frobnicate"]) == 64
    capsys.readouterr()


def test_ising_run_converges(capsys):
    code, doc = run_json(
        capsys,
        ["--model", "ising", "--sites", "8", "--ti", "--tau-e", "1e-8"],
    )
    assert code == 0
    assert doc["termination"] == "energy-improvement"
    exact = ising_exact_energy(8, -1.0, 0.5, ti=True)
    assert doc["exact_source"] == "closed-form"
    assert abs(doc["exact_energy"] - exact) < 1e-12
    assert doc["lower_bound"] <= exact + 1e-6
    assert doc["relative_deviation"] < 1e-6
    assert doc["tolerances"]["tau_dykstra"] == 1e-8
    assert doc["tolerances"]["dykstra_stat"] == "norm"
    assert doc["tolerances"]["patience"] == 1


def test_scope_errors_exit_1(capsys):
    cases = [
        ["--model", "ising", "--sites", "6", "--symmetry", "number-conserving"],
        ["--model", "ising", "--sites", "6", "--moments", "fourth", "--stop", "gap"],
        ["--model", "ising", "--sites", "20", "--oracle"],
        ["--model", "heisenberg", "--sites", "6", "--ti"],
        ["--model", "ising", "--sites", "6", "--periodic"],
    ]
    for argv in cases:
        assert run_from_argv(argv) == 1
        err = capsys.readouterr().err
        assert err.startswith("fermibound: error:")


def test_max_iters_exit_2(capsys):
    code, doc = run_json(
        capsys,
        ["--model", "heisenberg", "--sites", "4", "--moments", "fourth",
         "--max-iters", "3", "--tau-e", "1e-12"],
    )
    assert code == 2
    assert doc["termination"] == "max-iters"


def test_config_file_merge_and_override(capsys, tmp_path):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps({
        "model": "ising", "sites": 6, "ti": True, "tau-e": 1e-6,
    }))
    code, doc = run_json(capsys, ["--config", str(cfg_path)])
    assert code == 0
    assert doc["config"]["sites"] == 6
    assert doc["config"]["tau_e"] == 1e-6
    # explicit flag wins over the file
    code, doc = run_json(
        capsys, ["--config", str(cfg_path), "--tau-e", "1e-9"]
    )
    assert code == 0
    assert doc["config"]["tau_e"] == 1e-9

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"model": "ising", "sites": 6, "frobnicate": 1}))
    assert run_from_argv(["--config", str(bad)]) == 64
    capsys.readouterr()


def test_echoed_config_reproduces_the_run(capsys, tmp_path):
    code, doc = run_json(
        capsys,
        ["--model", "ising", "--sites", "6", "--ti", "--tau-e", "1e-8",
         "--dykstra-stat", "norm", "--patience", "2"],
    )
    assert code == 0
    echo = tmp_path / "echo.json"
    echo.write_text(json.dumps(doc["config"]))
    code2, doc2 = run_json(capsys, ["--config", str(echo)])
    assert code2 == 0
    assert doc2["lower_bound"] == doc["lower_bound"]
    assert doc2["config"] == doc["config"]


def test_report_and_trace_files(capsys, tmp_path):
    out = tmp_path / "report.json"
    trace = tmp_path / "trace.csv"
    code, doc = run_json(
        capsys,
        ["--model", "ising", "--sites", "6", "--ti",
         "--out", str(out), "--trace", str(trace)],
    )
    assert code == 0
    assert json.loads(out.read_text()) == doc
    with open(trace, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["iteration", "energy", "dykstra_sweeps", "elapsed_seconds"]
    assert len(rows) - 1 == doc["iterations"]
    assert float(rows[-1][1]) == doc["lower_bound"]


def test_plot_data_files(capsys, tmp_path):
    prefix = str(tmp_path / "plot")
    code, doc = run_json(
        capsys,
        ["--model", "ising", "--sites", "10", "--ti", "--plot-data", prefix],
    )
    assert code == 0
    with open(prefix + "_sites.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["N", "e_N", "e_inf"]
    n, e_n, e_inf = rows[1]
    assert int(n) == 10
    assert abs(float(e_n) - doc["lower_bound"] / 10) < 1e-12
    assert abs(float(e_inf) - ising_energy_per_site_limit(-1.0, 0.5)) < 1e-12
    with open(prefix + "_iterations.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "E_k"]
    assert len(rows) - 1 == doc["iterations"]


def test_save_and_warm_start_roundtrip(capsys, tmp_path):
    params = tmp_path / "params.json"
    code, doc = run_json(
        capsys,
        ["--model", "ising", "--sites", "6", "--ti", "--save-params", str(params)],
    )
    assert code == 0
    assert params.exists()
    code2, doc2 = run_json(
        capsys,
        ["--model", "ising", "--sites", "6", "--ti", "--warm-start", str(params)],
    )
    assert code2 == 0
    assert abs(doc2["lower_bound"] - doc["lower_bound"]) < 1e-6
    # warm start carries across ring sizes on the ti path
    code3, doc3 = run_json(
        capsys,
        ["--model", "ising", "--sites", "10", "--ti", "--warm-start", str(params)],
    )
    assert code3 == 0
    assert doc3["termination"] == "energy-improvement"
    # but not onto an incompatible layout
    assert run_from_argv(
        ["--model", "ising", "--sites", "6", "--warm-start", str(params)]
    ) == 1
    capsys.readouterr()


def test_oracle_comparison(capsys):
    code, doc = run_json(
        capsys,
        ["--model", "heisenberg", "--sites", "4", "--moments", "fourth",
         "--oracle", "--tau-e", "1e-8"],
    )
    assert code == 0
    assert doc["exact_source"] == "exact-diagonalization"
    assert doc["lower_bound"] <= doc["exact_energy"] + 1e-6
    assert "correlations" in doc
    assert "1" in doc["correlations"]["zz"]


def test_gap_stop_report(capsys):
    code, doc = run_json(
        capsys,
        ["--model", "ising", "--sites", "6", "--stop", "gap"],
    )
    assert code == 0
    assert doc["termination"] == "duality-gap"
    assert abs(doc["duality_gap"]) <= 1e-6
    assert doc["dual_bound"] <= doc["lower_bound"] + 1e-6
