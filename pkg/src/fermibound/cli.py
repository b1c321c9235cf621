"""Command-line front end.

One invocation configures a model and a solver run, executes it, and
emits a machine-readable report.  Settings come from an optional JSON
config file whose keys match the flag names; explicit flags override
the file.  The report echoes the effective config so a run can be
reproduced from its own output.

Exit codes: 0 converged, 2 iteration budget exhausted, 1 runtime or
scope error, 64 unusable configuration.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import sys
import time

import numpy as np

from . import models, oracle
from .moments import (
    MomentEmbedding,
    UnsupportedTermError,
    index_map,
    objective_from_hamiltonian,
)
from .paramio import load_params, save_params
from .projections import DykstraNonConvergedError
from .solver import SolverConfig, UnsupportedScopeError, solve
from .ti import TIEmbedding, extend_rep_values, ti_index_map

_MODELS = ("ising", "heisenberg")
_MOMENTS = ("second", "fourth")
_STOPS = ("energy", "gap")
_DYKSTRA_STATS = ("norm", "squared")
_SYMMETRY_ALIASES = {
    "parity-only": "parity",
    "parity": "parity",
    "number-conserving": "number",
    "number": "number",
}
_TAU_GAP = 1e-6

_DEFAULTS = {
    "model": None,
    "sites": None,
    "jc": -1.0,
    "h": 0.5,
    "J": 0.5,
    "ti": False,
    "periodic": False,
    "moments": "second",
    "symmetry": None,
    "alpha0": None,
    "alpha": 0.1,
    "tau_e": 1e-7,
    "tau_dykstra": None,
    "dykstra_stat": "norm",
    "max_iters": 10000,
    "stop": "energy",
    "patience": 1,
    "warm_start": None,
    "oracle": False,
    "out": None,
    "trace": None,
    "plot_data": None,
    "threads": None,
    "save_params": None,
}


class UsageError(Exception):
    """Configuration that cannot be turned into a run."""


class ScopeError(Exception):
    """Valid-looking configuration outside the supported scope."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(64, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="fermibound",
        description=(
            "Certified lower bounds on ground-state energies of fermionic "
            "chains via a moment-matrix relaxation."
        ),
    )
    boolean = argparse.BooleanOptionalAction
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    p.add_argument("--model", choices=_MODELS, help="model family")
    p.add_argument("--sites", type=int, metavar="N", help="number of lattice sites")
    p.add_argument("--jc", type=float, help="Ising coupling j_c (default -1)")
    p.add_argument("--h", type=float, help="Ising transverse field (default 0.5)")
    p.add_argument("--J", type=float, help="Heisenberg exchange (default 0.5)")
    p.add_argument("--ti", action=boolean, help="translation-invariant model and solve path")
    p.add_argument("--periodic", action=boolean, help="periodic Heisenberg chain")
    p.add_argument("--moments", choices=_MOMENTS, help="relaxation level (default second)")
    p.add_argument(
        "--symmetry",
        choices=sorted(set(_SYMMETRY_ALIASES)),
        help="superselection sector; default: parity-only for ising, number-conserving for heisenberg",
    )
    p.add_argument("--alpha0", type=float, help="first step size (default: N)")
    p.add_argument("--alpha", type=float, help="step size after the first (default 0.1)")
    p.add_argument("--tau-e", type=float, dest="tau_e", help="energy-improvement stop (default 1e-7)")
    p.add_argument(
        "--tau-dykstra", type=float, dest="tau_dykstra",
        help="projection convergence threshold (default: the tau-e value)",
    )
    p.add_argument(
        "--dykstra-stat", choices=_DYKSTRA_STATS, dest="dykstra_stat",
        help=(
            "reading of tau-dykstra: 'norm' compares the root of the summed "
            "squared correction change, 'squared' the raw sum (default norm)"
        ),
    )
    p.add_argument("--max-iters", type=int, dest="max_iters", help="iteration budget (default 10000)")
    p.add_argument("--stop", choices=_STOPS, help="stopping rule (default energy)")
    p.add_argument(
        "--patience", type=int,
        help="consecutive sub-tau-e improvements required to stop (default 1)",
    )
    p.add_argument("--warm-start", dest="warm_start", metavar="PATH", help="parameter file to start from")
    p.add_argument("--oracle", action=boolean, help="compare against exact diagonalization (N <= 16)")
    p.add_argument("--out", metavar="PATH", help="write the report JSON here")
    p.add_argument("--trace", metavar="PATH", help="write the per-iteration trace CSV here")
    p.add_argument(
        "--plot-data", dest="plot_data", metavar="PREFIX",
        help="write PREFIX_sites.csv and PREFIX_iterations.csv",
    )
    p.add_argument("--threads", type=int, help="cap BLAS/LAPACK threads")
    p.add_argument("--save-params", dest="save_params", metavar="PATH", help="save converged parameters here")
    return p


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    out = {}
    for key, value in data.items():
        norm = str(key).replace("-", "_")
        if norm not in _DEFAULTS:
            raise UsageError(f"unknown config key {key!r}")
        out[norm] = value
    return out


def settings_from_argv(argv) -> dict:
    """Merge defaults, config file, and explicit flags, then validate."""
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    explicit = {k: v for k, v in args.items() if v is not None and k != "config"}
    cfg = dict(_DEFAULTS)
    if args.get("config"):
        cfg.update(_load_config_file(args["config"]))
    cfg.update(explicit)
    return _validated(cfg)


def _validated(cfg: dict) -> dict:
    if cfg["model"] not in _MODELS:
        raise UsageError("--model is required (ising or heisenberg)")
    if cfg["sites"] is None:
        raise UsageError("--sites is required")
    try:
        sites = int(cfg["sites"])
    except (TypeError, ValueError):
        raise UsageError("--sites must be an integer") from None
    if sites != float(cfg["sites"]) or sites < 2:
        raise UsageError("--sites must be an integer >= 2")
    cfg["sites"] = sites
    if cfg["moments"] not in _MOMENTS:
        raise UsageError(f"moments must be one of {_MOMENTS}")
    if cfg["stop"] not in _STOPS:
        raise UsageError(f"stop must be one of {_STOPS}")
    if cfg["symmetry"] is None:
        cfg["symmetry"] = "parity-only" if cfg["model"] == "ising" else "number-conserving"
    if cfg["symmetry"] not in _SYMMETRY_ALIASES:
        raise UsageError(f"symmetry must be one of {sorted(set(_SYMMETRY_ALIASES))}")
    for key in ("jc", "h", "J", "alpha", "tau_e"):
        cfg[key] = float(cfg[key])
    # the projection tolerance follows the energy tolerance unless pinned
    tau_d = cfg["tau_dykstra"]
    cfg["tau_dykstra"] = cfg["tau_e"] if tau_d is None else float(tau_d)
    if cfg["dykstra_stat"] not in _DYKSTRA_STATS:
        raise UsageError(f"dykstra-stat must be one of {_DYKSTRA_STATS}")
    if cfg["alpha0"] is not None:
        cfg["alpha0"] = float(cfg["alpha0"])
    cfg["max_iters"] = int(cfg["max_iters"])
    cfg["patience"] = int(cfg["patience"])
    if cfg["patience"] < 1:
        raise UsageError("--patience must be at least 1")
    if cfg["threads"] is not None:
        cfg["threads"] = int(cfg["threads"])
        if cfg["threads"] < 1:
            raise UsageError("--threads must be >= 1")
    for key in ("ti", "periodic", "oracle"):
        cfg[key] = bool(cfg[key])
    if cfg["tau_e"] <= 0 or cfg["tau_dykstra"] <= 0 or cfg["alpha"] <= 0:
        raise UsageError("step sizes and tolerances must be positive")
    if cfg["max_iters"] < 2:
        raise UsageError("--max-iters must be at least 2")
    return cfg


def _check_scope(cfg: dict) -> str:
    """Cross-field checks; returns the internal symmetry name."""
    symmetry = _SYMMETRY_ALIASES[cfg["symmetry"]]
    if cfg["stop"] == "gap" and cfg["moments"] != "second":
        raise ScopeError("the duality-gap stop needs a second-moment relaxation")
    if cfg["oracle"] and cfg["sites"] > oracle.MODE_LIMIT:
        raise ScopeError(
            f"exact-diagonalization comparison is limited to {oracle.MODE_LIMIT} sites"
        )
    if cfg["model"] == "ising":
        if symmetry == "number":
            raise ScopeError(
                "the transverse-field model has pairing terms; particle number "
                "is not conserved, use parity-only symmetry"
            )
        if cfg["periodic"]:
            raise ScopeError(
                "--periodic applies to the heisenberg model; the ring variant "
                "of ising is selected with --ti"
            )
    if cfg["model"] == "heisenberg" and cfg["ti"] and not cfg["periodic"]:
        raise ScopeError("a translation-invariant heisenberg solve needs --periodic")
    return symmetry


def _build_problem(cfg: dict, symmetry: str):
    if cfg["model"] == "ising":
        spec = models.ising_fermionic(cfg["sites"], j_c=cfg["jc"], h=cfg["h"], ti=cfg["ti"])
    else:
        spec = models.heisenberg_fermionic(cfg["sites"], j=cfg["J"], periodic=cfg["periodic"])
    if cfg["ti"]:
        embedding = TIEmbedding(ti_index_map(cfg["sites"], cfg["moments"], symmetry))
    else:
        embedding = MomentEmbedding(index_map(cfg["sites"], cfg["moments"], symmetry))
    objective = objective_from_hamiltonian(spec, embedding)
    return spec, embedding, objective


def _initial_params(cfg: dict, embedding, symmetry: str):
    if not cfg["warm_start"]:
        return None
    pf = load_params(cfg["warm_start"])
    if pf.signature == embedding.signature:
        return pf.params
    if (
        cfg["ti"]
        and pf.signature
        and pf.signature[0] == "ti"
        and (pf.level, pf.symmetry) == (cfg["moments"], symmetry)
    ):
        matched = extend_rep_values(pf.rep_values, pf.n_sites, embedding.table)
        return embedding.table.params_from_values(matched)
    raise ScopeError(
        "warm-start file does not match this run (need identical layout, or a "
        "translation-invariant layout at another size with the same level and symmetry)"
    )


def _exact_energy(cfg: dict, spec) -> tuple[float | None, str | None]:
    if cfg["oracle"]:
        energy, _ = oracle.exact_diagonalize(spec)
        return energy, "exact-diagonalization"
    if cfg["model"] == "ising":
        if cfg["ti"]:
            return models.ising_exact_energy(cfg["sites"], cfg["jc"], cfg["h"], ti=True), "closed-form"
        if cfg["sites"] % 2 == 0 and cfg["jc"] < 0:
            return models.ising_exact_energy(cfg["sites"], cfg["jc"], cfg["h"], ti=False), "closed-form"
    return None, None


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def energy_per_site_reference(model: str, cfg: dict) -> float:
    """Thermodynamic-limit energy per site for the plot reference line."""
    if model == "heisenberg":
        return oracle.HEISENBERG_ENERGY_PER_SITE(cfg["J"])
    return models.ising_energy_per_site_limit(cfg["jc"], cfg["h"])


def emit_plot_data(runs, sites_path: str, iterations_path: str) -> None:
    """Write plot-ready CSVs from one or more finished runs.

    `runs` is a list of (report_doc, trace) pairs sharing one model.
    The sites file holds one (N, e_N, e_inf) row per run; the
    iterations file holds the (k, E_k) series of the last run.
    """
    if not runs:
        raise ValueError("need at least one run")
    with open(sites_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "e_N", "e_inf"])
        for doc, _ in runs:
            e_inf = energy_per_site_reference(doc["model"], doc["config"])
            writer.writerow([doc["sites"], doc["lower_bound"] / doc["sites"], e_inf])
    _, trace = runs[-1]
    with open(iterations_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "E_k"])
        for entry in trace:
            writer.writerow([entry.iteration, entry.energy])


def _write_trace(path: str, trace) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "energy", "dykstra_sweeps", "elapsed_seconds"])
        for entry in trace:
            writer.writerow(
                [entry.iteration, entry.energy, entry.dykstra_sweeps, entry.elapsed_seconds]
            )


def run(cfg: dict) -> int:
    """Execute a validated configuration; returns the process exit code."""
    symmetry = _check_scope(cfg)
    t0 = time.perf_counter()
    spec, embedding, objective = _build_problem(cfg, symmetry)
    initial = _initial_params(cfg, embedding, symmetry)
    setup_seconds = time.perf_counter() - t0

    solver_cfg = SolverConfig(
        alpha0=cfg["alpha0"],
        alpha=cfg["alpha"],
        tau_energy=cfg["tau_e"],
        tau_dykstra=cfg["tau_dykstra"],
        tau_gap=_TAU_GAP,
        max_iters=cfg["max_iters"],
        stop=cfg["stop"],
        dykstra_stat=cfg["dykstra_stat"],
        patience=cfg["patience"],
    )
    if cfg["threads"] is not None:
        from threadpoolctl import threadpool_limits

        limiter = threadpool_limits(limits=cfg["threads"])
    else:
        limiter = contextlib.nullcontext()
    with limiter:
        report = solve(objective, embedding, solver_cfg, initial_params=initial)

    doc = {
        "model": cfg["model"],
        "sites": cfg["sites"],
        "lower_bound": report.lower_bound,
        "iterations": report.iterations,
        "termination": report.termination,
        "n_params": embedding.n_params,
    }
    exact, exact_source = _exact_energy(cfg, spec)
    if exact is not None:
        doc["exact_energy"] = exact
        doc["exact_source"] = exact_source
        doc["ratio"] = exact / report.lower_bound
        doc["relative_deviation"] = abs(report.lower_bound - exact) / abs(exact)
    if report.duality_gap is not None:
        doc["duality_gap"] = report.duality_gap
        doc["dual_bound"] = report.dual_bound
    if (
        cfg["model"] == "heisenberg"
        and cfg["moments"] == "fourth"
        and report.params is not None
    ):
        corr = oracle.zz_correlations(
            embedding.value_lookup(report.params),
            cfg["sites"],
            distances=(1, 2),
            j=cfg["J"],
            periodic=cfg["periodic"],
        )
        doc["correlations"] = {
            "zz": {str(d): v for d, v in corr.zz.items()},
            "energy_per_site_reference": corr.energy_per_site_reference,
            "zz_references": {str(d): v for d, v in corr.zz_references.items()},
        }
    doc["timings"] = {
        "setup_seconds": setup_seconds,
        "solve_seconds": report.wall_time,
        "total_seconds": time.perf_counter() - t0,
    }
    doc["tolerances"] = {
        "tau_e": cfg["tau_e"],
        "tau_dykstra": cfg["tau_dykstra"],
        "dykstra_stat": cfg["dykstra_stat"],
        "patience": cfg["patience"],
        "tau_gap": _TAU_GAP,
    }
    doc["config"] = {k: cfg[k] for k in _DEFAULTS}
    doc = _jsonable(doc)

    text = json.dumps(doc, indent=2)
    print(text)
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if cfg["trace"]:
        _write_trace(cfg["trace"], report.trace)
    if cfg["plot_data"]:
        emit_plot_data(
            [(doc, report.trace)],
            f"{cfg['plot_data']}_sites.csv",
            f"{cfg['plot_data']}_iterations.csv",
        )
    if cfg["save_params"]:
        if report.params is None:
            print("warning: no parameters to save", file=sys.stderr)
        else:
            save_params(cfg["save_params"], embedding, report.params)

    if report.termination == "max-iters":
        return 2
    if report.converged:
        return 0
    return 1


def run_from_argv(argv) -> int:
    try:
        cfg = settings_from_argv(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"fermibound: error: {exc}", file=sys.stderr)
        return 64
    try:
        return run(cfg)
    except (ScopeError, UnsupportedTermError, UnsupportedScopeError) as exc:
        print(f"fermibound: error: {exc}", file=sys.stderr)
        return 1
    except DykstraNonConvergedError as exc:
        print(
            f"fermibound: error: projection stalled: {exc} "
            f"({len(exc.trace)} iterations completed; loosen --tau-dykstra)",
            file=sys.stderr,
        )
        return 1
    except (OSError, ValueError) as exc:
        print(f"fermibound: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(run_from_argv(sys.argv[1:]))
