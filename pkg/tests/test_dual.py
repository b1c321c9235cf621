import pytest

from fermibound import oracle
from fermibound.models import ising_exact_energy, ising_fermionic
from fermibound.moments import MomentEmbedding, index_map, objective_from_hamiltonian
from fermibound.solver import (
    SolverConfig,
    UnsupportedScopeError,
    gap,
    solve,
    solve_dual,
)
from fermibound.ti import TIEmbedding, ti_index_map


def ising_problem(n, ti=True):
    spec = ising_fermionic(n, ti=ti)
    if ti:
        emb = TIEmbedding(ti_index_map(n, "second", "parity"))
    else:
        emb = MomentEmbedding(index_map(n, "second", "parity"))
    return spec, emb, objective_from_hamiltonian(spec, emb)


TIGHT = SolverConfig(tau_energy=1e-9, tau_dykstra=1e-10)


def test_weak_duality_along_both_traces():
    # every dual value certifies every primal value from above
    _, emb, obj = ising_problem(6)
    primal = solve(obj, emb, TIGHT)
    dual = solve_dual(obj, emb, TIGHT)
    best_dual = max(entry.energy for entry in dual.trace)
    least_primal = min(entry.energy for entry in primal.trace)
    assert best_dual <= least_primal + 1e-8


def test_gap_vanishes_at_convergence():
    _, emb, obj = ising_problem(8)
    primal = solve(obj, emb, TIGHT)
    dual = solve_dual(obj, emb, TIGHT)
    g = gap(primal, dual)
    assert -1e-8 <= g <= 1e-6
    assert gap(dual, primal) == g


def test_dual_bound_is_certified():
    spec, emb, obj = ising_problem(6, ti=False)
    dual = solve_dual(obj, emb, TIGHT)
    exact, _ = oracle.exact_diagonalize(spec)
    assert dual.lower_bound <= exact + 1e-8
    assert dual.role == "dual"
    assert dual.converged


def test_dual_trace_is_nondecreasing():
    _, emb, obj = ising_problem(6)
    dual = solve_dual(obj, emb, TIGHT)
    values = [entry.energy for entry in dual.trace]
    for earlier, later in zip(values, values[1:]):
        assert later >= earlier - 10 * TIGHT.tau_dykstra
    assert dual.trace[-1].energy == dual.lower_bound


def test_dual_matches_closed_form():
    _, emb, obj = ising_problem(6)
    exact = ising_exact_energy(6, -1.0, 0.5, ti=True)
    dual = solve_dual(obj, emb, TIGHT)
    # the second-moment relaxation is tight for the quadratic model
    assert dual.lower_bound == pytest.approx(exact, abs=1e-6)
    assert dual.lower_bound <= exact + 1e-8


def test_fourth_moment_dual_rejected():
    spec = ising_fermionic(4)
    emb = MomentEmbedding(index_map(4, "fourth", "parity"))
    obj = objective_from_hamiltonian(spec, emb)
    with pytest.raises(UnsupportedScopeError):
        solve_dual(obj, emb, TIGHT)
    with pytest.raises(UnsupportedScopeError):
        solve(obj, emb, SolverConfig(stop="gap"))


def test_gap_requires_matching_reports():
    _, emb6, obj6 = ising_problem(6)
    _, emb8, obj8 = ising_problem(8)
    p6 = solve(obj6, emb6, TIGHT)
    d8 = solve_dual(obj8, emb8, TIGHT)
    with pytest.raises(ValueError):
        gap(p6, d8)
    p6b = solve(obj6, emb6, TIGHT)
    with pytest.raises(ValueError):
        gap(p6, p6b)
