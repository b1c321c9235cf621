#!/usr/bin/env python3
"""Close the duality gap on a quadratic ring.

A projected-gradient solve of the moment relaxation gives a lower
bound, and an ascent on the dual of the same semidefinite program
gives a second, independent one.  When the two meet, the common value
is certified as the relaxation optimum without reference to any
external solver.  Quadratic models make the demonstration crisp:
their second-moment relaxation is tight, so primal, dual, and the
exact diagonalization all land on one number.
"""

from fermibound.models import ising_exact_energy, ising_fermionic
from fermibound.moments import objective_from_hamiltonian
from fermibound.solver import SolverConfig, gap, solve, solve_dual
from fermibound.ti import TIEmbedding, ti_index_map


def main():
    n = 10
    spec = ising_fermionic(n, j_c=-1.0, h=0.5, ti=True)
    emb = TIEmbedding(ti_index_map(n, "second", "parity"))
    obj = objective_from_hamiltonian(spec, emb)
    cfg = SolverConfig(tau_energy=1e-9, tau_dykstra=1e-10)

    primal = solve(obj, emb, cfg)
    dual = solve_dual(obj, emb, cfg)
    exact = ising_exact_energy(n, -1.0, 0.5, ti=True)

    print(f"transverse-field ring, N={n}")
    print(f"primal bound (minimization)  {primal.lower_bound:+.12f}")
    print(f"dual bound   (maximization)  {dual.lower_bound:+.12f}")
    print(f"duality gap                  {gap(primal, dual):+.2e}")
    print(f"exact diagonalization        {exact:+.12f}")
    print()

    g = gap(primal, dual)
    assert -1e-8 <= g <= 1e-6
    assert abs(primal.lower_bound - exact) / abs(exact) < 1e-6
    print("the gap certifies the primal value as the relaxation optimum,")
    print("and the quadratic model confirms it equals the true energy")

    combined = solve(obj, emb, SolverConfig(stop="gap", tau_gap=1e-6,
                                            tau_energy=1e-9,
                                            tau_dykstra=1e-10))
    print()
    print(f"single gap-stopped solve:    {combined.lower_bound:+.12f} "
          f"(gap {combined.duality_gap:+.2e}, {combined.termination})")


if __name__ == "__main__":
    main()
