#!/usr/bin/env python3
"""Read spin correlations out of a certified moment matrix.

The relaxation does more than bound the energy: its optimizer is a
full table of second and fourth moments, and any observable built
from them can be evaluated directly.  This script solves the open
eight-site Heisenberg chain, converts the optimal moments into
z-correlations at distances one and two, and compares them with the
exact ground state of the same chain and with the known
infinite-chain values.
"""

from fermibound import oracle
from fermibound.models import heisenberg_fermionic
from fermibound.moments import MomentEmbedding, index_map, objective_from_hamiltonian
from fermibound.solver import SolverConfig, solve


def main():
    n = 8
    spec = heisenberg_fermionic(n, j=0.5, periodic=False)
    emb = MomentEmbedding(index_map(n, "fourth", "number"))
    obj = objective_from_hamiltonian(spec, emb)
    cfg = SolverConfig(tau_energy=1e-4, tau_dykstra=1e-4,
                       dykstra_stat="squared", patience=2)
    report = solve(obj, emb, cfg)
    print(f"open Heisenberg chain, N={n}: bound {report.lower_bound:+.6f} "
          f"after {report.iterations} iterations")

    solver = oracle.zz_correlations(
        emb.value_lookup(report.params), n, distances=(1, 2),
        j=0.5, periodic=False,
    )
    exact_energy, state = oracle.exact_diagonalize(spec)
    exact = oracle.zz_correlations(
        lambda mono: oracle.expectation(state, mono, n),
        n, distances=(1, 2), j=0.5, periodic=False,
    )
    print(f"exact ground-state energy:  {exact_energy:+.6f}")
    print()
    print(f"{'distance':>9} {'relaxation':>12} {'exact N=8':>12} "
          f"{'infinite chain':>15}")
    for d in (1, 2):
        print(f"{d:>9} {solver.zz[d]:>12.6f} {exact.zz[d]:>12.6f} "
              f"{solver.zz_references[d]:>15.8f}")
    print()
    print("the relaxed moments track the exact finite-chain correlations;")
    print("residual deviation from the infinite-chain numbers is the")
    print("finite-size effect, not a relaxation artifact")


if __name__ == "__main__":
    main()
