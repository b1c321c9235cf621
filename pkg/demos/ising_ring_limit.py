#!/usr/bin/env python3
"""Push the quadratic ring toward the thermodynamic limit.

The translation-invariant transverse-field model is quadratic in the
fermions, so its second-moment relaxation is exact and has a closed
form to compare against.  The reduced parametrization keeps only one
circulant offset vector per moment family, which turns the moment
matrix into independent momentum sectors and lets chains of hundreds
of sites solve in seconds.

Prints a table of certified per-site energies against the closed form
for growing ring sizes and the exact infinite-chain value.
"""

import time

from fermibound.models import (
    ising_energy_per_site_limit,
    ising_exact_energy,
    ising_fermionic,
)
from fermibound.moments import objective_from_hamiltonian
from fermibound.solver import SolverConfig, solve
from fermibound.ti import TIEmbedding, ti_index_map

J_C = -1.0
H = 0.5


def main():
    cfg = SolverConfig(tau_energy=1e-8, tau_dykstra=1e-8)
    e_inf = ising_energy_per_site_limit(J_C, H)
    print(f"transverse-field ring, j_c={J_C}, h={H}")
    print(f"infinite-chain energy per site {e_inf:.10f}")
    print()
    print(f"{'N':>5} {'bound/site':>15} {'closed form':>15} "
          f"{'rel dev':>10} {'iters':>6} {'secs':>6}")
    for n in (10, 20, 50, 100, 200):
        spec = ising_fermionic(n, j_c=J_C, h=H, ti=True)
        emb = TIEmbedding(ti_index_map(n, "second", "parity"))
        obj = objective_from_hamiltonian(spec, emb)
        t0 = time.perf_counter()
        report = solve(obj, emb, cfg)
        dt = time.perf_counter() - t0
        exact = ising_exact_energy(n, J_C, H, ti=True)
        rel = abs(report.lower_bound - exact) / abs(exact)
        print(f"{n:>5} {report.lower_bound / n:>15.10f} {exact / n:>15.10f} "
              f"{rel:>10.1e} {report.iterations:>6} {dt:>6.2f}")
        assert rel < 1e-6
    print()
    print("the per-site bound approaches the infinite-chain value as 1/N;")
    print("every row matches its finite-size closed form to solver precision")


if __name__ == "__main__":
    main()
