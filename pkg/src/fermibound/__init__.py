"""Certified lower bounds for fermionic lattice ground-state energies.

The package relaxes the ground-state problem to a semidefinite program
over moment matrices of low-order fermionic operators and solves it by
projected gradient descent with alternating projections.  Exact
diagonalization oracles are included for validation at small sizes.
"""

from .algebra import (
    MAX_ORDER,
    MomentExpression,
    UnsupportedOrderError,
    adjoint,
    canonical_term,
    canonicalize,
    filter_symmetry,
    translate,
)
from .blockmat import BlockMatrix, unvec_real, vec_real
from .models import (
    HamiltonianSpec,
    heisenberg_fermionic,
    ising_energy_per_site_limit,
    ising_exact_energy,
    ising_fermionic,
)
from .moments import (
    MomentEmbedding,
    MomentLayout,
    Objective,
    ParamTable,
    UnsupportedTermError,
    expected_param_count,
    half_filling_params,
    index_map,
    objective_from_hamiltonian,
)
from .oracle import (
    HEISENBERG_ENERGY_PER_SITE,
    exact_diagonalize,
    expectation,
    hamiltonian_matrix,
    moments_from_state,
    zz_correlations,
)
from .paramio import load_params, save_params
from .projections import (
    DykstraInfo,
    DykstraNonConvergedError,
    dykstra,
    project_psd,
)
from .solver import (
    SolveReport,
    SolverConfig,
    UnsupportedScopeError,
    gap,
    solve,
    solve_dual,
)
from .ti import (
    TIEmbedding,
    TILayout,
    dft_unitary,
    reorder_permutation,
    ti_index_map,
    ti_pair_order,
    ti_reducer,
    warm_start_extend,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_ORDER",
    "MomentExpression",
    "UnsupportedOrderError",
    "adjoint",
    "canonical_term",
    "canonicalize",
    "filter_symmetry",
    "translate",
    "BlockMatrix",
    "vec_real",
    "unvec_real",
    "HamiltonianSpec",
    "heisenberg_fermionic",
    "ising_energy_per_site_limit",
    "ising_exact_energy",
    "ising_fermionic",
    "MomentEmbedding",
    "MomentLayout",
    "Objective",
    "ParamTable",
    "UnsupportedTermError",
    "expected_param_count",
    "half_filling_params",
    "index_map",
    "objective_from_hamiltonian",
    "HEISENBERG_ENERGY_PER_SITE",
    "exact_diagonalize",
    "expectation",
    "hamiltonian_matrix",
    "moments_from_state",
    "zz_correlations",
    "load_params",
    "save_params",
    "DykstraInfo",
    "DykstraNonConvergedError",
    "dykstra",
    "project_psd",
    "SolveReport",
    "SolverConfig",
    "UnsupportedScopeError",
    "gap",
    "solve",
    "solve_dual",
    "TIEmbedding",
    "TILayout",
    "dft_unitary",
    "reorder_permutation",
    "ti_index_map",
    "ti_pair_order",
    "ti_reducer",
    "warm_start_extend",
    "__version__",
]
