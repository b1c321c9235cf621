"""Model builders and the closed-form Ising energies."""

import numpy as np
import pytest

from fermibound.models import (
    heisenberg_fermionic,
    ising_energy_per_site_limit,
    ising_exact_energy,
    ising_fermionic,
)
from fermibound.oracle import exact_diagonalize, spin_heisenberg_matrix


def test_ising_shape():
    n = 5
    spec = ising_fermionic(n, j_c=-1.0, h=0.5)
    # n bonds of four terms each plus one density term per site
    assert len(spec.terms) == 5 * n
    assert spec.constant == -0.5 * n
    assert spec.n_sites == n
    assert not spec.translation_invariant
    assert ising_fermionic(n, ti=True).translation_invariant


def test_ising_hermitian():
    for ti in (False, True):
        spec = ising_fermionic(6, j_c=-1.3, h=0.7, ti=ti)
        assert spec.hermiticity_defect() < 1e-14


def test_ising_boundary_signs():
    n = 4
    open_terms = ising_fermionic(n).term_dict()
    ring_terms = ising_fermionic(n, ti=True).term_dict()
    wrap_hop = ((n, True), (1, False))
    bulk_hop = ((1, True), (2, False))
    assert open_terms[wrap_hop] == -ring_terms[wrap_hop]
    assert open_terms[bulk_hop] == ring_terms[bulk_hop]


def test_ising_closed_form_vs_diagonalization():
    # ring form uses even momenta, the open chain odd momenta
    for n in (2, 3, 4, 5, 6):
        spec = ising_fermionic(n, j_c=-1.0, h=0.5, ti=True)
        energy, _ = exact_diagonalize(spec)
        assert abs(energy - ising_exact_energy(n, -1.0, 0.5, ti=True)) < 1e-10
    for n in (2, 4, 6, 8):
        spec = ising_fermionic(n, j_c=-1.0, h=0.5)
        energy, _ = exact_diagonalize(spec)
        assert abs(energy - ising_exact_energy(n, -1.0, 0.5, ti=False)) < 1e-10


def test_ising_closed_form_other_couplings():
    for j_c, h in ((-0.7, 0.3), (-2.0, 1.1)):
        spec = ising_fermionic(6, j_c=j_c, h=h, ti=True)
        energy, _ = exact_diagonalize(spec)
        assert abs(energy - ising_exact_energy(6, j_c, h, ti=True)) < 1e-10


def test_ising_energy_per_site_limit():
    # the mode sum converges to the Brillouin-zone integral
    limit = ising_energy_per_site_limit(-1.0, 0.5)
    big = ising_exact_energy(4096, -1.0, 0.5, ti=True) / 4096
    assert abs(limit - big) < 1e-9
    assert limit < 0.0


def test_heisenberg_shape():
    n = 6
    spec = heisenberg_fermionic(n, j=0.5)
    assert len(spec.terms) == 5 * (n - 1)
    assert spec.constant == 0.5 * (n - 1)
    assert not spec.translation_invariant
    ring = heisenberg_fermionic(n, j=0.5, periodic=True)
    assert len(ring.terms) == 5 * n
    assert ring.constant == 0.5 * n
    assert ring.translation_invariant


def test_heisenberg_hermitian():
    assert heisenberg_fermionic(5, j=0.25).hermiticity_defect() < 1e-14
    assert heisenberg_fermionic(5, j=0.25, periodic=True).hermiticity_defect() < 1e-14


def test_heisenberg_matches_spin_picture():
    # open chains map exactly onto J sum sigma.sigma; the periodic ring
    # is its own fermionic model (the wrap bond drops the parity string)
    for n in (4, 5, 6):
        spec = heisenberg_fermionic(n, j=0.5)
        fermionic, _ = exact_diagonalize(spec)
        spin = np.linalg.eigvalsh(spin_heisenberg_matrix(n, 0.5))[0]
        assert abs(fermionic - spin) < 1e-10


def test_heisenberg_ring_differs_from_spin_ring():
    spec = heisenberg_fermionic(4, j=0.5, periodic=True)
    fermionic, _ = exact_diagonalize(spec)
    spin = np.linalg.eigvalsh(spin_heisenberg_matrix(4, 0.5, periodic=True))[0]
    assert abs(fermionic - spin) > 1e-3


def test_heisenberg_coupling_scale():
    e1, _ = exact_diagonalize(heisenberg_fermionic(4, j=0.5))
    e2, _ = exact_diagonalize(heisenberg_fermionic(4, j=1.0))
    assert abs(e2 - 2.0 * e1) < 1e-10


def test_small_chains_rejected():
    with pytest.raises(ValueError):
        ising_fermionic(1)
    with pytest.raises(ValueError):
        heisenberg_fermionic(1)
