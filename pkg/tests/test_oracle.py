"""Exact-diagonalization oracle: operator matrices, states, correlations."""

import numpy as np
import pytest

from fermibound.models import heisenberg_fermionic, ising_fermionic
from fermibound.moments import index_map
from fermibound.oracle import (
    HEISENBERG_ENERGY_PER_SITE,
    HEISENBERG_ZZ_D1,
    HEISENBERG_ZZ_D2,
    MODE_LIMIT,
    exact_diagonalize,
    expectation,
    hamiltonian_matrix,
    jw_annihilators,
    moments_from_state,
    monomial_matrix,
    spin_heisenberg_matrix,
    zz_correlation_direct,
    zz_correlations,
)


def test_car_relations():
    n = 3
    ops = [a.toarray() for a in jw_annihilators(n)]
    eye = np.eye(2**n)
    for i in range(n):
        for j in range(n):
            anti = ops[i] @ ops[j].conj().T + ops[j].conj().T @ ops[i]
            want = eye if i == j else 0.0 * eye
            assert np.allclose(anti, want, atol=1e-14)
            assert np.allclose(ops[i] @ ops[j] + ops[j] @ ops[i], 0.0, atol=1e-14)


def test_monomial_matrix_is_product():
    n = 3
    mono = ((1, True), (3, False), (2, False))
    got = monomial_matrix(mono, n).toarray()
    ops = jw_annihilators(n)
    want = ops[0].conj().T @ ops[2] @ ops[1]
    assert np.allclose(got, want.toarray(), atol=1e-14)


def test_vacuum_and_filled_expectations():
    n = 3
    vacuum = np.zeros(2**n)
    vacuum[-1] = 1.0
    filled = np.zeros(2**n)
    filled[0] = 1.0
    for k in range(1, n + 1):
        density = ((k, True), (k, False))
        assert abs(expectation(vacuum, density, n)) < 1e-14
        assert abs(expectation(filled, density, n) - 1.0) < 1e-14


def test_expectation_hermitian_pairing():
    rng = np.random.default_rng(7)
    n = 3
    state = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    state /= np.linalg.norm(state)
    mono = ((1, True), (2, False))
    flipped = ((2, True), (1, False))
    assert abs(expectation(state, mono, n) - np.conj(expectation(state, flipped, n))) < 1e-12


def test_ground_energy_matches_matrix():
    spec = ising_fermionic(4, j_c=-1.0, h=0.5)
    energy, state = exact_diagonalize(spec)
    ham = hamiltonian_matrix(spec).toarray()
    assert abs(np.vdot(state, ham @ state).real - energy) < 1e-10
    assert abs(np.linalg.norm(state) - 1.0) < 1e-12


def test_moments_from_state_gram():
    # Gram construction makes every block PSD and Hermitian
    spec = heisenberg_fermionic(4, j=0.5)
    _, state = exact_diagonalize(spec)
    layout = index_map(4, "fourth", "number")
    x = moments_from_state(state, layout)
    assert x.hermiticity_defect() < 1e-12
    assert x.min_eigenvalue() > -1e-12


def test_zz_direct_matches_spin_picture():
    n = 4
    spec = heisenberg_fermionic(n, j=0.5)
    _, fermi_state = exact_diagonalize(spec)
    vals, vecs = np.linalg.eigh(spin_heisenberg_matrix(n, 0.5))
    spin_state = vecs[:, 0]
    sz = np.diag([1.0, -1.0])

    def site_op(k):
        mats = [np.eye(2)] * n
        mats[k] = sz
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    for i, k in ((1, 2), (1, 3), (2, 4)):
        spin_val = np.vdot(spin_state, site_op(i - 1) @ site_op(k - 1) @ spin_state).real
        assert abs(zz_correlation_direct(fermi_state, i, k, n) - spin_val) < 1e-10


def test_zz_correlations_averages():
    n = 6
    spec = heisenberg_fermionic(n, j=0.5, periodic=True)
    _, state = exact_diagonalize(spec)
    report = zz_correlations(
        lambda mono: expectation(state, mono, n), n, distances=(1, 2), j=0.5
    )
    for d in (1, 2):
        direct = np.mean(
            [
                zz_correlation_direct(state, i, (i - 1 + d) % n + 1, n)
                for i in range(1, n + 1)
            ]
        )
        assert abs(report.zz[d] - direct) < 1e-12
    assert report.zz_references == {1: HEISENBERG_ZZ_D1, 2: HEISENBERG_ZZ_D2}
    assert abs(report.energy_per_site_reference - HEISENBERG_ENERGY_PER_SITE(0.5)) < 1e-14


def test_open_chain_averages_interior_pairs():
    n = 5
    spec = heisenberg_fermionic(n, j=0.5)
    _, state = exact_diagonalize(spec)
    report = zz_correlations(
        lambda mono: expectation(state, mono, n), n, distances=(2,), j=0.5, periodic=False
    )
    direct = np.mean([zz_correlation_direct(state, i, i + 2, n) for i in (1, 2, 3)])
    assert abs(report.zz[2] - direct) < 1e-12


def test_reference_constants():
    assert abs(HEISENBERG_ENERGY_PER_SITE(1.0) + 4.0 * (np.log(2.0) - 0.25)) < 1e-14
    assert abs(HEISENBERG_ZZ_D1 + 0.5908629074) < 1e-9
    assert abs(HEISENBERG_ZZ_D2 - 0.2427190798) < 1e-9


def test_mode_limit():
    with pytest.raises(ValueError):
        jw_annihilators(MODE_LIMIT + 1)
    with pytest.raises(ValueError):
        exact_diagonalize(ising_fermionic(MODE_LIMIT + 1))
