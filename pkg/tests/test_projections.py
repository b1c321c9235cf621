"""PSD clamp and Dykstra's alternating projections."""

import numpy as np
import pytest

from fermibound.blockmat import BlockMatrix
from fermibound.models import heisenberg_fermionic
from fermibound.moments import MomentEmbedding, index_map
from fermibound.oracle import exact_diagonalize, moments_from_state
from fermibound.projections import (
    DykstraNonConvergedError,
    dykstra,
    project_psd,
)


def test_psd_clamp_diagonal():
    got = project_psd(np.diag([2.0, -3.0]))
    assert np.allclose(got, np.diag([2.0, 0.0]), atol=1e-14)


def test_psd_clamp_hermitizes():
    # non-Hermitian input is averaged with its adjoint before clamping
    got = project_psd(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.allclose(got, 0.25 * np.ones((2, 2)), atol=1e-14)


def test_psd_idempotent_and_batched():
    rng = np.random.default_rng(3)
    batch = rng.normal(size=(4, 5, 5))
    once = project_psd(batch)
    assert once.shape == batch.shape
    assert np.allclose(project_psd(once), once, atol=1e-12)
    for mat in once:
        assert np.linalg.eigvalsh(mat)[0] > -1e-12


def test_psd_blockmatrix():
    x = BlockMatrix((np.diag([1.0, -1.0]), np.array([[-2.0]])))
    got = project_psd(x)
    assert np.allclose(got.blocks[0], np.diag([1.0, 0.0]))
    assert np.allclose(got.blocks[1], np.zeros((1, 1)))


def _line_projection(total):
    def proj(x):
        shift = (total - (x.blocks[0][0, 0] + x.blocks[1][0, 0]).real) / 2.0
        return BlockMatrix(tuple(b + shift for b in x.blocks))

    return proj


def _point(a, b):
    return BlockMatrix((np.array([[float(a)]]), np.array([[float(b)]])))


def test_dykstra_scalar_corner():
    # intersection of {x + y = 1} with the nonnegative quadrant is a
    # segment; the nearest point to (-1, 0.3) is its corner (0, 1),
    # which plain alternating projections would miss
    x, info = dykstra(_point(-1.0, 0.3), [_line_projection(1.0), project_psd], tol=1e-12)
    assert info.converged
    assert abs(x.blocks[0][0, 0]) < 1e-9
    assert abs(x.blocks[1][0, 0] - 1.0) < 1e-9


def test_dykstra_feasible_input_fixed():
    x, info = dykstra(_point(0.25, 0.75), [_line_projection(1.0), project_psd], tol=1e-12)
    assert info.sweeps == 1
    assert abs(x.blocks[0][0, 0] - 0.25) < 1e-12
    assert abs(x.blocks[1][0, 0] - 0.75) < 1e-12


def test_dykstra_variational_optimality():
    # the projection x* of y satisfies <y - x*, z - x*> <= 0 for every
    # feasible z; feasible points come from exact states
    n = 3
    embedding = MomentEmbedding(index_map(n, "second", "parity"))
    rng = np.random.default_rng(17)
    y = embedding.embed(rng.normal(size=embedding.n_params)) + 0.5 * BlockMatrix(
        tuple(rng.normal(size=s) for s in embedding.block_shapes)
    )
    star, info = dykstra(y, [embedding.project, project_psd], tol=1e-10)
    assert info.converged
    gap = y - star
    for seed in range(5):
        state = np.random.default_rng(seed).normal(size=2**n)
        state /= np.linalg.norm(state)
        z = moments_from_state(state, embedding.layout)
        assert gap.inner(z - star) <= 1e-7


def test_dykstra_stat_conventions_agree():
    # squared threshold tol**2 reproduces the norm reading exactly
    y = _point(-0.4, 1.9)
    projs = [_line_projection(1.0), project_psd]
    a, ia = dykstra(y, projs, tol=1e-6, stat="norm")
    b, ib = dykstra(y, projs, tol=1e-12, stat="squared")
    assert ia.sweeps == ib.sweeps
    assert abs(a.blocks[0][0, 0] - b.blocks[0][0, 0]) < 1e-15
    assert ia.increment_change <= 1e-6
    with pytest.raises(ValueError):
        dykstra(y, projs, stat="rms")


def test_dykstra_sweep_budget():
    with pytest.raises(DykstraNonConvergedError) as err:
        dykstra(_point(-5.0, 0.0), [_line_projection(1.0), project_psd],
                tol=1e-14, max_sweeps=2)
    assert not err.value.info.converged
    assert err.value.trace == []
    assert err.value.x is not None


def test_exact_moments_are_fixed_points():
    spec = heisenberg_fermionic(3, j=0.5)
    _, state = exact_diagonalize(spec)
    embedding = MomentEmbedding(index_map(3, "fourth", "number"))
    x = moments_from_state(state, embedding.layout)
    assert (embedding.project(x) - x).norm() < 1e-12
    assert (project_psd(x) - x).norm() < 1e-12
