"""Orthogonal projections and Dykstra's alternating scheme.

The feasible region of the relaxation is the intersection of an affine
subspace (moment consistency) with the cone of positive semidefinite
block matrices.  Neither projection is available for the intersection
directly, so Dykstra's method combines the two individual projections;
its correction terms make the iteration converge to the true nearest
point, unlike plain alternating projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .blockmat import BlockMatrix


def _psd_array(a: np.ndarray) -> np.ndarray:
    # defensive hermitization keeps eigh well posed after roundoff drift
    h = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    w, v = np.linalg.eigh(h)
    w = np.maximum(w, 0.0)
    return (v * w[..., None, :]) @ np.conj(np.swapaxes(v, -1, -2))


def project_psd(x):
    """Nearest positive semidefinite matrix in Frobenius norm.

    Accepts a plain ndarray (batched over leading axes) or a
    BlockMatrix, projecting every block independently.
    """
    if isinstance(x, BlockMatrix):
        return BlockMatrix(tuple(_psd_array(b) for b in x.blocks))
    return _psd_array(np.asarray(x))


@dataclass(frozen=True)
class DykstraInfo:
    sweeps: int
    increment_change: float
    converged: bool


class DykstraNonConvergedError(RuntimeError):
    """Sweep budget exhausted; carries the last iterate for inspection.

    Callers that drive longer iterations may attach their progress so
    far as `trace` before letting the error propagate further.
    """

    def __init__(self, message: str, x, info: DykstraInfo, trace=()):
        super().__init__(message)
        self.x = x
        self.info = info
        self.trace = list(trace)


def dykstra(
    x0,
    projections: Sequence[Callable],
    tol: float = 1e-8,
    max_sweeps: int = 20000,
    stat: str = "norm",
):
    """Project x0 onto the intersection of the projections' sets.

    Runs Boyle-Dykstra sweeps, accumulating the summed squared change
    of all correction terms over each sweep as the stationarity
    statistic.  How `tol` is read against it is set by `stat`:

    - "norm" (default): stop once the square root of the sum falls to
      `tol`, so the tolerance lives on the same Frobenius-norm scale
      as the iterates and the returned point is close to the true
      nearest feasible point at that scale.
    - "squared": compare the raw sum itself against `tol`.  This is
      the literal stationarity test of the restarted-Dykstra
      literature; for equal `tol` it stops much earlier and can leave
      a residual near sqrt(tol), which matters when reproducing
      results computed under that convention.

    The criterion stays meaningful when the intersection is empty to
    machine precision.  Returns (x, DykstraInfo); the reported
    increment_change is always on the norm scale.
    """
    if stat not in ("norm", "squared"):
        raise ValueError("stat must be 'norm' or 'squared'")
    x = x0.copy()
    incs = [x0.zeros_like() for _ in projections]
    threshold = tol * tol if stat == "norm" else tol
    change = np.inf
    for sweep in range(1, max_sweeps + 1):
        change = 0.0
        for i, proj in enumerate(projections):
            shifted = x + incs[i]
            x = proj(shifted)
            new_inc = shifted - x
            delta = new_inc - incs[i]
            change += delta.inner(delta)
            incs[i] = new_inc
        if change <= threshold:
            return x, DykstraInfo(sweep, np.sqrt(change), True)
    info = DykstraInfo(max_sweeps, np.sqrt(change), False)
    raise DykstraNonConvergedError(
        f"no convergence in {max_sweeps} sweeps (last change {change:.3e})",
        x,
        info,
    )
