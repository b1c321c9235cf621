"""Projected-gradient descent over the moment relaxation.

Each iteration takes a fixed gradient step on the linear energy
functional and re-enters the feasible set with Dykstra's alternating
projections.  Because the feasible set is convex and contains the
moment matrix of every physical state, the converged value is a lower
bound on the true ground-state energy.  A dual ascent on the same
machinery produces a second bound that certifies convergence through
the duality gap.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .blockmat import BlockMatrix, unvec_real, vec_real
from .moments import Objective, half_filling_params
from .projections import DykstraNonConvergedError, dykstra, project_psd


class UnsupportedScopeError(ValueError):
    """The requested operation needs a different moment scope."""


@dataclass
class SolverConfig:
    """Tuning knobs for the projected-gradient iteration.

    alpha0 is the first, exploratory step size; it defaults to the
    number of sites when left unset.  All later steps use alpha.  The
    energy stop triggers once `patience` consecutive iterations each
    improve the energy by at most tau_energy (never on the first
    step), the gap stop once the primal-dual gap falls to tau_gap.
    With loose projections the per-step improvement is noisy and a
    single reading can dip under the threshold mid-descent; patience=2
    ignores such one-off dips while leaving the tight default
    behaviour unchanged.

    dykstra_stat selects how tau_dykstra is read by the inner
    projection loop: "norm" compares the square root of the summed
    squared correction change against it (tight, default), "squared"
    compares the raw sum (the literal restarted-Dykstra test, which
    for equal tolerances stops earlier and reports energies dipping
    below the relaxation optimum by roughly sqrt(tau_dykstra)).
    """

    alpha0: float | None = None
    alpha: float = 0.1
    tau_energy: float = 1e-7
    tau_dykstra: float = 1e-8
    tau_gap: float = 1e-6
    max_iters: int = 10000
    max_sweeps: int = 20000
    stop: str = "energy"
    dykstra_stat: str = "norm"
    patience: int = 1
    record_iterates: bool = False


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    energy: float
    dykstra_sweeps: int
    elapsed_seconds: float


@dataclass
class SolveReport:
    lower_bound: float
    iterations: int
    termination: str
    trace: list[TraceEntry]
    params: np.ndarray | None
    fingerprint: tuple
    role: str
    duality_gap: float | None = None
    dual_bound: float | None = None
    wall_time: float = 0.0
    iterates: list[BlockMatrix] | None = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.termination in ("energy-improvement", "duality-gap")


class _Track:
    """One projected-gradient iterate stream with its own constraint set."""

    def __init__(self, x0, gradient, energy_fn, affine_proj, cfg, alpha0, t0):
        self.gradient = gradient
        self.energy_fn = energy_fn
        self.projections = [affine_proj, project_psd]
        self.cfg = cfg
        self.alpha0 = alpha0
        self.t0 = t0
        self.trace: list[TraceEntry] = []
        self.iterates: list[BlockMatrix] = []
        self.k = 0
        self.x = None
        self.energy = np.inf
        self._enter(x0)

    def _enter(self, y):
        self.x, info = dykstra(
            y,
            self.projections,
            self.cfg.tau_dykstra,
            self.cfg.max_sweeps,
            stat=self.cfg.dykstra_stat,
        )
        self.k += 1
        previous = self.energy
        self.energy = self.energy_fn(self.x)
        self.trace.append(
            TraceEntry(
                self.k,
                self.energy,
                info.sweeps,
                time.perf_counter() - self.t0,
            )
        )
        if self.cfg.record_iterates:
            self.iterates.append(self.x.copy())
        return previous - self.energy

    def step(self) -> float:
        """Advance one iterate; returns the energy improvement."""
        alpha = self.alpha0 if self.k == 1 else self.cfg.alpha
        return self._enter(self.x - alpha * self.gradient)


def _finish(track, embedding, objective, termination, t0, role, extract=True):
    params = embedding.extract(track.x) if extract else None
    return SolveReport(
        lower_bound=track.energy,
        iterations=track.k,
        termination=termination,
        trace=track.trace,
        params=params,
        fingerprint=objective.fingerprint,
        role=role,
        wall_time=time.perf_counter() - t0,
        iterates=track.iterates if track.cfg.record_iterates else None,
    )


def solve(
    objective: Objective,
    embedding,
    config: SolverConfig | None = None,
    initial_params: np.ndarray | None = None,
) -> SolveReport:
    """Minimize the energy functional over the relaxation's feasible set.

    The iteration starts from the zero matrix pushed into the feasible
    set, or from the embedding of `initial_params` when warm starting.
    With `config.stop == "gap"` a dual iteration runs alongside the
    primal one and termination is declared once their values agree to
    tau_gap; the dual value is then reported as `dual_bound`.

    Exhausting max_iters returns a report flagged "max-iters".  A
    projection that exhausts its sweep budget instead raises
    DykstraNonConvergedError with the energy trace up to the failure
    attached.
    """
    cfg = config or SolverConfig()
    if cfg.stop not in ("energy", "gap"):
        raise ValueError("stop must be 'energy' or 'gap'")
    if cfg.dykstra_stat not in ("norm", "squared"):
        raise ValueError("dykstra_stat must be 'norm' or 'squared'")
    if cfg.patience < 1:
        raise ValueError("patience must be at least 1")
    t0 = time.perf_counter()
    alpha0 = cfg.alpha0 if cfg.alpha0 is not None else float(embedding.n_sites)
    if initial_params is None:
        x0 = embedding.zero_matrix()
    else:
        if len(initial_params) != embedding.n_params:
            raise ValueError("initial parameter vector has the wrong length")
        x0 = embedding.embed(initial_params)

    dual = _DualProblem(objective, embedding) if cfg.stop == "gap" else None
    primal = None
    try:
        primal = _Track(
            x0,
            objective.matrix,
            objective.energy,
            embedding.project,
            cfg,
            alpha0,
            t0,
        )
        if dual is None:
            streak = 0
            while primal.k < cfg.max_iters:
                improvement = primal.step()
                streak = streak + 1 if improvement <= cfg.tau_energy else 0
                if primal.k >= 3 and streak >= cfg.patience:
                    return _finish(
                        primal, embedding, objective, "energy-improvement", t0, "primal"
                    )
            return _finish(primal, embedding, objective, "max-iters", t0, "primal")

        shadow = _Track(
            dual.zero,
            dual.gradient,
            dual.negative_value,
            dual.project_affine,
            cfg,
            alpha0,
            t0,
        )
        while primal.k < cfg.max_iters:
            primal.step()
            shadow.step()
            gap = primal.energy - (-shadow.energy)
            if primal.k >= 3 and gap <= cfg.tau_gap:
                report = _finish(
                    primal, embedding, objective, "duality-gap", t0, "primal"
                )
                report.duality_gap = gap
                report.dual_bound = -shadow.energy
                return report
        report = _finish(primal, embedding, objective, "max-iters", t0, "primal")
        report.duality_gap = primal.energy - (-shadow.energy)
        report.dual_bound = -shadow.energy
        return report
    except DykstraNonConvergedError as err:
        if primal is not None:
            err.trace = list(primal.trace)
        raise


class _DualProblem:
    """Dual feasible set and value for a second-moment relaxation.

    With F0 a strictly positive interior point of the affine moment
    set and {F_i} an orthonormal basis of its direction space, every
    Z >= 0 satisfying <F_i, Z> = <F_i, G> certifies the bound

        H(Z) = -<F0, Z> + c + <G, F0> <= min E(X).

    Maximizing H is a projected-gradient descent on <F0, Z>.
    """

    def __init__(self, objective: Objective, embedding):
        if embedding.level != "second":
            raise UnsupportedScopeError(
                "dual bounds are implemented for second-moment relaxations only"
            )
        self.zero = embedding.zero_matrix()
        self._shapes = tuple(b.shape for b in self.zero.blocks)
        self.gradient = embedding.embed(half_filling_params(embedding.table))
        base = vec_real(embedding.embed(np.zeros(embedding.n_params)))
        columns = np.empty((base.size, embedding.n_params))
        for i in range(embedding.n_params):
            unit = np.zeros(embedding.n_params)
            unit[i] = 1.0
            columns[:, i] = vec_real(embedding.embed(unit)) - base
        q, r = np.linalg.qr(columns)
        if np.min(np.abs(np.diag(r))) < 1e-12:
            raise ValueError("degenerate moment directions")
        self._q = q
        self._g = q.T @ vec_real(objective.matrix)
        self.constant = objective.constant + objective.matrix.inner(self.gradient)

    def project_affine(self, z: BlockMatrix) -> BlockMatrix:
        v = vec_real(z)
        return unvec_real(v + self._q @ (self._g - self._q.T @ v), self._shapes)

    def value(self, z: BlockMatrix) -> float:
        return self.constant - self.gradient.inner(z)

    def negative_value(self, z: BlockMatrix) -> float:
        return -self.value(z)


def solve_dual(
    objective: Objective,
    embedding,
    config: SolverConfig | None = None,
) -> SolveReport:
    """Maximize the dual functional; its value is a certified bound.

    Only second-moment relaxations are supported, since the dual
    machinery stores the direction space densely.
    """
    cfg = config or SolverConfig()
    if cfg.patience < 1:
        raise ValueError("patience must be at least 1")
    t0 = time.perf_counter()
    alpha0 = cfg.alpha0 if cfg.alpha0 is not None else float(embedding.n_sites)
    dual = _DualProblem(objective, embedding)
    track = None
    try:
        track = _Track(
            dual.zero,
            dual.gradient,
            dual.negative_value,
            dual.project_affine,
            cfg,
            alpha0,
            t0,
        )
        termination = "max-iters"
        streak = 0
        while track.k < cfg.max_iters:
            improvement = track.step()
            streak = streak + 1 if improvement <= cfg.tau_energy else 0
            if track.k >= 3 and streak >= cfg.patience:
                termination = "energy-improvement"
                break
    except DykstraNonConvergedError as err:
        if track is not None:
            err.trace = list(track.trace)
        raise
    report = SolveReport(
        lower_bound=-track.energy,
        iterations=track.k,
        termination=termination,
        trace=[
            TraceEntry(t.iteration, -t.energy, t.dykstra_sweeps, t.elapsed_seconds)
            for t in track.trace
        ],
        params=None,
        fingerprint=objective.fingerprint,
        role="dual",
        wall_time=time.perf_counter() - t0,
    )
    return report


def gap(primal: SolveReport, dual: SolveReport) -> float:
    """Duality gap between a primal and a dual report of one problem."""
    if primal.fingerprint != dual.fingerprint:
        raise ValueError("reports describe different problems")
    if primal.role == dual.role:
        raise ValueError("need one primal and one dual report")
    if primal.role == "dual":
        primal, dual = dual, primal
    return primal.lower_bound - dual.lower_bound
