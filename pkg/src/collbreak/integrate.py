"""Time integration: adaptive embedded RK(2,3) and a Picard fixed-point mode."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractionError, DomainError, StiffnessError
from .grid import State, weight_vector
from .scheme import RhsWorkspace, rhs_arrays

__all__ = [
    "Tolerances",
    "RunOutput",
    "PicardResult",
    "step",
    "simulate",
    "run",
    "picard_solve",
]

# Negative contents beyond this fraction of the state scale force a step
# rejection; anything shallower is round-off and gets clipped to zero.
_NEG_FLOOR_FRACTION = 1e-14

_PICARD_PANELS = 64


@dataclass(frozen=True)
class Tolerances:
    """Step-control parameters of the embedded RK(2,3) integrator.

    The error estimate is measured in the weighted norm
    sum max(reps^k0, reps^(1+k0)) |e_i|, the same topology in which
    solutions of the continuous problem are separated.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    dt_floor: float = 0.0


def _augment(state: State) -> np.ndarray:
    return np.concatenate([state.contents, [state.dust_mass]])


def _f(workspace, y):
    d_contents, d_dust = rhs_arrays(workspace, y[:-1])
    return np.concatenate([d_contents, [d_dust]])


def step(workspace: RhsWorkspace, state: State, dt_target: float, tol: Tolerances):
    """One accepted Bogacki-Shampine RK(2,3) step.

    Halves the step until the embedded error estimate passes and no content
    would land below -1e-14 times the state scale; accepted round-off
    negatives are clipped to zero with the created mass tracked in
    ``clip_mass``.  Returns (new_state, dt_used, dt_next).
    """
    if dt_target <= 0.0:
        raise DomainError(f"dt_target must be positive, got {dt_target}")
    grid = workspace.grid
    weights = weight_vector(grid, workspace.law.k0)
    y = _augment(state)
    scale = float(np.max(np.abs(y[:-1]), initial=0.0))
    neg_floor = _NEG_FLOOR_FRACTION * scale
    tol_value = tol.abs_tol + tol.rel_tol * float(np.sum(weights * np.abs(y[:-1])))

    dt = float(dt_target)
    while True:
        if tol.dt_floor > 0.0 and dt < tol.dt_floor:
            raise StiffnessError(state.time, dt)
        k1 = _f(workspace, y)
        k2 = _f(workspace, y + (dt / 2.0) * k1)
        k3 = _f(workspace, y + (3.0 * dt / 4.0) * k2)
        y3 = y + dt * ((2.0 / 9.0) * k1 + (1.0 / 3.0) * k2 + (4.0 / 9.0) * k3)
        k4 = _f(workspace, y3)
        y2 = y + dt * (
            (7.0 / 24.0) * k1 + (1.0 / 4.0) * k2 + (1.0 / 3.0) * k3 + (1.0 / 8.0) * k4
        )
        est = float(np.sum(weights * np.abs(y3[:-1] - y2[:-1])))
        if est <= tol_value and float(np.min(y3[:-1], initial=0.0)) >= -neg_floor:
            break
        dt /= 2.0

    if est > 0.0:
        factor = min(5.0, max(0.2, 0.9 * (tol_value / est) ** (1.0 / 3.0)))
    else:
        factor = 5.0
    dt_next = dt * factor

    contents = y3[:-1]
    clipped = 0.0
    negative = contents < 0.0
    if np.any(negative):
        clipped = float(np.sum(grid.reps[negative] * -contents[negative]))
        contents = contents.copy()
        contents[negative] = 0.0
    new_state = State(
        contents=contents,
        dust_mass=float(y3[-1]),
        time=state.time + dt,
        clip_mass=state.clip_mass + clipped,
    )
    return new_state, dt, dt_next


@dataclass
class RunOutput:
    """Snapshots of one integration plus everything needed to audit it."""

    grid: object
    kernel: object
    law: object
    times: np.ndarray
    states: list
    config: object = None

    @property
    def dust(self) -> np.ndarray:
        return np.array([s.dust_mass for s in self.states])

    @property
    def clip(self) -> np.ndarray:
        return np.array([s.clip_mass for s in self.states])

    @property
    def rho(self) -> float:
        first = self.states[0]
        return float(np.sum(self.grid.reps * first.contents)) + first.dust_mass

    def moments(self, k: float) -> np.ndarray:
        reps_k = self.grid.reps**k
        return np.array([float(np.sum(reps_k * s.contents)) for s in self.states])


def simulate(
    workspace: RhsWorkspace,
    state0: State,
    snapshot_times,
    tolerances: Tolerances | None = None,
) -> RunOutput:
    """Integrate from the first snapshot time to the last, recording snapshots.

    Snapshot times must be sorted and start at the initial state's time.
    Deterministic: the step sequence depends only on the inputs.
    """
    times = np.asarray(snapshot_times, dtype=float)
    if times.size < 1 or np.any(np.diff(times) <= 0.0):
        raise ConfigError("snapshot times must be strictly increasing")
    if abs(times[0] - state0.time) > 0.0:
        raise ConfigError(
            f"first snapshot time {times[0]} differs from state time {state0.time}"
        )
    tol = tolerances or Tolerances()
    t_end = float(times[-1])
    horizon = t_end - float(times[0])
    if tol.dt_floor == 0.0 and horizon > 0.0:
        tol = Tolerances(tol.rel_tol, tol.abs_tol, 1e-12 * horizon)

    state = state0.copy()
    snapshots = [state.copy()]
    dt_next = 1e-4 * horizon if horizon > 0.0 else 0.0
    for target in times[1:]:
        while state.time < target:
            remaining = float(target) - state.time
            clamp = remaining <= dt_next
            dt_target = remaining if clamp else dt_next
            state, dt_used, dt_next = step(workspace, state, dt_target, tol)
            if clamp and dt_used == dt_target:
                state.time = float(target)
        snapshots.append(state.copy())
    return RunOutput(
        grid=workspace.grid,
        kernel=workspace.kernel,
        law=workspace.law,
        times=times.copy(),
        states=snapshots,
    )


def run(config) -> RunOutput:
    """Build every component from a ``SimConfig`` and integrate it."""
    from . import config as config_mod

    workspace, state0 = config_mod.build_problem(config)
    tol = Tolerances(
        rel_tol=config.rel_tol,
        abs_tol=config.abs_tol,
        dt_floor=1e-12 * config.t_end if config.t_end > 0.0 else 0.0,
    )
    out = simulate(workspace, state0, config.snapshot_times, tol)
    out.config = config
    return out


@dataclass
class PicardResult:
    """Fixed point returned by ``picard_solve`` plus its convergence history."""

    state: State
    diffs: list
    iterations: int


def picard_solve(
    workspace: RhsWorkspace,
    state0: State,
    t_end: float,
    max_iter: int = 40,
    tol: float = 1e-10,
) -> PicardResult:
    """Fixed-point iteration u <- u0 + integral of the truncated dynamics.

    The time integral is a composite trapezoid rule on a fixed uniform mesh
    of 64 panels per call; iteration stops when successive trajectories
    differ by at most ``tol`` in the norm ||.||_k0 + ||.||_1.  The horizon
    must be short enough for contraction; callers split longer intervals
    into chained calls.
    """
    if workspace.kernel.truncation is None:
        raise ConfigError("picard mode requires a kernel with a truncation index")
    if t_end < 0.0:
        raise DomainError(f"t_end must be non-negative, got {t_end}")
    if max_iter < 1:
        raise DomainError("max_iter must be at least 1")
    if t_end == 0.0:
        return PicardResult(state0.copy(), [], 0)

    grid = workspace.grid
    norm_weights = grid.reps**workspace.law.k0 + grid.reps
    mesh = np.linspace(0.0, t_end, _PICARD_PANELS + 1)
    h = mesh[1] - mesh[0]
    m = mesh.size
    c0 = state0.contents

    traj = np.tile(c0, (m, 1))
    diffs = []
    for iteration in range(1, max_iter + 1):
        derivs = np.empty_like(traj)
        for node in range(m):
            derivs[node], _ = rhs_arrays(workspace, traj[node])
        new_traj = np.empty_like(traj)
        new_traj[0] = c0
        acc = np.zeros_like(c0)
        for node in range(1, m):
            acc = acc + (h / 2.0) * (derivs[node - 1] + derivs[node])
            new_traj[node] = c0 + acc
        diff = float(np.max(np.sum(norm_weights * np.abs(new_traj - traj), axis=1)))
        diffs.append(diff)
        traj = new_traj
        if not np.isfinite(diff):
            raise ContractionError(diff, iteration)
        if diff <= tol:
            dust_rates = np.empty(m)
            for node in range(m):
                _, dust_rates[node] = rhs_arrays(workspace, traj[node])
            dust = state0.dust_mass + float(
                np.sum((h / 2.0) * (dust_rates[:-1] + dust_rates[1:]))
            )
            final = State(
                contents=traj[-1].copy(),
                dust_mass=dust,
                time=state0.time + t_end,
                clip_mass=state0.clip_mass,
            )
            return PicardResult(final, diffs, iteration)
    raise ContractionError(diffs[-1], max_iter)
