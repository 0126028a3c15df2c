"""Theorem-level runtime checks on simulation output.

All checks work from the emitted snapshot/moment series only (time
derivatives by central differences on the snapshot mesh), so they test the
output contract rather than integrator internals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import bounds as bounds_mod
from .daughter import upsilon_power
from .errors import InputError
from .grid import SizeGrid, State, weight_vector
from .integrate import RunOutput

__all__ = [
    "weighted_distance",
    "moment_identity_residual",
    "c1_bound_check",
    "nonexistence_growth_check",
    "ShatterStudy",
    "shattering_study",
    "mass_budget_check",
    "tail_monotonicity_check",
    "run_verification",
]

# dust fraction must drop at least this factor per decade of x_min for a
# run to be called conservative; power-law leakage gives ~10^(nu+2) per
# decade, far above, while the shattering limit gives ~1.
_DECADE_FACTOR = 2.0


def weighted_distance(state_a: State, state_b: State, grid: SizeGrid, k0: float) -> float:
    """Distance sum max(reps^k0, reps^(1+k0)) |a_i - b_i| between two states."""
    if state_a.contents.shape != (grid.n_cells,) or state_b.contents.shape != (
        grid.n_cells,
    ):
        raise InputError("states do not live on the given grid")
    w = weight_vector(grid, k0)
    return float(np.sum(w * np.abs(state_a.contents - state_b.contents)))


def _leak_rate(run: RunOutput, k: float) -> np.ndarray:
    """k-th moment flux below the grid, reconstructed from the dust series.

    For the power-law daughter the ratio of leaked k-moment to leaked mass
    is (nu+2)/(k+nu+1) x_min^(k-1), independent of the parent size.
    """
    if run.times.size < 2:
        raise InputError("need at least two snapshots for time differencing")
    nu = run.law.nu
    dust_rate = np.gradient(run.dust, run.times)
    return dust_rate * (nu + 2.0) / (k + nu + 1.0) * run.grid.x_min ** (k - 1.0)


def moment_identity_residual(run: RunOutput, k: float) -> np.ndarray:
    """Residual of the exact power-law moment identity on the snapshot mesh.

    Compares dM_k/dt against the closed production rate
    (1-k)/(k+nu+1) [M_{k+l1} M_{l2} + M_{k+l2} M_{l1}], adding back the
    moment flux lost below the grid.  The identity is exact in the
    continuum, so the residual measures discretisation error; it vanishes
    identically at k = 1 up to clipping.
    """
    upsilon_power(run.law, k, 1.0, 1.0)  # validates k > |nu| - 1
    l1, l2 = run.kernel.lambda1, run.kernel.lambda2
    nu = run.law.nu
    coeff = (1.0 - k) / (k + nu + 1.0)
    dmdt = np.gradient(run.moments(k), run.times)
    production = coeff * (
        run.moments(k + l1) * run.moments(l2) + run.moments(k + l2) * run.moments(l1)
    )
    return dmdt - production + _leak_rate(run, k)


def c1_bound_check(run: RunOutput, report, t_horizon: float):
    """Whether max M_k0(t) over t <= t_horizon stays below C1(t_horizon).

    Returns (passed, margin) with margin = C1 - max M_k0.  The horizon must
    precede the blow-up time of the envelope when that time is finite.
    """
    if report.regime not in (
        bounds_mod.Regime.GLOBAL_EXISTENCE,
        bounds_mod.Regime.LOCAL_EXISTENCE,
    ):
        raise InputError(f"regime {report.regime.value} has no small-size envelope")
    if report.t_k0 is not None and math.isfinite(report.t_k0) and t_horizon >= report.t_k0:
        raise InputError(
            f"horizon T={t_horizon} at or beyond the envelope blow-up T_k0={report.t_k0}"
        )
    mask = run.times <= t_horizon * (1.0 + 1e-12)
    if not np.any(mask):
        raise InputError("no snapshots at or before the requested horizon")
    peak = float(np.max(run.moments(run.law.k0)[mask]))
    limit = report.c1_of(t_horizon)
    return peak <= limit, limit - peak


def nonexistence_growth_check(run: RunOutput, k: float, rel_tol: float = 0.01) -> bool:
    """Integral growth inequality of the non-existence argument, on the run.

    Verifies   M_k(t) >= M_k(0) + (1-k)/(k+nu+1) int M_{k+l2} M_{l1} dtau
    with the grid's sub-x_min moment flux added back on the left, up to
    ``rel_tol`` of the running scale (trapezoid quadrature on the snapshot
    mesh is the only error source).
    """
    regime = bounds_mod.classify_regime(run.kernel, run.law)
    if regime is not bounds_mod.Regime.NON_EXISTENCE:
        raise InputError(f"regime {regime.value} is outside the non-existence theorem")
    nu = run.law.nu
    # k = 1 is allowed as the degenerate boundary case with zero production
    if not abs(nu) - 1.0 < k <= 1.0:
        raise InputError(f"k={k} outside ({abs(nu) - 1.0}, 1]")
    l1, l2 = run.kernel.lambda1, run.kernel.lambda2
    coeff = (1.0 - k) / (k + nu + 1.0)
    times = run.times
    m_k = run.moments(k)
    lhs = m_k + cumulative_trapezoid(_leak_rate(run, k), times, initial=0.0)
    production = cumulative_trapezoid(
        run.moments(k + l2) * run.moments(l1), times, initial=0.0
    )
    rhs = m_k[0] + coeff * production
    tolerance = rel_tol * (abs(m_k[0]) + np.abs(coeff) * production + 1e-300)
    return bool(np.all(lhs >= rhs - tolerance))


@dataclass
class ShatterStudy:
    """Dust fraction versus grid cutoff, with the fitted trend and verdict."""

    t_obs: float
    rows: list  # (x_min, dust_fraction)
    slope: float  # d ln(fraction) / d ln(x_min)
    per_decade_factor: float
    verdict: str  # "shattering" or "conservative"

    def to_dict(self) -> dict:
        return {
            "t_obs": self.t_obs,
            "rows": [{"x_min": x, "dust_fraction": f} for x, f in self.rows],
            "slope": self.slope,
            "per_decade_factor": self.per_decade_factor,
            "verdict": self.verdict,
        }


def shattering_study(config, x_mins, runner=None) -> ShatterStudy:
    """Refinement sweep of the grid cutoff at otherwise fixed physics.

    Runs the configuration once per ``x_min`` (cells per decade held
    constant), records dust(t_end)/rho, and fits the power-law trend.  A
    dust fraction falling at least 2x per decade of x_min is the signature
    of an integrable cascade ("conservative"); failure to do so is the
    shattering signature.
    """
    from . import config as config_mod
    from .integrate import run as run_config

    x_mins = sorted(float(x) for x in x_mins)
    if len(x_mins) < 3:
        raise InputError("need at least 3 x_min values for a refinement trend")
    runner = runner or run_config
    rows = []
    for x_min in sorted(x_mins, reverse=True):
        out = runner(config_mod.with_x_min(config, x_min))
        frac = out.dust[-1] / out.rho
        rows.append((x_min, float(frac)))
    xs = np.log([r[0] for r in rows])
    fs = np.log([max(r[1], 1e-300) for r in rows])
    slope = float(np.polyfit(xs, fs, 1)[0])
    per_decade = 10.0**slope
    verdict = "conservative" if per_decade >= _DECADE_FACTOR else "shattering"
    return ShatterStudy(float(config.t_end), rows, slope, per_decade, verdict)


def mass_budget_check(run: RunOutput, rel_tol: float = 1e-6):
    """Max drift of M_1(grid) + dust from the initial mass, against rel_tol*rho."""
    total = run.moments(1.0) + run.dust
    drift = float(np.max(np.abs(total - run.rho)))
    return drift <= rel_tol * run.rho, drift


def tail_monotonicity_check(run: RunOutput, k: float, rel_tol: float = 1e-8):
    """Tails sum_{reps >= x} reps^k contents nonincreasing in t at every edge.

    Tolerance scales as rel_tol * rho * x^(k-1) per edge.  Returns
    (passed, worst_violation) with the violation measured in units of the
    local tolerance.
    """
    grid = run.grid
    reps_k = grid.reps**k
    tails = np.empty((len(run.states), grid.n_cells + 1))
    for row, state in enumerate(run.states):
        suffix = np.cumsum((reps_k * state.contents)[::-1])[::-1]
        tails[row, : grid.n_cells] = suffix
        tails[row, grid.n_cells] = 0.0
    allowance = rel_tol * run.rho * grid.edges ** (k - 1.0)
    excess = (tails - tails[0]) / allowance
    worst = float(np.max(excess))
    return worst <= 1.0, worst


def run_verification(run: RunOutput) -> list[dict]:
    """Battery of applicable checks for a finished run; one verdict each."""
    k0 = run.law.k0
    results = []

    ok, drift = mass_budget_check(run)
    results.append(
        {
            "check": "mass-budget",
            "passed": bool(ok),
            "detail": f"max |M_1 + dust - rho| = {drift:.3e} (rho = {run.rho:.6g})",
        }
    )

    for k in (1.0, 1.0 + k0):
        ok, worst = tail_monotonicity_check(run, k)
        results.append(
            {
                "check": f"tail-monotone-k={k:g}",
                "passed": bool(ok),
                "detail": f"worst tail excess {worst:.3e} tolerance units",
            }
        )

    m_high = run.moments(1.0 + k0)
    growth = float(np.max(m_high - m_high[0]))
    results.append(
        {
            "check": "superlinear-moment-monotone",
            "passed": growth <= 1e-8 * run.rho,
            "detail": f"max M_(1+k0) growth {growth:.3e}",
        }
    )

    if run.times.size >= 2:
        residual = moment_identity_residual(run, 1.0)
        min_dt = float(np.min(np.diff(run.times)))
        tol = 1e-6 * run.rho * max(1.0, 1.0 / min_dt)
        peak = float(np.max(np.abs(residual)))
        results.append(
            {
                "check": "moment-identity-k=1",
                "passed": peak <= tol,
                "detail": f"max |residual| = {peak:.3e} (tol {tol:.3e})",
            }
        )

    regime = bounds_mod.classify_regime(run.kernel, run.law)
    if regime in (bounds_mod.Regime.GLOBAL_EXISTENCE, bounds_mod.Regime.LOCAL_EXISTENCE):
        first = run.states[0]
        report = bounds_mod.existence_bounds(
            run.kernel,
            run.law,
            run.rho,
            float(np.sum(run.grid.reps**k0 * first.contents)),
            float(np.sum(run.grid.reps ** (1.0 + k0) * first.contents)),
        )
        horizon = float(run.times[-1])
        if math.isfinite(report.t_k0):
            horizon = min(horizon, 0.9 * report.t_k0)
        ok, margin = c1_bound_check(run, report, horizon)
        results.append(
            {
                "check": "small-size-envelope",
                "passed": bool(ok),
                "detail": f"M_k0 margin {margin:.4g} below C1(T) at T={horizon:.4g}",
            }
        )
    if regime is bounds_mod.Regime.NON_EXISTENCE:
        ok = nonexistence_growth_check(run, k0)
        results.append(
            {
                "check": "nonexistence-growth",
                "passed": bool(ok),
                "detail": f"integral growth inequality at k = k0 = {k0:g}",
            }
        )
    return results
