"""Explicit constants, time horizons, and regime classification.

Evaluates every computable constant of the moment estimates behind the
existence, uniqueness, and non-existence results: the c1/c2/c3 chain with
its blow-up horizon for sublinearly growing kernels, the Gronwall envelope
of the weighted distance between two solutions, and the per-order
non-existence time bounds whose infimum vanishes.

The k0-th moment obeys  dM/dt <= E1 [M_{k0+l1} M_{l2} + M_{k0+l2} M_{l1}]
with E1 = (nu+2)/(k0+nu+1), the sharp fragment-moment constant; the exact
power-law production rate is (E1 - 1) times the same bracket, so any
envelope must keep the E1 factor.  Interpolating the bracket against mass
and the (k0+1)-th moment gives  dM/dt <= 2 E1 c3 M^(1+q) with
q = (1-lambda)/(1-k0) when lambda < 1 (finite horizon T_k0), and a linear
inequality with a growing exponential envelope when lambda >= 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .daughter import DaughterLaw, e_constant
from .errors import DomainError, InputError
from .kernel import KernelSpec

__all__ = [
    "Regime",
    "BoundsReport",
    "classify_regime",
    "hypothesis_checklist",
    "existence_bounds",
    "nonexistence_bound",
    "gronwall_envelope",
]

_T1_GRID_SIZE = 64


class Regime(enum.Enum):
    GLOBAL_EXISTENCE = "GlobalExistence"
    LOCAL_EXISTENCE = "LocalExistence"
    NON_EXISTENCE = "NonExistence"
    UNCOVERED = "Uncovered"


def hypothesis_checklist(kernel: KernelSpec, law: DaughterLaw) -> list[dict]:
    """Each theorem hypothesis as (inequality, truth value, actual numbers)."""
    l1, l2 = kernel.lambda1, kernel.lambda2
    lam = kernel.homogeneity
    nu, k0 = law.nu, law.k0
    checks = [
        ("k0 <= lambda1", k0 <= l1, f"k0={k0}, lambda1={l1}"),
        ("lambda2 <= 1", l2 <= 1.0, f"lambda2={l2}"),
        ("lambda >= 2*k0", lam >= 2.0 * k0, f"lambda={lam}, 2*k0={2.0 * k0}"),
        ("lambda >= 1", lam >= 1.0, f"lambda={lam}"),
        ("lambda < 1", lam < 1.0, f"lambda={lam}"),
        ("lambda <= 2", lam <= 2.0, f"lambda={lam}"),
        ("nu in (-2, -1]", -2.0 < nu <= -1.0, f"nu={nu}"),
        (
            "lambda1 < |nu| - 1",
            l1 < abs(nu) - 1.0,
            f"lambda1={l1}, |nu|-1={abs(nu) - 1.0}",
        ),
    ]
    return [
        {"hypothesis": name, "holds": bool(ok), "values": values}
        for name, ok, values in checks
    ]


def classify_regime(kernel: KernelSpec, law: DaughterLaw) -> Regime:
    """Which theorem, if any, covers this kernel/daughter pair.

    The three positive classes are pairwise disjoint: the existence classes
    split at homogeneity 1, and non-existence needs lambda1 < |nu|-1 < k0,
    incompatible with the existence hypothesis k0 <= lambda1.
    """
    l1, l2 = kernel.lambda1, kernel.lambda2
    lam = kernel.homogeneity
    nu, k0 = law.nu, law.k0
    admissible = k0 <= l1 and l2 <= 1.0
    if admissible and 1.0 <= lam <= 2.0:
        return Regime.GLOBAL_EXISTENCE
    if admissible and 2.0 * k0 <= lam < 1.0:
        return Regime.LOCAL_EXISTENCE
    if -2.0 < nu <= -1.0 and l1 < abs(nu) - 1.0 and l2 <= 1.0 and lam < 1.0:
        return Regime.NON_EXISTENCE
    return Regime.UNCOVERED


@dataclass
class BoundsReport:
    """Constants and horizons derived from one kernel/daughter/initial-data triple."""

    regime: Regime
    checklist: list = field(default_factory=list)
    e1: float | None = None  # fragment k0-moment constant E_{k0,1}
    c1: float | None = None
    c2: float | None = None
    c3: float | None = None
    t_k0: float | None = None  # blow-up horizon of the sublinear envelope
    c1_of: object = None  # callable T -> C1(T)
    c1_table: list = field(default_factory=list)
    ell1: object = None  # callable k -> ell1(k)
    ell2: object = None  # callable k -> ell2(k)
    t1_of: object = None  # callable k -> per-order non-existence bound
    t1_table: np.ndarray | None = None  # columns: k, ell1, ell2, T1
    t1_bound: float | None = None
    t1_argmin: float | None = None

    def to_dict(self) -> dict:
        out = {
            "regime": self.regime.value,
            "checklist": self.checklist,
        }
        for name in ("e1", "c1", "c2", "c3", "t_k0", "t1_bound", "t1_argmin"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value if math.isfinite(value) else "inf"
        if self.c1_table:
            out["c1_table"] = [{"T": t, "C1": v} for t, v in self.c1_table]
        if self.t1_table is not None:
            out["t1_table"] = [
                {"k": row[0], "ell1": row[1], "ell2": row[2], "T1": row[3]}
                for row in self.t1_table
            ]
        return out


def existence_bounds(
    kernel: KernelSpec,
    law: DaughterLaw,
    rho: float,
    m_k0_in: float,
    m_k0p1_in: float,
    t_values=None,
) -> BoundsReport:
    """Constant chain of the small-size moment estimate.

    Given the initial mass rho and the initial k0 and (k0+1) moments,
    returns c1, c2, c3, the horizon T_k0 (infinite for homogeneity >= 1),
    and the envelope C1 as a callable plus a table over ``t_values``.
    Parameters outside the theorem's hypotheses yield an Uncovered report
    with no constants.
    """
    if min(rho, m_k0_in, m_k0p1_in) <= 0.0:
        raise DomainError("rho and initial moments must be positive")
    regime = classify_regime(kernel, law)
    report = BoundsReport(regime=regime, checklist=hypothesis_checklist(kernel, law))
    if regime not in (Regime.GLOBAL_EXISTENCE, Regime.LOCAL_EXISTENCE):
        return report

    l1, l2 = kernel.lambda1, kernel.lambda2
    lam = kernel.homogeneity
    k0 = law.k0
    e1 = e_constant(law, 1.0)
    c1 = max(
        rho ** (l1 / (1.0 - k0)),
        rho ** ((1.0 - l1) / k0) * m_k0p1_in ** ((k0 + l1 - 1.0) / k0),
    )
    c2 = max(
        rho ** (l2 / (1.0 - k0)),
        rho ** ((1.0 - l2) / k0) * m_k0p1_in ** ((k0 + l2 - 1.0) / k0),
    )
    c3 = max(
        c1 * rho ** ((l2 - k0) / (1.0 - k0)),
        c2 * rho ** ((l1 - k0) / (1.0 - k0)),
    )
    report.e1, report.c1, report.c2, report.c3 = e1, c1, c2, c3

    if lam < 1.0:
        t_k0 = (
            (1.0 - k0)
            / (2.0 * (1.0 - lam) * e1 * c3)
            * m_k0_in ** (-(1.0 - lam) / (1.0 - k0))
        )

        def c1_of(t: float) -> float:
            if t >= t_k0:
                raise DomainError(f"T={t} at or beyond the horizon T_k0={t_k0}")
            base = m_k0_in ** (-(1.0 - lam) / (1.0 - k0)) - 2.0 * (
                1.0 - lam
            ) * e1 * c3 * t / (1.0 - k0)
            return base ** (-(1.0 - k0) / (1.0 - lam))

    else:
        t_k0 = math.inf

        def c1_of(t: float) -> float:
            return (1.0 + m_k0_in) * math.exp(2.0 * e1 * c3 * t / (1.0 - k0))

    report.t_k0 = t_k0
    report.c1_of = c1_of
    if t_values is not None:
        report.c1_table = [(float(t), c1_of(float(t))) for t in np.atleast_1d(t_values)]
    return report


def nonexistence_bound(
    kernel: KernelSpec,
    law: DaughterLaw,
    rho: float,
    moment_fn,
    k_grid=None,
) -> BoundsReport:
    """Per-order upper bounds on the lifetime of a mass-conserving solution.

    ``moment_fn(k)`` must return the k-th moment of the initial data.  For
    each k in the grid the bound is

        T1(k) = (k+nu+1) M_k(0)^(ell1/(1-k)) / (|ell1(k)| ell2(k)),

    and T1 vanishes as k decreases to |nu|-1, which is the non-existence
    conclusion.  The default grid has 64 points log-concentrated at that
    endpoint so the vanishing is visible in the emitted table.
    """
    if rho <= 0.0:
        raise DomainError("rho must be positive")
    regime = classify_regime(kernel, law)
    report = BoundsReport(regime=regime, checklist=hypothesis_checklist(kernel, law))
    if regime is not Regime.NON_EXISTENCE:
        return report

    l1, l2 = kernel.lambda1, kernel.lambda2
    nu, k0 = law.nu, law.k0
    lo = abs(nu) - 1.0
    m_1pk0 = moment_fn(1.0 + k0)

    def ell1(k: float) -> float:
        return l1 - k + max(k + l2 - 1.0, 0.0)

    def ell2(k: float) -> float:
        return rho ** ((l1 - k) / (1.0 - k)) * min(
            rho ** (l2 / (1.0 - k)),
            rho ** ((1.0 + k0 - k - l2) / k0) * m_1pk0 ** ((k + l2 - 1.0) / k0),
        )

    def t1_of(k: float) -> float:
        if not lo < k < 1.0:
            raise DomainError(f"k={k} outside the admissible interval ({lo}, 1)")
        e1v = ell1(k)
        return (k + nu + 1.0) / (abs(e1v) * ell2(k)) * moment_fn(k) ** (
            e1v / (1.0 - k)
        )

    if k_grid is None:
        span = 1.0 - lo
        k_grid = lo + span * np.geomspace(1e-3, 0.999, _T1_GRID_SIZE)
    k_grid = np.asarray(k_grid, dtype=float)
    if np.any(k_grid <= lo) or np.any(k_grid >= 1.0):
        raise DomainError(f"k grid must lie inside ({lo}, 1)")

    table = np.empty((k_grid.size, 4))
    for row, k in enumerate(k_grid):
        table[row] = (k, ell1(k), ell2(k), t1_of(k))
    idx = int(np.argmin(table[:, 3]))
    report.ell1 = ell1
    report.ell2 = ell2
    report.t1_of = t1_of
    report.t1_table = table
    report.t1_bound = float(table[idx, 3])
    report.t1_argmin = float(table[idx, 0])
    return report


def gronwall_envelope(law: DaughterLaw, times, m_k0_sum, m_high_sum, d0: float):
    """Upper envelope of the weighted distance between two solutions.

    ``m_k0_sum`` and ``m_high_sum`` are the k0-th and (1+k0+lambda2)-th
    moments of the *sum* of the two solutions, sampled on ``times``.
    Returns d0 * exp(12 E1 integral of their sum), by trapezoid quadrature.
    """
    times = np.asarray(times, dtype=float)
    a = np.asarray(m_k0_sum, dtype=float)
    b = np.asarray(m_high_sum, dtype=float)
    if not times.shape == a.shape == b.shape:
        raise InputError("moment series must share the time mesh")
    e1 = e_constant(law, 1.0)
    integral = cumulative_trapezoid(a + b, times, initial=0.0)
    return d0 * np.exp(12.0 * e1 * integral)
