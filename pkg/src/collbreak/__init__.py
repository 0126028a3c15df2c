"""Sectional solver and analysis toolkit for collision-induced fragmentation
with power-law fragment daughter spectra, including the non-integrable range.

The package provides the symmetric homogeneous collision kernel, closed-form
daughter-distribution moments, a mass-exact sectional scheme with an explicit
sub-grid dust accumulator, adaptive and fixed-point time integration, the
explicit constants of the existence/uniqueness/non-existence moment estimates,
and theorem-level diagnostics over emitted runs.
"""

from .bounds import (
    BoundsReport,
    Regime,
    classify_regime,
    existence_bounds,
    gronwall_envelope,
    hypothesis_checklist,
    nonexistence_bound,
)
from .config import SimConfig, build_problem, parse_config, parse_config_text, with_x_min
from .daughter import (
    DaughterLaw,
    beta_star,
    cell_mass_deposit,
    e_constant,
    partial_moment,
    upsilon_power,
)
from .diagnostics import (
    ShatterStudy,
    c1_bound_check,
    mass_budget_check,
    moment_identity_residual,
    nonexistence_growth_check,
    run_verification,
    shattering_study,
    tail_monotonicity_check,
    weighted_distance,
)
from .errors import (
    CollbreakError,
    ConfigError,
    ContractionError,
    DivergentMomentError,
    DomainError,
    InputError,
    StiffnessError,
)
from .grid import (
    SizeGrid,
    State,
    build_grid,
    density_state,
    exponential_state,
    moment,
    monodisperse_state,
    table_state,
    tail_moment,
    weight_vector,
)
from .integrate import (
    PicardResult,
    RunOutput,
    Tolerances,
    picard_solve,
    run,
    simulate,
    step,
)
from .kernel import KernelSpec, eval_kernel, kernel_bound_check, kernel_matrix
from .output import emit_outputs, load_run
from .scheme import (
    RhsWorkspace,
    precompute,
    rhs,
    rhs_arrays,
    subgrid_moment_flux,
    weak_form_residual,
)

__version__ = "0.1.0"
