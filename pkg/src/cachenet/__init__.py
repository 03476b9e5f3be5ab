"""Cache-aided two-tier cellular networks: analysis, simulation, optimization.

The package models a planar field of cache-equipped small cells overlaid
by wireless backhaul nodes and provides three coordinated views of it:

* :mod:`cachenet.analytic` - closed-form success probability, area
  spectral efficiency, area energy consumption, and energy efficiency for
  static and dynamic terminal-association policies;
* :mod:`cachenet.montecarlo` - an independent brute-force simulator of the
  same model with reproducible, parallelism-invariant randomness;
* :mod:`cachenet.optimizer` - budget-constrained deployment optimizers
  (density vs. storage) with an exhaustive grid cross-check.

:mod:`cachenet.cli` exposes the experiment recipes as a command-line tool.
"""

from .analytic import (
    DEFAULT_QUADRATURE,
    PolicyMetrics,
    QuadratureSpec,
    aec,
    ase,
    dynamic_miss_integral,
    energy_efficiency,
    laplace_dynamic_ut,
    laplace_static_sc,
    laplace_static_ut,
    omega,
    policy_metrics,
    success_dynamic,
    success_dynamic_lower_bound,
    success_probability,
    success_static,
)
from .config import (
    Experiment,
    ExperimentConfig,
    default_cache_economics,
    default_config,
    default_network_params,
    parse_config,
)
from .errors import (
    CachenetError,
    ConfigError,
    DomainError,
    EnergyOrderingError,
    InfeasibleBudgetError,
    QuadratureConvergenceError,
)
from .experiments import RunResult, run
from .model import (
    CacheEconomics,
    LinkGeometry,
    NetworkParams,
    Policy,
    hit_probability,
    link_distances,
    round_storage,
    total_energy,
    upsilon,
)
from .montecarlo import (
    NetworkRealization,
    SimulationSpec,
    SuccessEstimate,
    estimate_success,
    evaluate_trial,
    realization_to_csv,
    sample_realization,
    window_radius,
)
from .optimizer import (
    DeploymentSolution,
    FeasibleCurve,
    Objective,
    feasible_curve,
    feasible_density_interval,
    grid_verify,
    objective_value,
    solve_p1,
    solve_p2,
    storage_on_budget,
)

__version__ = "0.1.0"
