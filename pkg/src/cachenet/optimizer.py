"""Budget-constrained deployment optimization.

Answers the planner's question "more small cells or more storage?" for a
fixed monetary budget per m^2: the spend ``price_sc*lam + price_storage*lam*S``
may not exceed the budget, with the density and storage size confined to a
box. ASE is maximized by buying density first (storage only with leftover
budget); EE by buying storage first. Both closed forms are validated here
against an exhaustive search along the budget-equality curve, on which any
optimum must lie because both objectives improve with storage at fixed
density.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .analytic import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    ase,
    energy_efficiency,
)
from .errors import DomainError, InfeasibleBudgetError
from .model import CacheEconomics, NetworkParams, Policy, hit_probability

__all__ = [
    "Objective",
    "DeploymentSolution",
    "FeasibleCurve",
    "feasible_curve",
    "feasible_density_interval",
    "storage_on_budget",
    "solve_p1",
    "solve_p2",
    "grid_verify",
    "objective_value",
]

_REL_TOL = 1e-9


class Objective(str, Enum):
    """What a deployment grid search maximizes."""

    ASE_STATIC = "ase_static"
    ASE_DYNAMIC = "ase_dynamic"
    EE_STATIC = "ee_static"
    EE_DYNAMIC = "ee_dynamic"

    @property
    def policy(self) -> Policy:
        return Policy.STATIC if self.value.endswith("static") else Policy.DYNAMIC

    @property
    def metric(self) -> str:
        return "ase" if self.value.startswith("ase") else "ee"


@dataclass(frozen=True)
class DeploymentSolution:
    """An optimizer's answer: design point, objective, and active constraints."""

    lambda_star: float
    s_star: float
    objective_value: float
    budget_spent: float
    binding_constraints: frozenset[str]


@dataclass(frozen=True)
class FeasibleCurve:
    """Samples of the budget-equality locus ``S(lam) = (c/lam - p_sc)/p_storage``."""

    budget: float
    lambdas: np.ndarray
    storages: np.ndarray

    def __post_init__(self):
        self.lambdas.setflags(write=False)
        self.storages.setflags(write=False)


def feasible_density_interval(econ: CacheEconomics) -> tuple[float, float]:
    """Density interval on which the budget-equality curve crosses the box."""
    c = econ.budget
    if c < econ.price_sc * econ.lambda_min * (1.0 - _REL_TOL):
        raise InfeasibleBudgetError(
            f"budget {c} $/m^2 cannot afford the minimum density "
            f"{econ.lambda_min} SCs/m^2 at {econ.price_sc} $/SC"
        )
    lam_lo = max(econ.lambda_min, c / (econ.price_sc + econ.price_storage * econ.s_max))
    lam_hi = min(econ.lambda_max, c / econ.price_sc)
    return lam_lo, lam_hi


def storage_on_budget(lam: float, econ: CacheEconomics) -> float:
    """Budget-exhausting storage at a given density, clamped to the box."""
    raw = (econ.budget / lam - econ.price_sc) / econ.price_storage
    return min(max(raw, 0.0), econ.s_max)


def feasible_curve(econ: CacheEconomics, n_points: int) -> FeasibleCurve:
    """Sample the feasible budget-equality curve at log-spaced densities.

    When the budget is large enough to afford the all-max corner of the
    box, the equality curve misses the box entirely and the curve
    degenerates to that single point (the only candidate left).
    """
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points}")
    lam_lo, lam_hi = feasible_density_interval(econ)
    if lam_lo > lam_hi:
        lambdas = np.array([econ.lambda_max])
    else:
        lambdas = np.geomspace(lam_lo, lam_hi, n_points)
    storages = np.array([storage_on_budget(lam, econ) for lam in lambdas])
    return FeasibleCurve(budget=econ.budget, lambdas=lambdas, storages=storages)


def objective_value(
    objective: Objective,
    econ: CacheEconomics,
    params_template: NetworkParams,
    lam: float,
    storage: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Evaluate one design point; distances follow the density."""
    params = replace(params_template, lam=lam)
    if objective.metric == "ase":
        p_hit = hit_probability(storage, econ.catalog_size)
        return ase(objective.policy, params, p_hit, quad)
    return energy_efficiency(
        objective.policy, params, replace(econ, storage_size=storage), quad
    )


def _snap(value: float, target: float) -> float:
    # collapse float jitter from the closed forms onto box edges
    if value != target and abs(value - target) <= _REL_TOL * max(abs(target), 1e-300):
        return target
    return value


def _bindings(lam: float, storage: float, econ: CacheEconomics) -> frozenset[str]:
    spent = econ.price_sc * lam + econ.price_storage * lam * storage
    names = set()
    if abs(spent - econ.budget) <= _REL_TOL * econ.budget:
        names.add("budget")
    if lam == econ.lambda_min:
        names.add("lambda_min")
    if lam == econ.lambda_max:
        names.add("lambda_max")
    if storage == econ.s_max:
        names.add("s_max")
    if storage == 0.0:
        names.add("s_nonneg")
    return frozenset(names)


def _solution(
    lam: float,
    storage: float,
    objective: Objective,
    econ: CacheEconomics,
    params_template: NetworkParams,
    quad: QuadratureSpec,
) -> DeploymentSolution:
    value = objective_value(objective, econ, params_template, lam, storage, quad)
    spent = econ.price_sc * lam + econ.price_storage * lam * storage
    return DeploymentSolution(
        lambda_star=lam,
        s_star=storage,
        objective_value=value,
        budget_spent=spent,
        binding_constraints=_bindings(lam, storage, econ),
    )


def solve_p1(
    econ: CacheEconomics,
    params_template: NetworkParams,
    policy: Policy = Policy.DYNAMIC,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> DeploymentSolution:
    """ASE-maximizing deployment in closed form.

    Density first: ``lam* = min(c/p_sc, lambda_max)``, then whatever budget
    remains buys storage, clamped to the box.
    """
    feasible_density_interval(econ)  # raises if nothing is affordable
    lam = _snap(min(econ.budget / econ.price_sc, econ.lambda_max), econ.lambda_max)
    lam = _snap(lam, econ.lambda_min)
    storage = storage_on_budget(lam, econ)
    objective = Objective.ASE_STATIC if policy is Policy.STATIC else Objective.ASE_DYNAMIC
    return _solution(lam, storage, objective, econ, params_template, quad)


def solve_p2(
    econ: CacheEconomics,
    params_template: NetworkParams,
    policy: Policy = Policy.DYNAMIC,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> DeploymentSolution:
    """EE-maximizing deployment in closed form.

    Storage first: ``S* = min((c/lambda_min - p_sc)/p_storage, s_max)``,
    then the budget fixes the density, clamped to the box.
    """
    feasible_density_interval(econ)
    storage_raw = (econ.budget / econ.lambda_min - econ.price_sc) / econ.price_storage
    storage = min(max(storage_raw, 0.0), econ.s_max)
    lam = econ.budget / (econ.price_sc + econ.price_storage * storage)
    lam = _snap(_snap(lam, econ.lambda_min), econ.lambda_max)
    lam = min(max(lam, econ.lambda_min), econ.lambda_max)
    objective = Objective.EE_STATIC if policy is Policy.STATIC else Objective.EE_DYNAMIC
    return _solution(lam, storage, objective, econ, params_template, quad)


def grid_verify(
    objective: Objective,
    econ: CacheEconomics,
    params_template: NetworkParams,
    resolution: int = 512,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    full_grid: bool = False,
) -> DeploymentSolution:
    """Independent exhaustive check of the closed-form solutions.

    Searches the budget-equality curve at ``resolution`` log-spaced
    densities (ties break toward the cheaper, smaller density).
    ``full_grid=True`` additionally scans storage below the curve at every
    density, auditing the assumption that spending the whole budget is
    never harmful.
    """
    if resolution < 16:
        raise DomainError(f"resolution must be >= 16, got {resolution}")
    curve = feasible_curve(econ, resolution)
    best: tuple[float, float, float] | None = None
    for lam, s_curve in zip(curve.lambdas, curve.storages):
        if full_grid:
            storages = np.linspace(0.0, s_curve, resolution)
        else:
            storages = (s_curve,)
        for storage in storages:
            value = objective_value(
                objective, econ, params_template, float(lam), float(storage), quad
            )
            if best is None or value > best[0] * (1.0 + _REL_TOL):
                best = (value, float(lam), float(storage))
    value, lam, storage = best
    return _solution(lam, storage, objective, econ, params_template, quad)
