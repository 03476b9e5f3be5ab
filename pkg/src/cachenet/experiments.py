"""Experiment recipes behind the CLI: sweeps, optimization, validation.

Every experiment writes CSV files (stable column order, ``%.12g`` numeric
formatting, no locale separators) plus a gnuplot companion script per CSV,
and an ``effective_config.cfg`` snapshot that reparses to the exact
configuration used. Identical configuration and seed therefore reproduce
every output byte for byte.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .analytic import ase, success_probability
from .config import Experiment, ExperimentConfig, config_to_text
from .errors import ConfigError, InfeasibleBudgetError
from .model import Policy
from .montecarlo import SimulationSpec, estimate_success
from .optimizer import (
    Objective,
    feasible_curve,
    feasible_density_interval,
    grid_verify,
    objective_value,
    solve_p1,
    solve_p2,
    storage_on_budget,
)

__all__ = ["RunResult", "run", "VALIDATE_LAMBDAS", "VALIDATE_HIT_PROBS", "VALIDATE_THETAS"]

VALIDATE_LAMBDAS = (1e-4, 1e-3, 1e-2)
VALIDATE_HIT_PROBS = (0.0, 0.25, 0.5, 0.75, 1.0)
VALIDATE_THETAS = (0.5, 1.0, 2.0)
VALIDATE_PASS_SIGMA = 3.0
VALIDATE_MIN_PASS_RATE = 0.95


@dataclass(frozen=True)
class RunResult:
    """Files an experiment produced and its aggregate status (0 ok, 5 validation failed)."""

    files: tuple[Path, ...]
    status: int


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(path: Path, header: tuple[str, ...], rows) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _write_plot(
    csv_path: Path,
    xlabel: str,
    ylabel: str,
    columns: tuple[tuple[int, int, str], ...],
    logx: bool = False,
) -> Path:
    path = csv_path.with_suffix(".gp")
    lines = [
        f"# gnuplot companion for {csv_path.name}",
        "set datafile separator ','",
        "set key top left",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
    ]
    if logx:
        lines.append("set logscale x")
    plots = ", \\\n     ".join(
        f"'{csv_path.name}' using {x}:{y} with lines title '{title}'"
        for x, y, title in columns
    )
    lines.append(f"plot {plots}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def _resolve_hit_grid(config: ExperimentConfig) -> np.ndarray:
    sweep = config.sweep
    start = 0.0 if sweep.start is None else sweep.start
    stop = 1.0 if sweep.stop is None else sweep.stop
    points = sweep.points or 101
    if not 0.0 <= start < stop <= 1.0:
        raise ConfigError(
            f"hit-probability sweep needs 0 <= start < stop <= 1, got "
            f"[{start}, {stop}]"
        )
    if (sweep.scale or "lin") != "lin":
        raise ConfigError("hit-probability sweeps only support sweep_scale = lin")
    return np.linspace(start, stop, points)


def _resolve_density_grid(config: ExperimentConfig, budget: float) -> np.ndarray:
    econ = replace(config.economics, budget=budget)
    lam_lo, lam_hi = feasible_density_interval(econ)
    lam_hi = min(lam_hi, econ.lambda_max)
    sweep = config.sweep
    if sweep.start is not None:
        lam_lo = max(lam_lo, sweep.start)
    if sweep.stop is not None:
        lam_hi = min(lam_hi, sweep.stop)
    if not lam_lo <= lam_hi:
        raise InfeasibleBudgetError(
            f"density sweep interval is empty for budget {budget} $/m^2"
        )
    points = sweep.points or 64
    if (sweep.scale or "log") == "log":
        return np.geomspace(lam_lo, lam_hi, points)
    return np.linspace(lam_lo, lam_hi, points)


def _sweep_hit(config: ExperimentConfig, out: Path) -> list[Path]:
    rows = []
    for p_hit in _resolve_hit_grid(config):
        rows.append(
            (
                p_hit,
                ase(Policy.STATIC, config.network, float(p_hit)),
                ase(Policy.DYNAMIC, config.network, float(p_hit)),
                ase(Policy.DYNAMIC_LOWER_BOUND, config.network, float(p_hit)),
            )
        )
    csv = _write_csv(
        out / "sweep_hit.csv",
        ("p_hit", "ase_static", "ase_dynamic", "ase_dynamic_lb"),
        rows,
    )
    plot = _write_plot(
        csv,
        "cache hit probability",
        "ASE (bps/Hz/m^2)",
        ((1, 2, "static"), (1, 3, "dynamic"), (1, 4, "dynamic lower bound")),
    )
    return [csv, plot]


def _feasible_set(config: ExperimentConfig, out: Path) -> list[Path]:
    files = []
    points = config.sweep.points or 128
    for budget in config.budgets:
        econ = replace(config.economics, budget=budget)
        curve = feasible_curve(econ, points)
        csv = _write_csv(
            out / f"feasible_set_c{budget:g}.csv",
            ("lambda", "s"),
            zip(curve.lambdas, curve.storages),
        )
        files.append(csv)
        files.append(
            _write_plot(
                csv,
                "SC density (SCs/m^2)",
                "storage size (files/SC)",
                ((1, 2, f"budget {budget:g} $/m^2"),),
                logx=True,
            )
        )
    return files


def _sweep_density(config: ExperimentConfig, out: Path, metric: str) -> list[Path]:
    files = []
    objectives = {
        "ase": (Objective.ASE_STATIC, Objective.ASE_DYNAMIC),
        "ee": (Objective.EE_STATIC, Objective.EE_DYNAMIC),
    }[metric]
    ylabel = "ASE (bps/Hz/m^2)" if metric == "ase" else "EE (bit/J)"
    for budget in config.budgets:
        econ = replace(config.economics, budget=budget)
        rows = []
        for lam in _resolve_density_grid(config, budget):
            lam = float(lam)
            storage = storage_on_budget(lam, econ)
            p_hit = storage / econ.catalog_size
            rows.append(
                (
                    lam,
                    storage,
                    p_hit,
                    objective_value(objectives[0], econ, config.network, lam, storage),
                    objective_value(objectives[1], econ, config.network, lam, storage),
                )
            )
        csv = _write_csv(
            out / f"sweep_density_{metric}_c{budget:g}.csv",
            ("lambda", "s_on_budget", "p_hit", "metric_static", "metric_dynamic"),
            rows,
        )
        files.append(csv)
        files.append(
            _write_plot(
                csv,
                "SC density (SCs/m^2)",
                ylabel,
                ((1, 4, "static"), (1, 5, "dynamic")),
                logx=True,
            )
        )
    return files


def _optimize(config: ExperimentConfig, out: Path) -> list[Path]:
    resolution = config.sweep.points or 512
    rows = []
    for budget in config.budgets:
        econ = replace(config.economics, budget=budget)
        for problem, solver in (("P1", solve_p1), ("P2", solve_p2)):
            for policy in (Policy.STATIC, Policy.DYNAMIC):
                solution = solver(econ, config.network, policy)
                metric = "ase" if problem == "P1" else "ee"
                objective = Objective(f"{metric}_{policy.value}")
                grid = grid_verify(objective, econ, config.network, resolution)
                rows.append(
                    (
                        problem,
                        policy.value,
                        budget,
                        solution.lambda_star,
                        solution.s_star,
                        solution.objective_value,
                        grid.objective_value,
                    )
                )
    csv = _write_csv(
        out / "optimize.csv",
        (
            "problem",
            "policy",
            "budget",
            "lambda_star",
            "s_star",
            "objective",
            "objective_grid",
        ),
        rows,
    )
    plot = _write_plot(
        csv, "budget ($/m^2)", "objective", ((3, 6, "closed form"), (3, 7, "grid")),
    )
    return [csv, plot]


def _validate_cells(config: ExperimentConfig) -> list[tuple]:
    cells = []
    index = 0
    for policy in (Policy.STATIC, Policy.DYNAMIC):
        for lam in VALIDATE_LAMBDAS:
            for p_hit in VALIDATE_HIT_PROBS:
                for theta in VALIDATE_THETAS:
                    params = replace(config.network, lam=lam, theta=theta)
                    # 63-bit per-cell seeds derived from the base seed
                    cell_seed = int(
                        np.random.SeedSequence((config.seed, index)).generate_state(
                            1, np.uint64
                        )[0]
                        & ((1 << 63) - 1)
                    )
                    spec = SimulationSpec(
                        trials=config.trials,
                        seed=cell_seed,
                        policy=policy,
                        truncation_fraction=config.truncation_fraction,
                    )
                    cells.append((params, p_hit, spec))
                    index += 1
    return cells


def _validate_cell(cell) -> tuple:
    params, p_hit, spec = cell
    estimate = estimate_success(params, p_hit, spec)
    analytic = success_probability(spec.policy, params, p_hit)
    passed = abs(estimate.p_hat - analytic) <= VALIDATE_PASS_SIGMA * estimate.std_error
    return (
        spec.policy.value,
        params.lam,
        p_hit,
        params.theta,
        analytic,
        estimate.p_hat,
        estimate.std_error,
        passed,
    )


def _validate(config: ExperimentConfig, out: Path) -> tuple[list[Path], int]:
    cells = _validate_cells(config)
    workers = config.workers or os.cpu_count() or 1
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_validate_cell, cells, chunksize=1))
    else:
        rows = [_validate_cell(cell) for cell in cells]
    csv = _write_csv(
        out / "validate.csv",
        ("policy", "lambda", "p_hit", "theta", "p_analytic", "p_hat", "std_error", "pass"),
        rows,
    )
    plot = _write_plot(
        csv, "analytic success probability", "simulated success probability",
        ((5, 6, "cells"),),
    )
    status = 0
    for policy in (Policy.STATIC, Policy.DYNAMIC):
        policy_rows = [r for r in rows if r[0] == policy.value]
        passed = sum(1 for r in policy_rows if r[-1])
        rate = passed / len(policy_rows)
        print(
            f"validate [{policy.value}]: {passed}/{len(policy_rows)} cells within "
            f"{VALIDATE_PASS_SIGMA:g} sigma"
        )
        if rate < VALIDATE_MIN_PASS_RATE:
            status = 5
    return [csv, plot], status


def run(config: ExperimentConfig) -> RunResult:
    """Execute the configured experiment and return its output files."""
    if config.experiment is None:
        raise ConfigError("no experiment selected")
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    effective = out / "effective_config.cfg"
    with open(effective, "w", encoding="utf-8", newline="") as fh:
        fh.write(config_to_text(config))
    files = [effective]
    status = 0

    if config.experiment is Experiment.SWEEP_HIT:
        files += _sweep_hit(config, out)
    elif config.experiment is Experiment.FEASIBLE_SET:
        files += _feasible_set(config, out)
    elif config.experiment is Experiment.SWEEP_DENSITY_ASE:
        files += _sweep_density(config, out, "ase")
    elif config.experiment is Experiment.SWEEP_DENSITY_EE:
        files += _sweep_density(config, out, "ee")
    elif config.experiment is Experiment.OPTIMIZE:
        files += _optimize(config, out)
    elif config.experiment is Experiment.VALIDATE:
        validate_files, status = _validate(config, out)
        files += validate_files
    else:  # pragma: no cover
        raise ConfigError(f"unhandled experiment {config.experiment!r}")

    return RunResult(files=tuple(files), status=status)
