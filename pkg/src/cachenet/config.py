"""Experiment configuration: defaults, parsing, and serialization.

Configuration files are line-oriented ``key = value`` text with ``#``
comments. Every key has a bundled default (the reference scenario used
throughout the package), so an empty file is a valid configuration.
Unknown keys, duplicate keys, unparseable values, and values violating a
domain invariant are all rejected with errors naming the offending key.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfigError, DomainError
from .model import CacheEconomics, NetworkParams

__all__ = [
    "Experiment",
    "SweepSpec",
    "ExperimentConfig",
    "default_network_params",
    "default_cache_economics",
    "default_config",
    "parse_config",
    "config_to_text",
    "describe_keys",
]

MAX_SEED = 1 << 63


class Experiment(str, Enum):
    SWEEP_HIT = "sweep_hit"
    FEASIBLE_SET = "feasible_set"
    SWEEP_DENSITY_ASE = "sweep_density_ase"
    SWEEP_DENSITY_EE = "sweep_density_ee"
    OPTIMIZE = "optimize"
    VALIDATE = "validate"


@dataclass(frozen=True)
class SweepSpec:
    """Sweep grid controls; unset fields resolve per experiment."""

    start: float | None = None
    stop: float | None = None
    points: int | None = None
    scale: str | None = None  # "lin" | "log"


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkParams
    economics: CacheEconomics
    budgets: tuple[float, ...]
    experiment: Experiment | None
    sweep: SweepSpec
    trials: int
    seed: int
    truncation_fraction: float
    workers: int
    out_dir: str


def default_network_params() -> NetworkParams:
    """Reference physical-layer scenario used as the all-keys default."""
    return NetworkParams(
        lam=1e-2,
        alpha=4.0,
        theta=1.0,
        sigma2=0.0,
        rho_sc=0.5,
        rho_bh=1.0,
        beta_ut=0.5,
        beta_bh=1.0,
    )


def default_cache_economics(budget: float = 1.0) -> CacheEconomics:
    """Reference catalog/cost scenario used as the all-keys default."""
    return CacheEconomics(
        catalog_size=10_000_000,
        storage_size=0.0,
        s_max=5e6,
        lambda_min=1e-4,
        lambda_max=1e-2,
        price_sc=250.0,
        price_storage=0.005,
        budget=budget,
        e_hit=1.0,
        e_miss=10.0,
    )


DEFAULT_BUDGETS = (1.0, 2.5, 5.0)


def default_config() -> ExperimentConfig:
    return ExperimentConfig(
        network=default_network_params(),
        economics=default_cache_economics(DEFAULT_BUDGETS[0]),
        budgets=DEFAULT_BUDGETS,
        experiment=None,
        sweep=SweepSpec(),
        trials=1_000_000,
        seed=1,
        truncation_fraction=1e-4,
        workers=0,
        out_dir="out",
    )


# key -> (units, help); order defines the serialization layout
_KEY_DOCS: dict[str, tuple[str, str]] = {
    "lambda": ("SCs/m^2", "small-cell density (> 0)"),
    "alpha": ("-", "pathloss exponent (> 2)"),
    "theta": ("-", "SINR threshold, linear (>= 0)"),
    "sigma2": ("W", "noise power (>= 0; 0 = interference-limited)"),
    "rho_sc": ("W", "small-cell transmit power (> 0)"),
    "rho_bh": ("W", "backhaul transmit power (> 0)"),
    "beta_ut": ("-", "access-link distance coefficient (> 0)"),
    "beta_bh": ("-", "backhaul-link distance coefficient (> beta_ut)"),
    "catalog_size": ("files", "catalog size (positive integer)"),
    "storage_size": ("files/SC", "per-cell storage (0 <= S <= s_max)"),
    "s_max": ("files/SC", "storage upper bound (<= catalog_size)"),
    "lambda_min": ("SCs/m^2", "density lower bound (> 0)"),
    "lambda_max": ("SCs/m^2", "density upper bound (>= lambda_min)"),
    "price_sc": ("$/SC", "small-cell unit price (> 0)"),
    "price_storage": ("$/file", "storage unit price (> 0)"),
    "budget": ("$/m^2", "deployment budget; comma list runs one sweep per value"),
    "e_hit": ("J", "energy per file on a cache hit (>= 0)"),
    "e_miss": ("J", "energy per file on a cache miss (>= e_hit)"),
    "experiment": ("-", "one of " + ", ".join(e.value for e in Experiment)),
    "sweep_start": ("-", "sweep grid start, or 'auto'"),
    "sweep_stop": ("-", "sweep grid stop, or 'auto'"),
    "sweep_points": ("-", "sweep grid size / search resolution, or 'auto'"),
    "sweep_scale": ("-", "'lin', 'log', or 'auto'"),
    "trials": ("-", "Monte Carlo trials per cell (>= 1)"),
    "seed": ("-", "base RNG seed (0 <= seed < 2^63)"),
    "truncation_fraction": ("-", "interference tail mass discarded by windowing, in (0, 1e-2)"),
    "workers": ("-", "worker processes for simulation cells (0 = all cores)"),
    "out_dir": ("-", "output directory"),
}


def describe_keys() -> str:
    """Human-readable key table for --help, with the bundled defaults."""
    defaults = _to_mapping(default_config())
    lines = ["configuration keys (key = value, '#' comments):"]
    for key, (units, doc) in _KEY_DOCS.items():
        lines.append(f"  {key:20s} [{units}] {doc} (default: {defaults[key]})")
    return "\n".join(lines)


def _fmt_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _to_mapping(config: ExperimentConfig) -> dict[str, str]:
    net, econ = config.network, config.economics
    return {
        "lambda": _fmt_value(net.lam),
        "alpha": _fmt_value(net.alpha),
        "theta": _fmt_value(net.theta),
        "sigma2": _fmt_value(net.sigma2),
        "rho_sc": _fmt_value(net.rho_sc),
        "rho_bh": _fmt_value(net.rho_bh),
        "beta_ut": _fmt_value(net.beta_ut),
        "beta_bh": _fmt_value(net.beta_bh),
        "catalog_size": _fmt_value(econ.catalog_size),
        "storage_size": _fmt_value(econ.storage_size),
        "s_max": _fmt_value(econ.s_max),
        "lambda_min": _fmt_value(econ.lambda_min),
        "lambda_max": _fmt_value(econ.lambda_max),
        "price_sc": _fmt_value(econ.price_sc),
        "price_storage": _fmt_value(econ.price_storage),
        "budget": ",".join(repr(b) for b in config.budgets),
        "e_hit": _fmt_value(econ.e_hit),
        "e_miss": _fmt_value(econ.e_miss),
        "experiment": config.experiment.value if config.experiment else "auto",
        "sweep_start": _fmt_value(config.sweep.start),
        "sweep_stop": _fmt_value(config.sweep.stop),
        "sweep_points": _fmt_value(config.sweep.points),
        "sweep_scale": _fmt_value(config.sweep.scale),
        "trials": _fmt_value(config.trials),
        "seed": _fmt_value(config.seed),
        "truncation_fraction": _fmt_value(config.truncation_fraction),
        "workers": _fmt_value(config.workers),
        "out_dir": config.out_dir,
    }


def config_to_text(config: ExperimentConfig) -> str:
    """Serialize so that :func:`parse_config` reproduces the config exactly."""
    mapping = _to_mapping(config)
    return "".join(f"{key} = {mapping[key]}\n" for key in _KEY_DOCS)


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': expected a number, got {raw!r}") from None


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"key '{key}': expected an integer, got {raw!r}") from None
    if not value.is_integer():
        raise ConfigError(f"key '{key}': expected an integer, got {raw!r}")
    return int(value)


def _parse_opt(raw: str):
    return None if raw.lower() == "auto" else raw


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Parse ``key = value`` text over the defaults (or an explicit base).

    Every provided key is validated against the owning type's invariants
    before anything is computed; violations surface as :class:`ConfigError`
    naming the key and constraint.
    """
    entries: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _KEY_DOCS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        if not raw:
            raise ConfigError(f"line {lineno}: key '{key}' has no value")
        entries[key] = raw

    config = base if base is not None else default_config()
    return apply_entries(config, entries)


def apply_entries(config: ExperimentConfig, entries: dict[str, str]) -> ExperimentConfig:
    """Apply raw key/value overrides to a config, validating everything."""
    net_kwargs: dict[str, float] = {}
    econ_kwargs: dict[str, float | int] = {}
    net_fields = {
        "lambda": "lam",
        "alpha": "alpha",
        "theta": "theta",
        "sigma2": "sigma2",
        "rho_sc": "rho_sc",
        "rho_bh": "rho_bh",
        "beta_ut": "beta_ut",
        "beta_bh": "beta_bh",
    }
    econ_fields = (
        "storage_size",
        "s_max",
        "lambda_min",
        "lambda_max",
        "price_sc",
        "price_storage",
        "e_hit",
        "e_miss",
    )

    budgets = config.budgets
    experiment = config.experiment
    sweep = config.sweep
    trials, seed = config.trials, config.seed
    truncation, workers = config.truncation_fraction, config.workers
    out_dir = config.out_dir

    for key, raw in entries.items():
        if key in net_fields:
            net_kwargs[net_fields[key]] = _parse_float(key, raw)
        elif key in econ_fields:
            econ_kwargs[key] = _parse_float(key, raw)
        elif key == "catalog_size":
            econ_kwargs[key] = _parse_int(key, raw)
        elif key == "budget":
            parts = [p.strip() for p in raw.split(",") if p.strip()]
            if not parts:
                raise ConfigError("key 'budget': expected at least one value")
            budgets = tuple(_parse_float("budget", p) for p in parts)
        elif key == "experiment":
            if raw == "auto":
                experiment = None
            else:
                try:
                    experiment = Experiment(raw)
                except ValueError:
                    raise ConfigError(
                        f"key 'experiment': unknown experiment {raw!r}; choose "
                        f"from {', '.join(e.value for e in Experiment)}"
                    ) from None
        elif key == "sweep_start":
            opt = _parse_opt(raw)
            sweep = replace(sweep, start=None if opt is None else _parse_float(key, opt))
        elif key == "sweep_stop":
            opt = _parse_opt(raw)
            sweep = replace(sweep, stop=None if opt is None else _parse_float(key, opt))
        elif key == "sweep_points":
            opt = _parse_opt(raw)
            points = None if opt is None else _parse_int(key, opt)
            if points is not None and points < 2:
                raise ConfigError(f"key 'sweep_points': must be >= 2, got {points}")
            sweep = replace(sweep, points=points)
        elif key == "sweep_scale":
            opt = _parse_opt(raw)
            if opt is not None and opt not in ("lin", "log"):
                raise ConfigError(
                    f"key 'sweep_scale': expected 'lin', 'log' or 'auto', got {raw!r}"
                )
            sweep = replace(sweep, scale=opt)
        elif key == "trials":
            trials = _parse_int(key, raw)
            if trials < 1:
                raise ConfigError(f"key 'trials': must be >= 1, got {trials}")
        elif key == "seed":
            seed = _parse_int(key, raw)
            if not 0 <= seed < MAX_SEED:
                raise ConfigError(f"key 'seed': must lie in [0, 2^63), got {seed}")
        elif key == "truncation_fraction":
            truncation = _parse_float(key, raw)
            if not 0.0 < truncation < 1e-2:
                raise ConfigError(
                    f"key 'truncation_fraction': must lie in (0, 1e-2), got {truncation}"
                )
        elif key == "workers":
            workers = _parse_int(key, raw)
            if workers < 0:
                raise ConfigError(f"key 'workers': must be >= 0, got {workers}")
        elif key == "out_dir":
            out_dir = raw
        else:  # pragma: no cover - the key table and this chain move together
            raise ConfigError(f"unhandled key '{key}'")

    try:
        network = replace(config.network, **net_kwargs)
    except DomainError as exc:
        raise ConfigError(f"network parameters: {exc}") from None
    for budget in budgets:
        if not budget > 0:
            raise ConfigError(f"key 'budget': values must be > 0 $/m^2, got {budget}")
    try:
        economics = replace(config.economics, budget=budgets[0], **econ_kwargs)
    except DomainError as exc:
        raise ConfigError(f"economics parameters: {exc}") from None

    return ExperimentConfig(
        network=network,
        economics=economics,
        budgets=budgets,
        experiment=experiment,
        sweep=sweep,
        trials=trials,
        seed=seed,
        truncation_fraction=truncation,
        workers=workers,
        out_dir=out_dir,
    )
