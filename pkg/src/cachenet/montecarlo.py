"""Brute-force Monte Carlo oracle for the success probabilities.

This module is the independent counterpart of :mod:`cachenet.analytic`:
it samples the marked planar Poisson field of small cells (each carrying
a displaced backhaul node, a cache state, and unit-mean exponential fading
on every link to the receiver), accumulates the interference sums
directly, and averages SINR-threshold indicators.

Geometry conventions
--------------------
The typical terminal sits at the origin, its serving small cell at
distance ``r_ut`` on the +x axis, and the serving backhaul node at
distance ``r_bh`` from that cell at a uniformly random angle ``phi`` (the
backhaul-to-terminal distance squared is then
``r_ut^2 + r_bh^2 + 2 r_ut r_bh cos(phi)``). Interferer fields are
windowed to a disk around the relevant receiver whose radius comes from
the shot-noise tail bound (:func:`window_radius`).

Static association multiplies two per-hop tail probabilities, which
presumes independent interference on the two hops; the default estimator
matches that by drawing an independent interferer realization per hop.
Set ``SimulationSpec.correlated_hops`` to share one set of interferer
positions between the hops (fresh fading) for sensitivity studies.

Randomness and reproducibility
------------------------------
All draws come from counter-based Philox streams keyed so that results
cannot depend on execution order or degree of parallelism:

* :func:`sample_realization` for trial ``t`` uses ``key = [seed, t]``.
* The batched estimator processes trials in fixed-size batches of
  ``BATCH_TRIALS``; batch ``b`` uses ``key = [seed, BATCH_STREAM_BASE + b]``
  and a documented in-batch draw order. Batch results are integer counts,
  so any partition of batches over workers reduces to identical totals.

The batched estimator exploits two measure-preserving facts about the
model to stay fast: independently thinned subsets of a Poisson field are
independent Poisson fields, and displacing every point by an independent
fixed-length offset leaves a Poisson field a Poisson field. It therefore
samples the interfering small cells and interfering backhaul nodes as
separate uniform disks at their thinned densities, which is distributionally
identical to marking and displacing each interferer explicitly (as
:func:`sample_realization` does) up to the common window truncation.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import NetworkParams, Policy

__all__ = [
    "BATCH_TRIALS",
    "SimulationSpec",
    "SuccessEstimate",
    "InterfererField",
    "NetworkRealization",
    "window_radius",
    "sample_realization",
    "evaluate_trial",
    "estimate_success",
    "realization_to_csv",
]

BATCH_TRIALS = 4096
# Batched streams live in the upper half of the Philox stream word so they
# can never collide with per-trial streams (trial indices stay below 2^63).
BATCH_STREAM_BASE = 1 << 63

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SimulationSpec:
    """What to simulate and how reproducibly.

    ``truncation_fraction`` bounds the expected interference mass discarded
    by windowing the interferer field, relative to the tail beyond the
    access-link distance; smaller values mean larger windows.
    ``stratified`` evaluates both cache branches of every trial and
    combines them with the hit probability instead of drawing the typical
    cell's cache state, reducing variance at identical cost.
    """

    trials: int
    seed: int
    policy: Policy
    truncation_fraction: float = 1e-4
    correlated_hops: bool = False
    stratified: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < BATCH_STREAM_BASE:
            raise DomainError(
                f"seed must lie in [0, 2^63), got {self.seed}"
            )
        if self.policy not in (Policy.STATIC, Policy.DYNAMIC):
            raise DomainError(
                f"simulation policy must be static or dynamic, got {self.policy!r}"
            )
        if not 0.0 < self.truncation_fraction < 1e-2:
            raise DomainError(
                f"truncation_fraction must lie in (0, 1e-2), got "
                f"{self.truncation_fraction}"
            )
        if self.correlated_hops and self.policy is not Policy.STATIC:
            raise DomainError("correlated_hops only applies to the static policy")


@dataclass(frozen=True)
class SuccessEstimate:
    """Estimated success probability with its binomial error bars."""

    p_hat: float
    std_error: float
    trials: int
    ci95: tuple[float, float]


@dataclass(frozen=True)
class InterfererField:
    """One marked interferer set relative to a single receiver.

    ``xy`` holds small-cell coordinates (m) with the receiver at the
    origin; ``hit`` the per-cell cache state; ``bh_angle`` the direction of
    each cell's backhaul node at distance ``r_bh`` from it; ``fade_sc`` and
    ``fade_bh`` the fading of the cell-to-receiver and backhaul-to-receiver
    links.
    """

    xy: np.ndarray
    hit: np.ndarray
    bh_angle: np.ndarray
    fade_sc: np.ndarray
    fade_bh: np.ndarray

    def __post_init__(self):
        for arr in (self.xy, self.hit, self.bh_angle, self.fade_sc, self.fade_bh):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.xy.shape[0]


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled network snapshot for a single trial.

    ``access`` is centered on the terminal. For the static policy with
    independent hops, ``backhaul`` is a second, independently drawn field
    centered on the serving small cell; with ``shared_geometry`` the access
    field doubles as the backhaul-hop field (receiver offset by ``r_ut``
    along +x) and carries fresh backhaul-link fading in ``fade_bh``.
    """

    typical_phi: float
    typical_hit: bool
    fade_access: float
    fade_backhaul: float
    access: InterfererField
    backhaul: InterfererField | None
    shared_geometry: bool = False


def window_radius(params: NetworkParams, truncation_fraction: float) -> float:
    """Disk radius that caps the discarded interference tail.

    The expected shot-noise contribution from beyond radius ``R`` scales as
    ``R**(2 - alpha)`` (transmit power cancels in the ratio), so requiring
    the discarded tail to be at most ``truncation_fraction`` times the tail
    beyond the access-link distance gives
    ``R = r_ut * truncation_fraction**(-1/(alpha - 2))``.
    """
    if not 0.0 < truncation_fraction < 1e-2:
        raise DomainError(
            f"truncation_fraction must lie in (0, 1e-2), got {truncation_fraction}"
        )
    geom = params.link_geometry()
    return geom.r_ut * truncation_fraction ** (-1.0 / (params.alpha - 2.0))


# ---------------------------------------------------------------------------
# Faithful per-trial sampling


def _trial_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    )


def _sample_field(
    rng: np.random.Generator, params: NetworkParams, p_hit: float, radius: float
) -> InterfererField:
    # Fixed draw order: count, radii, angles, cache states, backhaul
    # directions, cell-link fading, backhaul-link fading.
    count = int(rng.poisson(params.lam * math.pi * radius * radius))
    r = radius * np.sqrt(rng.random(count))
    ang = rng.uniform(0.0, _TWO_PI, count)
    xy = np.column_stack((r * np.cos(ang), r * np.sin(ang)))
    hit = rng.random(count) < p_hit
    bh_angle = rng.uniform(0.0, _TWO_PI, count)
    fade_sc = rng.standard_exponential(count)
    fade_bh = rng.standard_exponential(count)
    return InterfererField(xy=xy, hit=hit, bh_angle=bh_angle, fade_sc=fade_sc, fade_bh=fade_bh)


def sample_realization(
    params: NetworkParams, p_hit: float, spec: SimulationSpec, trial_index: int
) -> NetworkRealization:
    """Draw the complete random state of one trial.

    Deterministic given ``(spec.seed, trial_index)``: the trial owns the
    Philox stream ``key = [seed, trial_index]`` and consumes it in a fixed
    order (typical link first, then the field(s)).
    """
    if not 0.0 <= p_hit <= 1.0:
        raise DomainError(f"p_hit must lie in [0, 1], got {p_hit}")
    if not 0 <= trial_index < BATCH_STREAM_BASE:
        raise DomainError(f"trial_index must lie in [0, 2^63), got {trial_index}")
    rng = _trial_rng(spec.seed, trial_index)
    geom = params.link_geometry()
    r_win = window_radius(params, spec.truncation_fraction)

    typical_phi = float(rng.uniform(0.0, _TWO_PI))
    typical_hit = bool(rng.random() < p_hit)
    fade_access = float(rng.standard_exponential())
    fade_backhaul = float(rng.standard_exponential())

    # Enlarge the sampling disk so every backhaul node within the window of
    # its receiver has its parent cell inside the sampled region; shared
    # geometry additionally covers the shifted receiver.
    access_radius = r_win + geom.r_bh + (geom.r_ut if spec.correlated_hops else 0.0)
    access = _sample_field(rng, params, p_hit, access_radius)
    backhaul = None
    if spec.policy is Policy.STATIC and not spec.correlated_hops:
        backhaul = _sample_field(rng, params, p_hit, r_win + geom.r_bh)
    return NetworkRealization(
        typical_phi=typical_phi,
        typical_hit=typical_hit,
        fade_access=fade_access,
        fade_backhaul=fade_backhaul,
        access=access,
        backhaul=backhaul,
        shared_geometry=spec.correlated_hops,
    )


def _field_interference_sc(field: InterfererField, params: NetworkParams) -> float:
    # Every interfering cell transmits toward its own terminal; all of them
    # land in the receiver's band.
    d2 = np.einsum("ij,ij->i", field.xy, field.xy)
    with np.errstate(divide="ignore"):
        return float(np.sum(params.rho_sc * field.fade_sc * d2 ** (-params.alpha / 2.0)))


def _bh_positions(field: InterfererField, r_bh: float) -> np.ndarray:
    offsets = np.column_stack((np.cos(field.bh_angle), np.sin(field.bh_angle)))
    return field.xy + r_bh * offsets


def _field_interference_bh(
    field: InterfererField,
    params: NetworkParams,
    r_bh: float,
    receiver: np.ndarray,
) -> float:
    # Only backhaul nodes currently serving a cache miss transmit.
    miss = ~field.hit
    if not miss.any():
        return 0.0
    rel = _bh_positions(field, r_bh)[miss] - receiver
    d2 = np.einsum("ij,ij->i", rel, rel)
    with np.errstate(divide="ignore"):
        return float(
            np.sum(params.rho_bh * field.fade_bh[miss] * d2 ** (-params.alpha / 2.0))
        )


def _field_interference_mixed(
    field: InterfererField, params: NetworkParams, r_bh: float
) -> float:
    # Dynamic policy: each interferer contributes its cell on a hit and its
    # backhaul node on a miss, on the shared resource.
    xy_bh = _bh_positions(field, r_bh)
    xy = np.where(field.hit[:, None], field.xy, xy_bh)
    power = np.where(field.hit, params.rho_sc, params.rho_bh)
    fade = np.where(field.hit, field.fade_sc, field.fade_bh)
    d2 = np.einsum("ij,ij->i", xy, xy)
    with np.errstate(divide="ignore"):
        return float(np.sum(power * fade * d2 ** (-params.alpha / 2.0)))


def evaluate_trial(
    realization: NetworkRealization,
    params: NetworkParams,
    policy: Policy,
    typical_hit: bool | None = None,
) -> bool:
    """Success indicator of one trial.

    ``typical_hit`` overrides the realization's drawn cache state, which
    lets stratified estimators evaluate both branches of the same
    realization.
    """
    hit = realization.typical_hit if typical_hit is None else typical_hit
    geom = params.link_geometry()
    theta, sigma2 = params.theta, params.sigma2

    if policy is Policy.STATIC:
        i_ut = _field_interference_sc(realization.access, params)
        signal_ut = params.rho_sc * geom.r_ut ** (-params.alpha) * realization.fade_access
        ok_access = signal_ut > theta * (i_ut + sigma2)
        if hit:
            return bool(ok_access)
        if realization.shared_geometry:
            field = realization.access
            receiver = np.array([geom.r_ut, 0.0])
        else:
            if realization.backhaul is None:
                raise DomainError(
                    "static evaluation needs a backhaul-hop field; the "
                    "realization was sampled for the dynamic policy"
                )
            field = realization.backhaul
            receiver = np.zeros(2)
        i_sc = _field_interference_bh(field, params, geom.r_bh, receiver)
        signal_sc = params.rho_bh * geom.r_bh ** (-params.alpha) * realization.fade_backhaul
        ok_backhaul = signal_sc > theta * (i_sc + sigma2)
        return bool(ok_access and ok_backhaul)

    if policy is Policy.DYNAMIC:
        i_mixed = _field_interference_mixed(realization.access, params, geom.r_bh)
        if hit:
            signal = params.rho_sc * geom.r_ut ** (-params.alpha) * realization.fade_access
        else:
            d2 = (
                geom.r_ut**2
                + geom.r_bh**2
                + 2.0 * geom.r_ut * geom.r_bh * math.cos(realization.typical_phi)
            )
            signal = params.rho_bh * d2 ** (-params.alpha / 2.0) * realization.fade_backhaul
        return bool(signal > theta * (i_mixed + sigma2))

    raise DomainError(f"cannot evaluate policy {policy!r}")


def realization_to_csv(realization: NetworkRealization, path) -> None:
    """Dump the access-field interferers, one row per cell.

    Column order: ``x_m, y_m, hit_flag, bh_angle_rad``.
    """
    field = realization.access
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x_m,y_m,hit_flag,bh_angle_rad\n")
        for i in range(len(field)):
            fh.write(
                f"{field.xy[i, 0]:.12g},{field.xy[i, 1]:.12g},"
                f"{int(field.hit[i])},{field.bh_angle[i]:.12g}\n"
            )


# ---------------------------------------------------------------------------
# Batched vectorized estimator


class _FieldBuffers:
    """Reusable scratch arrays for one thinned field's draws."""

    def __init__(self, mean_per_batch: float, dtype):
        cap = int(mean_per_batch + 8.0 * math.sqrt(mean_per_batch + 1.0)) + 64
        self.dtype = dtype
        self.u = np.empty(cap + 1, dtype=dtype)
        self.h = np.empty(cap + 1, dtype=dtype)

    def view(self, total: int) -> tuple[np.ndarray, np.ndarray]:
        if total + 1 > self.u.shape[0]:
            self.u = np.empty(total + 1, dtype=self.dtype)
            self.h = np.empty(total + 1, dtype=self.dtype)
        return self.u[: total + 1], self.h[: total + 1]


def _segment_sums(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Per-trial sums of a flat contribution array.

    ``values`` must have one sentinel slot past the real data (set to 0
    here) so that trailing empty segments index legally; empty segments are
    zeroed afterwards because ``reduceat`` reports a neighbor element for
    them.
    """
    total = int(counts.sum())
    values[total] = 0.0
    starts = np.empty(counts.shape[0], dtype=np.int64)
    starts[0] = 0
    np.cumsum(counts[:-1], out=starts[1:])
    sums = np.add.reduceat(values[: total + 1], starts)
    sums[counts == 0] = 0.0
    return sums.astype(np.float64, copy=False)


def _thinned_field_sums(
    rng: np.random.Generator,
    density: float,
    area: float,
    n_trials: int,
    alpha: float,
    buffers: _FieldBuffers,
) -> np.ndarray:
    """Per-trial sums of ``fade * (r^2 / r_win^2)**(-alpha/2)`` for one field.

    Positions are uniform on the window disk, so the squared distance is
    ``r_win^2`` times a uniform variate; the ``r_win`` scaling is applied
    by the caller. Draw order: counts, position variates, fading.
    """
    counts = rng.poisson(density * area, n_trials)
    total = int(counts.sum())
    u, h = buffers.view(total)
    u = u[:total]
    h_full = h
    h = h[:total]
    if total:
        rng.random(out=u, dtype=buffers.dtype)
        np.subtract(1.0, u, out=u)  # (0, 1]: keeps the nearest interferer finite
        rng.standard_exponential(out=h, dtype=buffers.dtype)
        if alpha == 4.0:
            np.multiply(u, u, out=u)
        else:
            np.power(u, alpha / 2.0, out=u)
        np.divide(h, u, out=h)
    return _segment_sums(h_full, counts)


def _batch_rng(seed: int, batch_index: int) -> np.random.Generator:
    return _trial_rng(seed, BATCH_STREAM_BASE + batch_index)


def _run_batch(
    params: NetworkParams,
    p_hit: float,
    spec: SimulationSpec,
    batch_index: int,
    n_trials: int,
    buffers: tuple[_FieldBuffers, _FieldBuffers],
) -> np.ndarray:
    """Success counts of one batch: ``[hit_branch, miss_branch, both, bernoulli]``."""
    rng = _batch_rng(spec.seed, batch_index)
    geom = params.link_geometry()
    r_win = window_radius(params, spec.truncation_fraction)
    area = math.pi * r_win * r_win
    alpha = params.alpha
    win_scale = r_win ** (-alpha)
    theta, sigma2 = params.theta, params.sigma2
    buf_a, buf_b = buffers

    if spec.policy is Policy.STATIC:
        # Access hop sees every other cell; the backhaul hop sees only the
        # thinned miss-state backhaul field.
        sums_ut = _thinned_field_sums(rng, params.lam, area, n_trials, alpha, buf_a)
        sums_bh = _thinned_field_sums(
            rng, params.lam * (1.0 - p_hit), area, n_trials, alpha, buf_b
        )
        i_ut = params.rho_sc * win_scale * sums_ut
        i_bh = params.rho_bh * win_scale * sums_bh
        u_hit = rng.random(n_trials)
        fade_access = rng.standard_exponential(n_trials)
        fade_backhaul = rng.standard_exponential(n_trials)
        ok_hit = params.rho_sc * geom.r_ut ** (-alpha) * fade_access > theta * (i_ut + sigma2)
        ok_bh = params.rho_bh * geom.r_bh ** (-alpha) * fade_backhaul > theta * (i_bh + sigma2)
        ok_miss = ok_hit & ok_bh
    else:
        # Dynamic: hit-state cells and miss-state backhaul nodes interfere
        # as two independent thinned fields on the shared resource.
        sums_sc = _thinned_field_sums(rng, params.lam * p_hit, area, n_trials, alpha, buf_a)
        sums_bh = _thinned_field_sums(
            rng, params.lam * (1.0 - p_hit), area, n_trials, alpha, buf_b
        )
        interference = win_scale * (params.rho_sc * sums_sc + params.rho_bh * sums_bh)
        u_hit = rng.random(n_trials)
        fade = rng.standard_exponential(n_trials)
        phi = rng.uniform(0.0, _TWO_PI, n_trials)
        threshold = theta * (interference + sigma2)
        ok_hit = params.rho_sc * geom.r_ut ** (-alpha) * fade > threshold
        d2 = geom.r_ut**2 + geom.r_bh**2 + 2.0 * geom.r_ut * geom.r_bh * np.cos(phi)
        ok_miss = params.rho_bh * d2 ** (-alpha / 2.0) * fade > threshold

    bernoulli = np.where(u_hit < p_hit, ok_hit, ok_miss)
    return np.array(
        [ok_hit.sum(), ok_miss.sum(), (ok_hit & ok_miss).sum(), bernoulli.sum()],
        dtype=np.int64,
    )


def _batched_counts(
    params: NetworkParams,
    p_hit: float,
    spec: SimulationSpec,
    first_batch: int,
    last_batch: int,
) -> np.ndarray:
    dtype = np.float32 if params.alpha == 4.0 else np.float64
    mean_a = params.lam * math.pi * window_radius(params, spec.truncation_fraction) ** 2
    buffers = (
        _FieldBuffers(mean_a * BATCH_TRIALS, dtype),
        _FieldBuffers(mean_a * BATCH_TRIALS, dtype),
    )
    totals = np.zeros(4, dtype=np.int64)
    full_batches, remainder = divmod(spec.trials, BATCH_TRIALS)
    for b in range(first_batch, last_batch):
        n = BATCH_TRIALS if b < full_batches else remainder
        totals += _run_batch(params, p_hit, spec, b, n, buffers)
    return totals


def _per_trial_counts(
    params: NetworkParams,
    p_hit: float,
    spec: SimulationSpec,
    first_trial: int,
    last_trial: int,
) -> np.ndarray:
    totals = np.zeros(4, dtype=np.int64)
    for t in range(first_trial, last_trial):
        realization = sample_realization(params, p_hit, spec, t)
        ok_hit = evaluate_trial(realization, params, spec.policy, typical_hit=True)
        ok_miss = evaluate_trial(realization, params, spec.policy, typical_hit=False)
        bern = ok_hit if realization.typical_hit else ok_miss
        totals += np.array(
            [ok_hit, ok_miss, ok_hit and ok_miss, bern], dtype=np.int64
        )
    return totals


def _worker(args) -> np.ndarray:
    params, p_hit, spec, method, lo, hi = args
    if method == "batched":
        return _batched_counts(params, p_hit, spec, lo, hi)
    return _per_trial_counts(params, p_hit, spec, lo, hi)


def estimate_success(
    params: NetworkParams,
    p_hit: float,
    spec: SimulationSpec,
    workers: int = 1,
    method: str = "batched",
) -> SuccessEstimate:
    """Estimate the delivery success probability by simulation.

    ``method='batched'`` runs the vectorized estimator (the default;
    distributionally identical to the per-trial construction, see the
    module docstring). ``method='per_trial'`` evaluates
    :func:`evaluate_trial` on :func:`sample_realization` literally, one
    trial stream at a time; it is the reference implementation and the
    only one supporting ``correlated_hops``. Both are deterministic for a
    fixed spec, independent of ``workers``.
    """
    if not 0.0 <= p_hit <= 1.0:
        raise DomainError(f"p_hit must lie in [0, 1], got {p_hit}")
    if method not in ("batched", "per_trial"):
        raise DomainError(f"method must be 'batched' or 'per_trial', got {method!r}")
    if spec.correlated_hops and method == "batched":
        method = "per_trial"

    if method == "batched":
        n_units = -(-spec.trials // BATCH_TRIALS)  # ceil division
    else:
        n_units = spec.trials

    if workers <= 1 or n_units == 1:
        totals = _worker((params, p_hit, spec, method, 0, n_units))
    else:
        n_tasks = min(n_units, workers * 4)
        bounds = np.linspace(0, n_units, n_tasks + 1, dtype=int)
        tasks = [
            (params, p_hit, spec, method, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        totals = np.zeros(4, dtype=np.int64)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_worker, tasks):
                totals += part
    return _assemble_estimate(totals, p_hit, spec)


def _assemble_estimate(
    totals: np.ndarray, p_hit: float, spec: SimulationSpec
) -> SuccessEstimate:
    n = spec.trials
    n_hit, n_miss, n_both, n_bern = (int(v) for v in totals)
    if spec.stratified:
        q_hit = n_hit / n
        q_miss = n_miss / n
        p_hat = p_hit * q_hit + (1.0 - p_hit) * q_miss
        # The branch indicators share each trial's interference, so the
        # variance needs their empirical covariance.
        cov = n_both / n - q_hit * q_miss
        var = (
            p_hit**2 * q_hit * (1.0 - q_hit)
            + (1.0 - p_hit) ** 2 * q_miss * (1.0 - q_miss)
            + 2.0 * p_hit * (1.0 - p_hit) * cov
        ) / n
        std_error = math.sqrt(max(var, 0.0))
    else:
        p_hat = n_bern / n
        std_error = math.sqrt(p_hat * (1.0 - p_hat) / n)
    return SuccessEstimate(
        p_hat=p_hat,
        std_error=std_error,
        trials=n,
        ci95=(p_hat - 1.96 * std_error, p_hat + 1.96 * std_error),
    )
