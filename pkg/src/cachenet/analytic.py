"""Closed-form success probability, ASE, AEC, and EE evaluators.

The success probabilities come out of the standard exponential-fading
machinery: conditioning on the serving-link fading turns each SINR tail
probability into a noise factor times the Laplace transform of the
aggregate interference, and for homogeneous planar interferer fields those
transforms are ``exp(-2*pi*density*upsilon(power*s))``.

The only non-elementary piece is the dynamic-policy miss term, a smooth
average over the relative orientation of the serving backhaul node. It is
evaluated with a node-doubling trapezoidal rule on the full period, which
converges spectrally for this integrand; tolerances are controlled by
:class:`QuadratureSpec`.

All functions are pure and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureConvergenceError
from .model import CacheEconomics, NetworkParams, Policy, hit_probability, total_energy, upsilon

__all__ = [
    "QuadratureSpec",
    "PolicyMetrics",
    "DEFAULT_QUADRATURE",
    "laplace_static_ut",
    "laplace_static_sc",
    "laplace_dynamic_ut",
    "omega",
    "success_static",
    "success_dynamic",
    "success_dynamic_lower_bound",
    "success_probability",
    "dynamic_miss_integral",
    "ase",
    "aec",
    "energy_efficiency",
    "policy_metrics",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the periodic trapezoidal rule with node doubling."""

    initial_nodes: int = 64
    relative_tolerance: float = 1e-9
    max_doublings: int = 12

    def __post_init__(self):
        if self.initial_nodes < 8:
            raise DomainError(
                f"initial_nodes must be >= 8, got {self.initial_nodes}"
            )
        if not 0 < self.relative_tolerance < 1e-3:
            raise DomainError(
                f"relative_tolerance must lie in (0, 1e-3), got "
                f"{self.relative_tolerance}"
            )
        if self.max_doublings < 1:
            raise DomainError(
                f"max_doublings must be >= 1, got {self.max_doublings}"
            )


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class PolicyMetrics:
    """Per-policy results: success probability, ASE, AEC, and EE."""

    policy: Policy
    p_suc: float
    ase: float
    aec: float
    ee: float


def _check_p_hit(p_hit: float) -> None:
    if not 0.0 <= p_hit <= 1.0:
        raise DomainError(f"p_hit must lie in [0, 1], got {p_hit}")


def laplace_static_ut(s: float, params: NetworkParams) -> float:
    """Interference Laplace transform at the terminal, static policy.

    Every other small cell interferes on the access resource, so the
    exponent carries the full density: ``exp(-2*pi*lam*upsilon(rho_sc*s))``.
    Equals 1 at ``s = 0`` and is strictly decreasing in ``s`` and ``lam``.
    """
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    return math.exp(-2.0 * math.pi * params.lam * upsilon(params.rho_sc * s, params.alpha))


def laplace_static_sc(s: float, p_hit: float, params: NetworkParams) -> float:
    """Interference Laplace transform at the small cell, static policy.

    Only backhaul nodes currently feeding a cache miss interfere, i.e. the
    field is thinned to density ``lam*(1 - p_hit)``. Equals 1 when the
    thinned field is empty (``p_hit = 1``).
    """
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    _check_p_hit(p_hit)
    return math.exp(
        -2.0 * math.pi * params.lam * (1.0 - p_hit)
        * upsilon(params.rho_bh * s, params.alpha)
    )


def laplace_dynamic_ut(s: float, p_hit: float, params: NetworkParams) -> float:
    """Interference Laplace transform at the terminal, dynamic policy.

    Each interfering cell contributes on the shared resource either as a
    small cell (hit, probability ``p_hit``) or through its backhaul node
    (miss), giving the product of two thinned-field transforms.
    """
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    _check_p_hit(p_hit)
    exponent = -2.0 * math.pi * params.lam * (
        p_hit * upsilon(params.rho_sc * s, params.alpha)
        + (1.0 - p_hit) * upsilon(params.rho_bh * s, params.alpha)
    )
    return math.exp(exponent)


def omega(r_ut: float, r_bh: float, phi, alpha: float):
    """Pathloss kernel ``(r_ut^2 + r_bh^2 + 2 r_ut r_bh cos(phi))**(alpha/2)``.

    This is the serving backhaul-to-terminal distance raised to ``alpha``,
    as a function of the relative orientation ``phi`` of the backhaul node.
    Symmetric around ``phi = 0`` where it attains its maximum
    ``(r_ut + r_bh)**alpha``; minimum ``(r_bh - r_ut)**alpha`` at ``phi = pi``.
    Accepts scalar or array ``phi``.
    """
    if not 0 < r_ut < r_bh:
        raise DomainError(f"need r_bh > r_ut > 0, got r_ut={r_ut}, r_bh={r_bh}")
    d2 = r_ut * r_ut + r_bh * r_bh + 2.0 * r_ut * r_bh * np.cos(phi)
    return d2 ** (alpha / 2.0)


def _mean_over_period(integrand, quad: QuadratureSpec) -> float:
    """Average a smooth 2*pi-periodic function over one period.

    Uniform-node trapezoidal rule (equivalently the node mean, since the
    endpoints coincide) with node doubling that reuses previous evaluations;
    stops once successive estimates agree to the requested relative
    tolerance.
    """
    n = quad.initial_nodes
    estimate = float(np.mean(integrand(2.0 * math.pi * np.arange(n) / n)))
    previous = math.inf
    for _ in range(quad.max_doublings):
        midpoints = 2.0 * math.pi * (np.arange(n) + 0.5) / n
        refined = 0.5 * (estimate + float(np.mean(integrand(midpoints))))
        n *= 2
        if abs(refined - estimate) <= quad.relative_tolerance * max(abs(refined), 1e-300):
            return refined
        previous, estimate = estimate, refined
    raise QuadratureConvergenceError(
        f"periodic quadrature did not converge to relative tolerance "
        f"{quad.relative_tolerance} within {quad.max_doublings} doublings "
        f"({n} nodes)",
        last_iterates=(previous, estimate),
    )


def dynamic_miss_integral(
    params: NetworkParams,
    p_hit: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Orientation average of the dynamic interference transform on a miss.

    Computes ``mean over phi of L_dynamic(theta/rho_bh * omega(r_ut, r_bh, phi))``,
    the factor multiplying the miss weight in :func:`success_dynamic`.
    """
    _check_p_hit(p_hit)
    geom = params.link_geometry()
    coeff = 2.0 * math.pi * params.lam
    scale_sc = p_hit * _upsilon_prefactor(params.rho_sc, params.alpha)
    scale_bh = (1.0 - p_hit) * _upsilon_prefactor(params.rho_bh, params.alpha)
    s_base = params.theta / params.rho_bh
    two_over_alpha = 2.0 / params.alpha

    def integrand(phi: np.ndarray) -> np.ndarray:
        z = (s_base * omega(geom.r_ut, geom.r_bh, phi, params.alpha)) ** two_over_alpha
        return np.exp(-coeff * (scale_sc + scale_bh) * z)

    return _mean_over_period(integrand, quad)


def _upsilon_prefactor(rho: float, alpha: float) -> float:
    # upsilon(rho*s) = prefactor * s**(2/alpha) with the rho dependence folded in
    return (
        math.pi * rho ** (2.0 / alpha)
        / (math.sin(2.0 * math.pi / alpha) * alpha)
    )


def _noise_factor(theta: float, sigma2: float, distance_pow: float, rho: float) -> float:
    return math.exp(-theta * sigma2 * distance_pow / rho)


def success_static(params: NetworkParams, p_hit: float) -> float:
    """Delivery success probability under static association.

    Product of the access-hop tail probability and the hit-weighted
    backhaul-hop factor; the hops are modelled with independent
    interference states (the simulator's default matches this).
    Non-decreasing in ``p_hit``, non-increasing in ``theta``; equals 1 at
    ``theta = 0``.
    """
    _check_p_hit(p_hit)
    if params.theta == 0.0:
        return 1.0
    geom = params.link_geometry()
    rut_a = geom.r_ut ** params.alpha
    rbh_a = geom.r_bh ** params.alpha
    access = (
        _noise_factor(params.theta, params.sigma2, rut_a, params.rho_sc)
        * laplace_static_ut(params.theta * rut_a / params.rho_sc, params)
    )
    backhaul = (
        _noise_factor(params.theta, params.sigma2, rbh_a, params.rho_bh)
        * laplace_static_sc(params.theta * rbh_a / params.rho_bh, p_hit, params)
    )
    return access * (p_hit + (1.0 - p_hit) * backhaul)


def success_dynamic(
    params: NetworkParams,
    p_hit: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Delivery success probability under dynamic association.

    Hit term in closed form; the miss term averages the interference
    transform over the serving backhaul node's orientation (see
    :func:`dynamic_miss_integral`). Equals 1 at ``theta = 0``.
    """
    _check_p_hit(p_hit)
    if params.theta == 0.0:
        return 1.0
    geom = params.link_geometry()
    rut_a = geom.r_ut ** params.alpha
    rbh_a = geom.r_bh ** params.alpha
    hit_term = p_hit * (
        _noise_factor(params.theta, params.sigma2, rut_a, params.rho_sc)
        * laplace_dynamic_ut(params.theta * rut_a / params.rho_sc, p_hit, params)
    )
    if p_hit == 1.0:
        return hit_term
    miss_term = (1.0 - p_hit) * (
        _noise_factor(params.theta, params.sigma2, rbh_a, params.rho_bh)
        * dynamic_miss_integral(params, p_hit, quad)
    )
    return hit_term + miss_term


def success_dynamic_lower_bound(params: NetworkParams, p_hit: float) -> float:
    """Closed-form lower bound on :func:`success_dynamic`.

    Replaces the orientation average by its smallest value, attained when
    the serving backhaul node sits at the worst-case distance
    ``r_ut + r_bh`` from the terminal. Coincides with the exact value at
    ``p_hit = 1`` where the miss term has zero weight.
    """
    _check_p_hit(p_hit)
    if params.theta == 0.0:
        return 1.0
    geom = params.link_geometry()
    rut_a = geom.r_ut ** params.alpha
    rbh_a = geom.r_bh ** params.alpha
    worst_a = (geom.r_ut + geom.r_bh) ** params.alpha
    hit_term = p_hit * (
        _noise_factor(params.theta, params.sigma2, rut_a, params.rho_sc)
        * laplace_dynamic_ut(params.theta * rut_a / params.rho_sc, p_hit, params)
    )
    miss_term = (1.0 - p_hit) * (
        _noise_factor(params.theta, params.sigma2, rbh_a, params.rho_bh)
        * laplace_dynamic_ut(params.theta * worst_a / params.rho_bh, p_hit, params)
    )
    return hit_term + miss_term


def success_probability(
    policy: Policy,
    params: NetworkParams,
    p_hit: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Success probability for the given policy (or bound label)."""
    if policy is Policy.STATIC:
        return success_static(params, p_hit)
    if policy is Policy.DYNAMIC:
        return success_dynamic(params, p_hit, quad)
    if policy is Policy.DYNAMIC_LOWER_BOUND:
        return success_dynamic_lower_bound(params, p_hit)
    raise DomainError(f"unknown policy {policy!r}")


def _resource_factor(policy: Policy) -> float:
    # static splits the resource between the two hops; dynamic uses all of it
    return 0.5 if policy is Policy.STATIC else 1.0


def ase(
    policy: Policy,
    params: NetworkParams,
    p_hit: float,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Area spectral efficiency in bps/Hz/m^2.

    ``resource_factor * lam * P_suc * log2(1 + theta)`` with the link
    distances recomputed from the current density inside the success
    probability.
    """
    p_suc = success_probability(policy, params, p_hit, quad)
    return _resource_factor(policy) * params.lam * p_suc * math.log2(1.0 + params.theta)


def aec(lam: float, storage: float, econ: CacheEconomics) -> float:
    """Area energy consumption ``lam * E_tot(storage)`` in J/m^2."""
    if lam < 0:
        raise DomainError(f"lambda must be >= 0 SCs/m^2, got {lam}")
    return lam * total_energy(storage, econ.catalog_size, econ.e_hit, econ.e_miss)


def energy_efficiency(
    policy: Policy,
    params: NetworkParams,
    econ: CacheEconomics,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Energy efficiency ``ASE / AEC`` in bit/J.

    The density cancels between numerator and denominator, so the result
    depends on ``lam`` only through the success probability. The hit
    probability is derived from ``econ.storage_size``.
    """
    p_hit = hit_probability(econ.storage_size, econ.catalog_size)
    area_energy = aec(params.lam, econ.storage_size, econ)
    if area_energy <= 0.0:
        raise DomainError(
            f"energy efficiency undefined: AEC = {area_energy} J/m^2"
        )
    return ase(policy, params, p_hit, quad) / area_energy


def policy_metrics(
    policy: Policy,
    params: NetworkParams,
    econ: CacheEconomics,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
) -> PolicyMetrics:
    """Bundle success probability, ASE, AEC, and EE for one policy."""
    p_hit = hit_probability(econ.storage_size, econ.catalog_size)
    p_suc = success_probability(policy, params, p_hit, quad)
    spectral = _resource_factor(policy) * params.lam * p_suc * math.log2(1.0 + params.theta)
    area_energy = aec(params.lam, econ.storage_size, econ)
    if area_energy <= 0.0:
        raise DomainError(f"energy efficiency undefined: AEC = {area_energy} J/m^2")
    return PolicyMetrics(
        policy=policy,
        p_suc=p_suc,
        ase=spectral,
        aec=area_energy,
        ee=spectral / area_energy,
    )
