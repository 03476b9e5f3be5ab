"""Domain parameters and elementary model functions.

Everything else in the package is built on the quantities defined here:
the physical-layer parameter set, the deployment economics, the fixed
link geometry derived from the small-cell density, the uniform-popularity
cache hit probability, and the per-file energy model.

All types are immutable after construction and all functions are pure,
so concurrent use needs no synchronization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, EnergyOrderingError


class Policy(str, Enum):
    """User-terminal association policy.

    ``STATIC``: terminals are always served by their small cell; on a miss
    the file first crosses the backhaul link, and the two hops share the
    radio resource in halves.

    ``DYNAMIC``: terminals are served by the small cell on a hit and
    directly by the backhaul node on a miss, on the full resource.

    ``DYNAMIC_LOWER_BOUND`` labels metrics computed with the closed-form
    worst-case-distance bound for the dynamic policy; it is not a policy a
    network can run.
    """

    STATIC = "static"
    DYNAMIC = "dynamic"
    DYNAMIC_LOWER_BOUND = "dynamic_lower_bound"


@dataclass(frozen=True)
class NetworkParams:
    """Physical-layer configuration of the two-tier network.

    Parameters
    ----------
    lam : float
        Small-cell spatial density in SCs/m^2, strictly positive.
    alpha : float
        Pathloss exponent, strictly greater than 2. At ``alpha = 2`` the
        interference integral diverges (``csc(2*pi/alpha)`` has a pole),
        so the constructor rejects anything at or below 2.
    theta : float
        SINR threshold (linear scale). ``theta = 0`` is accepted and all
        success probabilities are defined as exactly 1 there by continuous
        extension.
    sigma2 : float
        Additive noise power in W; may be exactly 0 for the
        interference-limited regime.
    rho_sc, rho_bh : float
        Small-cell and backhaul transmit powers in W, strictly positive.
    beta_ut, beta_bh : float
        Dimensionless link-geometry coefficients; the fixed link distances
        scale as ``beta / (2 sqrt(lam))``. ``beta_bh > beta_ut`` so that the
        backhaul link is always the longer one.
    """

    lam: float
    alpha: float
    theta: float
    sigma2: float
    rho_sc: float
    rho_bh: float
    beta_ut: float
    beta_bh: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be > 0 SCs/m^2, got {self.lam}")
        if not self.alpha > 2:
            raise DomainError(
                f"alpha must be > 2 (the pathloss integral has a pole at "
                f"alpha = 2), got {self.alpha}"
            )
        if not self.theta >= 0:
            raise DomainError(f"theta must be >= 0, got {self.theta}")
        if not self.sigma2 >= 0:
            raise DomainError(f"sigma2 must be >= 0 W, got {self.sigma2}")
        if not self.rho_sc > 0:
            raise DomainError(f"rho_sc must be > 0 W, got {self.rho_sc}")
        if not self.rho_bh > 0:
            raise DomainError(f"rho_bh must be > 0 W, got {self.rho_bh}")
        if not self.beta_ut > 0:
            raise DomainError(f"beta_ut must be > 0, got {self.beta_ut}")
        if not self.beta_bh > self.beta_ut:
            raise DomainError(
                f"beta_bh must exceed beta_ut (backhaul links are longer "
                f"than access links), got beta_bh={self.beta_bh} <= "
                f"beta_ut={self.beta_ut}"
            )

    def link_geometry(self) -> "LinkGeometry":
        """Link distances implied by the current density; see :func:`link_distances`."""
        return link_distances(self.lam, self.beta_ut, self.beta_bh)


@dataclass(frozen=True)
class CacheEconomics:
    """Catalog, storage, energy, and deployment-cost parameters.

    ``storage_size`` is modelled as a nonnegative real number of files:
    the deployment optimizers treat it continuously. Use
    :func:`round_storage` if an integer file count is needed downstream.
    """

    catalog_size: int
    storage_size: float
    s_max: float
    lambda_min: float
    lambda_max: float
    price_sc: float
    price_storage: float
    budget: float
    e_hit: float
    e_miss: float

    def __post_init__(self):
        if not (isinstance(self.catalog_size, int) and self.catalog_size >= 1):
            raise DomainError(
                f"catalog_size must be a positive integer number of files, "
                f"got {self.catalog_size!r}"
            )
        if not 0 < self.s_max <= self.catalog_size:
            raise DomainError(
                f"s_max must satisfy 0 < s_max <= catalog_size, got "
                f"s_max={self.s_max}, catalog_size={self.catalog_size}"
            )
        if not 0 <= self.storage_size <= self.s_max:
            raise DomainError(
                f"storage_size must lie in [0, s_max], got "
                f"storage_size={self.storage_size}, s_max={self.s_max}"
            )
        if not 0 < self.lambda_min <= self.lambda_max:
            raise DomainError(
                f"need 0 < lambda_min <= lambda_max, got "
                f"lambda_min={self.lambda_min}, lambda_max={self.lambda_max}"
            )
        if not self.price_sc > 0:
            raise DomainError(f"price_sc must be > 0 $/SC, got {self.price_sc}")
        if not self.price_storage > 0:
            raise DomainError(
                f"price_storage must be > 0 $/file, got {self.price_storage}"
            )
        if not self.budget > 0:
            raise DomainError(f"budget must be > 0 $/m^2, got {self.budget}")
        if not self.e_hit >= 0:
            raise DomainError(f"e_hit must be >= 0 J, got {self.e_hit}")
        if self.e_miss < self.e_hit:
            raise EnergyOrderingError(
                f"e_miss must be >= e_hit (backhaul retrieval cannot be "
                f"cheaper than a cache hit), got e_miss={self.e_miss} < "
                f"e_hit={self.e_hit}"
            )


@dataclass(frozen=True)
class LinkGeometry:
    """Fixed serving-link distances in meters."""

    r_ut: float
    r_bh: float

    def __post_init__(self):
        if not 0 < self.r_ut < self.r_bh:
            raise DomainError(
                f"need r_bh > r_ut > 0, got r_ut={self.r_ut}, r_bh={self.r_bh}"
            )


def upsilon(z: float, alpha: float) -> float:
    """Radial pathloss integral ``pi * z**(2/alpha) * csc(2*pi/alpha) / alpha``.

    This is the constant through which a homogeneous interferer field of
    unit density enters every interference Laplace transform in
    :mod:`cachenet.analytic`. It is strictly increasing in ``z`` with
    ``upsilon(0) == 0`` and homogeneous of degree ``2/alpha``.

    Parameters
    ----------
    z : float
        Nonnegative transform argument (power-scaled).
    alpha : float
        Pathloss exponent, > 2.
    """
    if not alpha > 2:
        raise DomainError(
            f"alpha must be > 2 (csc(2*pi/alpha) pole at alpha = 2), got {alpha}"
        )
    if z < 0:
        raise DomainError(f"z must be >= 0, got {z}")
    if z == 0:
        return 0.0
    return math.pi * z ** (2.0 / alpha) / (math.sin(2.0 * math.pi / alpha) * alpha)


def link_distances(lam: float, beta_ut: float, beta_bh: float) -> LinkGeometry:
    """Serving-link distances for a given small-cell density.

    Both distances shrink with density as ``beta / (2 sqrt(lam))``, the
    coefficient-scaled mean nearest-neighbor spacing of a planar point
    field of density ``lam``.
    """
    if not lam > 0:
        raise DomainError(f"lambda must be > 0 SCs/m^2, got {lam}")
    if not 0 < beta_ut < beta_bh:
        raise DomainError(
            f"need beta_bh > beta_ut > 0, got beta_ut={beta_ut}, beta_bh={beta_bh}"
        )
    half_spacing = 2.0 * math.sqrt(lam)
    return LinkGeometry(r_ut=beta_ut / half_spacing, r_bh=beta_bh / half_spacing)


def hit_probability(storage: float, catalog: float) -> float:
    """Cache hit probability ``storage / catalog`` under uniform popularity.

    With every file equally likely to be requested, the chance that a
    request finds its file in an ``storage``-sized cache is simply the
    cached fraction of the catalog.
    """
    if not catalog >= 1:
        raise DomainError(f"catalog must hold at least one file, got {catalog}")
    if not 0 <= storage <= catalog:
        raise DomainError(
            f"storage must lie in [0, catalog], got storage={storage}, "
            f"catalog={catalog}"
        )
    return storage / catalog


def total_energy(storage: float, catalog: float, e_hit: float, e_miss: float) -> float:
    """Expected energy (J) to deliver one file to a terminal.

    Convex combination of the hit and miss energies weighted by the hit
    probability; affine in ``storage`` with slope ``(e_hit - e_miss) / catalog``.
    """
    if e_hit < 0 or e_miss < 0:
        raise DomainError(
            f"energies must be >= 0 J, got e_hit={e_hit}, e_miss={e_miss}"
        )
    p = hit_probability(storage, catalog)
    return p * e_hit + (1.0 - p) * e_miss


def round_storage(storage: float) -> int:
    """Round a continuous storage size to a whole number of files.

    Provided for reporting convenience only; the optimizers never round
    internally.
    """
    if storage < 0:
        raise DomainError(f"storage must be >= 0, got {storage}")
    return round(storage)
