"""Independent oracles for the test suite.

Everything here re-derives expected values from the model definitions with
mpmath arbitrary-precision arithmetic (plus the modified-Bessel closed
form available when ``sigma2 = 0`` and ``alpha = 4``), deliberately not
importing the package under test. The frozen dictionaries below were
computed with these evaluators before the implementation existed and are
asserted against it, not regenerated from it.
"""

from __future__ import annotations

import mpmath as mp

mp.mp.dps = 40

# Reference scenario: lam=1e-2, alpha=4, theta=1, sigma2=0, rho_sc=0.5,
# rho_bh=1, beta_ut=0.5, beta_bh=1.
REF = dict(
    lam=mp.mpf("0.01"),
    alpha=mp.mpf(4),
    theta=mp.mpf(1),
    sigma2=mp.mpf(0),
    rho_sc=mp.mpf("0.5"),
    rho_bh=mp.mpf(1),
    beta_ut=mp.mpf("0.5"),
    beta_bh=mp.mpf(1),
)

# Frozen arbitrary-precision values at the reference scenario (15 digits).
STATIC_REF = {
    0.0: 0.213925878165597,
    0.25: 0.402060435992674,
    0.5: 0.565512584345582,
    0.75: 0.685862579700549,
    1.0: 0.734602944328633,
}
DYNAMIC_REF = {
    0.0: 0.303404096027903,
    0.25: 0.410174338032829,
    0.5: 0.518459075899277,
    0.75: 0.627100217994893,
    1.0: 0.734602944328633,
}
LOWER_BOUND_REF = {
    0.0: 0.0622979824709889,
    0.25: 0.224125150837121,
    0.5: 0.391345367945318,
    0.75: 0.562290744448592,
    1.0: 0.734602944328633,
}
# Elementary frozen helpers (same scenario).
UPSILON_39_0625 = 4.90873852123405
UPSILON_78_125 = 6.94200459087245
UPSILON_625 = 19.6349540849362
UPSILON_3164_0625 = 44.1786466911065
LAPLACE_UT_78_125 = 0.734602944328633
LAPLACE_SC_625_P0 = 0.291212933214021
LAPLACE_SC_625_P50 = 0.539641485816297
LAPLACE_DYN_78_125_P25 = 0.66748354296778


def upsilon(z, alpha):
    z = mp.mpf(z)
    if z == 0:
        return mp.mpf(0)
    alpha = mp.mpf(alpha)
    return mp.pi * mp.power(z, 2 / alpha) * mp.csc(2 * mp.pi / alpha) / alpha


def _distances(p):
    return (
        p["beta_ut"] / (2 * mp.sqrt(p["lam"])),
        p["beta_bh"] / (2 * mp.sqrt(p["lam"])),
    )


def _laplace_dynamic(s, p_hit, p):
    return mp.exp(
        -2 * mp.pi * p["lam"] * (
            p_hit * upsilon(p["rho_sc"] * s, p["alpha"])
            + (1 - p_hit) * upsilon(p["rho_bh"] * s, p["alpha"])
        )
    )


def static_success(p_hit, **overrides):
    p = {**REF, **{k: mp.mpf(v) for k, v in overrides.items()}}
    p_hit = mp.mpf(p_hit)
    r_ut, r_bh = _distances(p)
    s_ut = p["theta"] * r_ut ** p["alpha"] / p["rho_sc"]
    s_bh = p["theta"] * r_bh ** p["alpha"] / p["rho_bh"]
    access = mp.exp(-p["theta"] * p["sigma2"] * r_ut ** p["alpha"] / p["rho_sc"]) * mp.exp(
        -2 * mp.pi * p["lam"] * upsilon(p["rho_sc"] * s_ut, p["alpha"])
    )
    backhaul = mp.exp(-p["theta"] * p["sigma2"] * r_bh ** p["alpha"] / p["rho_bh"]) * mp.exp(
        -2 * mp.pi * p["lam"] * (1 - p_hit) * upsilon(p["rho_bh"] * s_bh, p["alpha"])
    )
    return access * (p_hit + (1 - p_hit) * backhaul)


def dynamic_success(p_hit, **overrides):
    p = {**REF, **{k: mp.mpf(v) for k, v in overrides.items()}}
    p_hit = mp.mpf(p_hit)
    r_ut, r_bh = _distances(p)
    s_ut = p["theta"] * r_ut ** p["alpha"] / p["rho_sc"]
    hit_term = p_hit * mp.exp(
        -p["theta"] * p["sigma2"] * r_ut ** p["alpha"] / p["rho_sc"]
    ) * _laplace_dynamic(s_ut, p_hit, p)
    if p_hit == 1:
        return hit_term

    def integrand(phi):
        omega = (r_ut**2 + r_bh**2 + 2 * r_ut * r_bh * mp.cos(phi)) ** (p["alpha"] / 2)
        return _laplace_dynamic(p["theta"] * omega / p["rho_bh"], p_hit, p)

    integral = mp.quad(integrand, [0, mp.pi]) / mp.pi  # even around 0
    miss_term = (1 - p_hit) * mp.exp(
        -p["theta"] * p["sigma2"] * r_bh ** p["alpha"] / p["rho_bh"]
    ) * integral
    return hit_term + miss_term


def dynamic_lower_bound(p_hit, **overrides):
    p = {**REF, **{k: mp.mpf(v) for k, v in overrides.items()}}
    p_hit = mp.mpf(p_hit)
    r_ut, r_bh = _distances(p)
    s_ut = p["theta"] * r_ut ** p["alpha"] / p["rho_sc"]
    s_worst = p["theta"] * (r_ut + r_bh) ** p["alpha"] / p["rho_bh"]
    hit_term = p_hit * mp.exp(
        -p["theta"] * p["sigma2"] * r_ut ** p["alpha"] / p["rho_sc"]
    ) * _laplace_dynamic(s_ut, p_hit, p)
    miss_term = (1 - p_hit) * mp.exp(
        -p["theta"] * p["sigma2"] * r_bh ** p["alpha"] / p["rho_bh"]
    ) * _laplace_dynamic(s_worst, p_hit, p)
    return hit_term + miss_term


def bessel_miss_integral(p_hit, **overrides):
    """Closed form of the orientation average, valid for sigma2=0, alpha=4.

    For a quartic pathloss the transform exponent is linear in
    ``cos(phi)``, so the average over orientations is ``exp(-a) I0(b)``
    with ``a`` and ``b`` set by the link distances and the hit-weighted
    effective power.
    """
    p = {**REF, **{k: mp.mpf(v) for k, v in overrides.items()}}
    assert p["alpha"] == 4 and p["sigma2"] == 0
    p_hit = mp.mpf(p_hit)
    r_ut, r_bh = _distances(p)
    coeff = (
        mp.pi**2 * p["lam"] / 2
        * mp.sqrt(p["theta"] / p["rho_bh"])
        * (p_hit * mp.sqrt(p["rho_sc"]) + (1 - p_hit) * mp.sqrt(p["rho_bh"]))
    )
    a = coeff * (r_ut**2 + r_bh**2)
    b = 2 * coeff * r_ut * r_bh
    return mp.exp(-a) * mp.besseli(0, b)
