"""Closed-form expressions for the probe and pump response, used as oracles
for the numerical solvers and for fast evaluation.

The pump-response formulas hold in the trapping regime delta2 = 0,
w12 = -G.  Everything is expressed through the interference strength
eta = eta0 sqrt(g1 g2) cos(theta) and the auxiliary constants

    A = G^2 g2^2 + 4 G^2 g1 g2 + g1^2 g2^2 + 4 G^2 g1^2 + 2 g1^3 g2 + g1^4
    B = (g1 g2 - eta^2) {A (g2^2 + 2G^2) + eta^2 G^2 g1 (g2 + 2 g1)}
        + eta^2 G^4 (g2 + 2 g1)^2
        + eta^2 (g1 + g2)^2 (3 g1 g2 eta^2 - 2 g1^2 g2^2 - eta^4).

The dressed-population formulas below were derived symbolically from the
equations of motion and cross-checked against the numerical steady state; a
dedicated test asserts the population sum rule, which any algebra slip
breaks.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import RegimeViolation, ZeroDenominator, ZeroPump
from .model import SystemParams

_REGIME_TOL = 1e-12


def rho13_no_vic(params: SystemParams) -> complex:
    """Weak-probe 13 coherence of the interference-free system.

    Valid linear response for eta0 = 0 (the formula itself never sees eta).
    The returned value carries the probe amplitude factor g; divide by
    params.small_g for the response coefficient.

    Raises ZeroDenominator when the pole condition is met to within 1e-14
    (relative to the denominator's natural scale).
    """
    g1, g2 = params.gamma1, params.gamma2
    G = params.big_g
    d1, d2 = params.delta1, params.delta2
    num = (g2**2 + d2**2 + G**2) * (d2 - d1 + 1j * (g1 + g2)) + G**2 * (d2 - 1j * g2)
    pole = G**2 + (d1 - 1j * g1) * (d2 - d1 + 1j * (g1 + g2))
    den = (g2**2 + d2**2 + 2 * G**2) * pole
    scale = (g2**2 + d2**2 + 2 * G**2) * (
        G**2 + abs(d1 - 1j * g1) * abs(d2 - d1 + 1j * (g1 + g2))
    )
    if abs(den) < 1e-14 * max(1.0, scale):
        raise ZeroDenominator(
            f"probe response pole at delta1={d1}, delta2={d2} (|den|={abs(den):.3e})"
        )
    return params.small_g * num / den


@dataclass(frozen=True)
class PumpResponse:
    """Pump coherence and dressed-state populations at delta2=0, w12=-G."""

    sigma23: complex
    sigma11: float
    sigma_mm: float
    sigma_pp: float
    sigma_pm: complex
    a_const: float
    b_const: float


def _ab_constants(g1: float, g2: float, e2: float, G: float) -> tuple[float, float]:
    a = (G**2 * g2**2 + 4 * G**2 * g1 * g2 + g1**2 * g2**2 + 4 * G**2 * g1**2
         + 2 * g1**3 * g2 + g1**4)
    b = ((g1 * g2 - e2) * (a * (g2**2 + 2 * G**2) + e2 * G**2 * g1 * (g2 + 2 * g1))
         + e2 * G**4 * (g2 + 2 * g1) ** 2
         + e2 * (g1 + g2) ** 2 * (3 * g1 * g2 * e2 - 2 * g1**2 * g2**2 - e2**2))
    return a, b


def _require_trap_regime(params: SystemParams):
    if abs(params.delta2) > _REGIME_TOL:
        raise RegimeViolation(f"closed form requires delta2 = 0, got {params.delta2}")
    if abs(params.w12 + params.big_g) > _REGIME_TOL * max(1.0, params.big_g):
        raise RegimeViolation(
            f"closed form requires w12 = -G, got w12={params.w12}, G={params.big_g}"
        )


def sigma23_exact(params: SystemParams) -> PumpResponse:
    """Pump coherence and dressed populations to all orders in the pump.

    Valid at delta2 = 0, w12 = -G (RegimeViolation otherwise).  Works for
    either setting of the interference switch.
    """
    _require_trap_regime(params)
    g1, g2 = params.gamma1, params.gamma2
    G = params.big_g
    e2 = params.eta**2
    A, B = _ab_constants(g1, g2, e2, G)
    if abs(B) < 1e-14 * max(1.0, (g1 + g2 + G) ** 8):
        raise ZeroDenominator(f"response denominator vanishes (B={B:.3e})")

    s23 = (
        G**2 * e2 * (G**2 * (2 * g1 + g2) * g1 + (e2 - g1 * g2) * (g1 + g2) ** 2)
        + 1j * G * (g1 * g2 - e2) * (A * g2 - e2 * g1 * (g1 + g2) ** 2)
    ) / B

    s11 = (
        G**2 * e2 * (g1 + g2) ** 2 * (g1 * g2 - e2) + G**4 * e2 * g2 * (g2 + 2 * g1)
    ) / B

    s_mm = (
        (g2**2 + 2 * G**2) * A * (g1 * g2 - e2)
        - e2 * G**2 * (g1 * g2 - e2) * (3 * g2**2 + 5 * g1 * g2 + g1**2)
        + 4 * G**4 * e2 * g1 * (g2 + 2 * g1)
        + e2 * (g1 + g2) ** 2 * (3 * e2 * g1 * g2 - 2 * g1**2 * g2**2 - e2**2)
    ) / (2 * B)

    s_pp = (g1 * g2 - e2) * (
        A * (g2**2 + 2 * G**2)
        + G**2 * e2 * g1 * (g2 + 2 * g1)
        + e2 * (g1 + g2) ** 2 * (G**2 - 2 * g1 * g2 + e2)
    ) / (2 * B)

    s_pm = (
        (e2 - g1 * g2) * (A * g2**2 - G**2 * (g2**2 + g1 * g2 - g1**2) * e2)
        - e2 * (g1 + g2) ** 2 * (3 * g1 * g2 * e2 - 2 * g1**2 * g2**2 - e2**2)
        - 2j * G * (e2 - g1 * g2) * (A * g2 - e2 * g1 * (g1 + g2) ** 2)
    ) / (2 * B)

    return PumpResponse(
        sigma23=s23, sigma11=s11, sigma_mm=s_mm, sigma_pp=s_pp, sigma_pm=s_pm,
        a_const=A, b_const=B,
    )


def sigma23_small_theta(params: SystemParams) -> complex:
    """Small-misalignment approximation of the pump coherence.

    Intended for eta^2 close to g1 g2 (small theta); requires a nonzero
    pump and the delta2 = 0, w12 = -G regime.
    """
    _require_trap_regime(params)
    g1, g2 = params.gamma1, params.gamma2
    G = params.big_g
    if G == 0:
        raise ZeroPump("small-theta approximation needs a nonzero pump amplitude")
    e2 = params.eta**2
    A, _ = _ab_constants(g1, g2, e2, G)
    re = g1 / (g2 + 2 * g1)
    im = (g1 * g2 - e2) * (A - g1**2 * (g1 + g2) ** 2) / (G**3 * g1 * (g2 + 2 * g1) ** 2)
    return complex(re, im)


def trap_populations_small_theta(params: SystemParams) -> tuple[float, float, float, float]:
    """Small-misalignment dressed populations (s11, s--, s++, Im s+-)."""
    _require_trap_regime(params)
    g1, g2 = params.gamma1, params.gamma2
    G = params.big_g
    if G == 0:
        raise ZeroPump("small-theta approximation needs a nonzero pump amplitude")
    e2 = params.eta**2
    A, _ = _ab_constants(g1, g2, e2, G)
    s11 = g2 / (g2 + 2 * g1)
    s_mm = 2 * g1 / (g2 + 2 * g1)
    s_pp = (g1 * g2 - e2) * (
        A * (g2**2 + 2 * G**2)
        + G**2 * g1**2 * g2 * (g2 + 2 * g1)
        + g1 * g2 * (g1 + g2) ** 2 * (G**2 - g1 * g2)
    ) / (2 * G**4 * g1 * g2 * (g2 + 2 * g1) ** 2)
    im_pm = (g1 * g2 - e2) * (A - g1**2 * (g1 + g2) ** 2) / (
        G**3 * g1 * (g2 + 2 * g1) ** 2
    )
    return s11, s_mm, s_pp, im_pm
