"""Pump-dressed states, the slow/fast ("trap") basis, and the secular
equations of motion valid at resonant pump with the splitting tuned to the
lower dressed state.

The pump mixes |2> and |3> into dressed states

    |+> = cos(psi)|2> + sin(psi)|3>,   |-> = -sin(psi)|2> + cos(psi)|3>,

with eigenvalues lambda+- = (delta2 +- sqrt(delta2^2 + 4 G^2))/2 and
tan(psi) = -G/lambda+.  When |1> is degenerate with |-> (w12 = lambda-),
the interference of the decay channels singles out the combination

    |uc> = (sqrt(g2)|1> - sqrt(2 g1)|->) / sqrt(g2 + 2 g1)

which decays at the slow rate gamma_uc and quasi-traps population; |c> is
the orthogonal fast combination.  The basis is orthonormal for any
parameters, but its trapping interpretation holds only at that degeneracy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RegimeViolation
from .model import DensityMatrix, SystemParams
from .stepper import integrate_adaptive

_REGIME_TOL = 1e-12


@dataclass(frozen=True)
class DressedDecomposition:
    """Dressed eigenstructure, plus trap-basis populations when a state has
    been transformed (otherwise the population fields are None)."""

    lambda_plus: float
    lambda_minus: float
    psi: float
    u_dressed: np.ndarray   # rows |1>, |+>, |-> in the bare basis
    u_trap: np.ndarray      # rows |+>, |c>, |uc> in the bare basis
    sigma: np.ndarray | None = None  # 3x3 state in the {+, c, uc} basis
    pop_plus: float | None = None
    pop_c: float | None = None
    pop_uc: float | None = None
    coh_uc_c: complex | None = None
    coh_plus_uc: complex | None = None
    coh_plus_c: complex | None = None


def dressed_basis(params: SystemParams) -> DressedDecomposition:
    """Eigenstructure of the pump-coupled {|2>, |3>} subsystem.

    Requires big_g > 0.  Populations are left unset; see to_trap_basis.
    """
    G = params.big_g
    if G <= 0:
        raise ValueError(f"dressed basis requires big_g > 0, got {G}")
    d2 = params.delta2
    root = math.hypot(d2, 2 * G)
    lam_p = (d2 + root) / 2
    lam_m = (d2 - root) / 2
    psi = math.atan2(-G, lam_p)
    c, s = math.cos(psi), math.sin(psi)

    u_dressed = np.array([
        [1.0, 0.0, 0.0],
        [0.0, c, s],
        [0.0, -s, c],
    ])
    g1, g2 = params.gamma1, params.gamma2
    nrm = math.sqrt(g2 + 2 * g1)
    u_trap = np.array([
        [0.0, c, s],
        [math.sqrt(2 * g1) / nrm, -math.sqrt(g2) * s / nrm, math.sqrt(g2) * c / nrm],
        [math.sqrt(g2) / nrm, math.sqrt(2 * g1) * s / nrm, -math.sqrt(2 * g1) * c / nrm],
    ])
    return DressedDecomposition(
        lambda_plus=lam_p, lambda_minus=lam_m, psi=psi,
        u_dressed=u_dressed, u_trap=u_trap,
    )


def to_trap_basis(rho: DensityMatrix, params: SystemParams) -> DressedDecomposition:
    """Express a bare-basis state in the {|+>, |c>, |uc>} basis."""
    base = dressed_basis(params)
    u = base.u_trap
    sigma = u @ rho.rho @ u.T
    return DressedDecomposition(
        lambda_plus=base.lambda_plus,
        lambda_minus=base.lambda_minus,
        psi=base.psi,
        u_dressed=base.u_dressed,
        u_trap=u,
        sigma=sigma,
        pop_plus=float(sigma[0, 0].real),
        pop_c=float(sigma[1, 1].real),
        pop_uc=float(sigma[2, 2].real),
        coh_uc_c=complex(sigma[2, 1]),
        coh_plus_uc=complex(sigma[0, 2]),
        coh_plus_c=complex(sigma[0, 1]),
    )


def gamma_uc(params: SystemParams) -> float:
    """Slow decay rate of the quasi-trapped combination.

    4 g1 g2 (g1 + g2)(1 - cos theta) / (2 g1 + g2)^2; zero exactly at
    theta = 0 (complete trapping).
    """
    g1, g2 = params.gamma1, params.gamma2
    c = math.cos(math.radians(params.theta_deg))
    return 4 * g1 * g2 * (g1 + g2) * (1 - c) / (2 * g1 + g2) ** 2


@dataclass(frozen=True)
class SecularState:
    """The six slow variables of the secular equations."""

    pop_uc: float
    pop_c: float
    pop_plus: float
    coh_uc_c: complex
    coh_plus_uc: complex
    coh_plus_c: complex

    @property
    def population_sum(self) -> float:
        return self.pop_uc + self.pop_c + self.pop_plus


def secular_from_density(rho: DensityMatrix, params: SystemParams) -> SecularState:
    """Map a bare-basis state into the secular variables (initial condition)."""
    d = to_trap_basis(rho, params)
    return SecularState(
        pop_uc=d.pop_uc, pop_c=d.pop_c, pop_plus=d.pop_plus,
        coh_uc_c=d.coh_uc_c, coh_plus_uc=d.coh_plus_uc, coh_plus_c=d.coh_plus_c,
    )


def _check_secular_regime(params: SystemParams):
    if abs(params.delta2) > _REGIME_TOL:
        raise RegimeViolation(
            f"secular equations require delta2 = 0, got {params.delta2}"
        )
    if abs(params.w12 + params.big_g) > _REGIME_TOL * max(1.0, params.big_g):
        raise RegimeViolation(
            f"secular equations require w12 = -G, got w12={params.w12}, G={params.big_g}"
        )
    if params.eta0 != 1.0:
        raise RegimeViolation("secular equations presume the interference switch on (eta0 = 1)")


def secular_generator(params: SystemParams) -> np.ndarray:
    """Real 9x9 generator of the secular equations.

    Layout: [p_uc, p_c, p_plus, Re cuc_c, Im cuc_c, Re c+uc, Im c+uc,
    Re c+c, Im c+c].  The population block couples to 2*Re(coh_uc_c); the
    (+,uc)/(+,c) coherences decouple as a 2x2 with real coefficients.

    Caveat: the (+,uc) relaxation coefficient carries the factor
    (1 + 6*sqrt(2) - cos theta), whose 6*sqrt(2) is numerically anomalous
    for a sum of linewidths (it makes that envelope decay roughly 2.5x
    faster than the full equations of motion show).  It feeds only the
    (+,uc)/(+,c) pair, which is structurally decoupled from the
    populations, so trapping curves are unaffected.
    """
    _check_secular_regime(params)
    g1, g2 = params.gamma1, params.gamma2
    c = math.cos(math.radians(params.theta_deg))
    s2 = 2 * g1 + g2
    rt = math.sqrt(g1 * g2)
    q = 4 * g1**2 + 4 * g1 * g2 * c + g2**2

    A = np.zeros((9, 9))
    # population of |uc>
    A[0, 0] = -4 * g1 * g2 * (g1 + g2) * (1 - c) / s2**2
    A[0, 1] = g1 * q / s2**2
    A[0, 2] = g1 * g2 / s2
    A[0, 3] = -2 * g2 * rt * (2 * g1 - g2) * (1 - c) / (math.sqrt(2) * s2**2)
    # population of |c>
    A[1, 0] = 2 * g1 * g2**2 * (1 - c) / s2**2
    A[1, 1] = -(4 * g1 + g2) * q / (2 * s2**2)
    A[1, 2] = g2**2 / (2 * s2)
    A[1, 3] = -2 * g1 * (2 * g1 - g2) * math.sqrt(2 * g1 * g2) * (1 - c) / s2**2
    # population of |+>
    A[2, 0] = 2 * g1 * g2 * (1 - c) / s2
    A[2, 1] = q / (2 * s2)
    A[2, 2] = -g2 / 2
    A[2, 3] = 2 * (2 * g1 - g2) * rt * (1 - c) / (math.sqrt(2) * s2)
    # coherence (uc, c); the conjugate partner enters through b
    a = 4 * g1**2 * g2 * (1 - c) / s2**2 + (g1 * g2 * c + g2**2) / s2 + g1
    b = g1 * g2 * (1 - c) * (2 * g1 - g2) / s2**2
    A[3, 3] = -(a + b)
    A[4, 4] = -(a - b)
    A[3, 0] = -rt * (1 - c) / math.sqrt(2)
    A[3, 1] = -(8 * g1**2 * (1 - c) + s2**2 * c) * rt / (math.sqrt(2) * s2**2)
    A[3, 2] = -g2 * rt / (math.sqrt(2) * s2)
    # coherences (+, uc) and (+, c): closed 2x2 block
    k1 = g2 * (g2 + g1 * (1 + 6 * math.sqrt(2) - c)) / (2 * s2)
    k2 = rt * (2 * g1 + g2 * c - 2 * g2) / (math.sqrt(2) * s2)
    k3 = math.sqrt(2 * g1 * g2) * (g1 * (1 - c) - g2) / s2
    k4 = (2 * g1 * g2 * (1 + c) + 4 * g1**2 + 3 * g2**2) / (2 * s2)
    A[5, 5] = A[6, 6] = -k1
    A[5, 7] = A[6, 8] = -k2
    A[7, 5] = A[8, 6] = -k3
    A[7, 7] = A[8, 8] = -k4
    return A


def evolve_secular(
    params: SystemParams,
    initial: SecularState,
    t_end: float,
    tol: float = 1e-9,
    t_eval: np.ndarray | None = None,
) -> list[tuple[float, SecularState]]:
    """Integrate the secular equations from ``initial`` over [0, t_end].

    Valid only at delta2 = 0, w12 = -G with the interference switch on;
    raises RegimeViolation otherwise.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    A = secular_generator(params)
    y0 = np.array([
        initial.pop_uc, initial.pop_c, initial.pop_plus,
        initial.coh_uc_c.real, initial.coh_uc_c.imag,
        initial.coh_plus_uc.real, initial.coh_plus_uc.imag,
        initial.coh_plus_c.real, initial.coh_plus_c.imag,
    ])
    rate_scale = max(params.gamma1, params.gamma2)
    dt0 = min(0.01, 0.1 / rate_scale)
    times, ys = integrate_adaptive(
        lambda t, y: A @ y, 0.0, y0, t_end, dt0, tol=tol, t_eval=t_eval
    )
    out = []
    for t, y in zip(times, ys):
        out.append(
            (
                float(t),
                SecularState(
                    pop_uc=float(y[0]), pop_c=float(y[1]), pop_plus=float(y[2]),
                    coh_uc_c=complex(y[3], y[4]),
                    coh_plus_uc=complex(y[5], y[6]),
                    coh_plus_c=complex(y[7], y[8]),
                ),
            )
        )
    return out
