"""Rotating-frame master equation of the driven V-system and its field-free
interaction-picture variant, plus time integration and the pump-only steady
state.

The nine density-matrix components are ordered

    COMPONENTS = (11, 22, 33, 12, 21, 13, 31, 23, 32)

both for the complex 9-vector used by the linear-algebra paths (this module,
the harmonic-balance solver) and, component-wise, for the real 9-vector used
by the time integrator:

    REAL_LAYOUT = (r11, r22, r33, Re r12, Im r12, Re r13, Im r13, Re r23, Im r23)

The 33 row is built as minus the sum of the 11 and 22 rows, so the trace is
conserved identically and the driven equations stay closed without an
explicit trace constraint.

Driven mode: the only explicit time dependence is the probe phase
``exp(-i*delta*t)`` (and its conjugate), with delta the pump-probe beat.
Field-free mode: no fields; the cross-decay terms oscillate at the
excited-state splitting w12.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularSystem
from .model import DensityMatrix, SystemParams
from .stepper import integrate_adaptive

COMPONENTS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1))


class Mode(enum.Enum):
    DRIVEN = "driven"
    FIELD_FREE = "field_free"


def mat_to_vec9(rho: np.ndarray) -> np.ndarray:
    """3x3 complex matrix -> complex 9-vector in COMPONENTS order."""
    return np.array([rho[i, j] for i, j in COMPONENTS], dtype=complex)


def vec9_to_mat(v: np.ndarray) -> np.ndarray:
    out = np.empty((3, 3), dtype=complex)
    for k, (i, j) in enumerate(COMPONENTS):
        out[i, j] = v[k]
    return out


def mat_to_real9(rho: np.ndarray) -> np.ndarray:
    return np.array(
        [
            rho[0, 0].real, rho[1, 1].real, rho[2, 2].real,
            rho[0, 1].real, rho[0, 1].imag,
            rho[0, 2].real, rho[0, 2].imag,
            rho[1, 2].real, rho[1, 2].imag,
        ]
    )


def real9_to_mat(y: np.ndarray) -> np.ndarray:
    r12 = y[3] + 1j * y[4]
    r13 = y[5] + 1j * y[6]
    r23 = y[7] + 1j * y[8]
    return np.array(
        [
            [y[0], r12, r13],
            [np.conj(r12), y[1], r23],
            [np.conj(r13), np.conj(r23), y[2]],
        ]
    )


def driven_blocks(params: SystemParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient matrices of the driven equations on the complex 9-vector.

    d(v)/dt = (C0 + g e^{-i delta t} Dm + g e^{+i delta t} Dp) v

    with g = params.small_g factored out of Dm/Dp.  C0 carries the decay
    terms, the interference terms (strength eta), the detunings and the pump
    coupling G.
    """
    g1, g2 = params.gamma1, params.gamma2
    eta = params.eta
    G = params.big_g
    W = params.w12
    D2 = params.delta2
    i_ = 1j

    C0 = np.zeros((9, 9), dtype=complex)
    # d(r11)/dt = -2 g1 r11 - eta (r12 + r21)   [+ probe terms in Dm/Dp]
    C0[0, 0] = -2 * g1
    C0[0, 3] = -eta
    C0[0, 4] = -eta
    # d(r22)/dt = -2 g2 r22 - eta (r12 + r21) + iG (r32 - r23)
    C0[1, 1] = -2 * g2
    C0[1, 3] = -eta
    C0[1, 4] = -eta
    C0[1, 7] = -i_ * G
    C0[1, 8] = i_ * G
    # d(r33)/dt = -(d r11 + d r22): exact trace conservation
    C0[2, :] = -(C0[0, :] + C0[1, :])
    # d(r12)/dt = -(g1 + g2 + iW) r12 - eta (r11 + r22) - iG r13
    C0[3, 0] = -eta
    C0[3, 1] = -eta
    C0[3, 3] = -(g1 + g2 + i_ * W)
    C0[3, 5] = -i_ * G
    # d(r21)/dt: conjugate row
    C0[4, 0] = -eta
    C0[4, 1] = -eta
    C0[4, 4] = -(g1 + g2 - i_ * W)
    C0[4, 6] = i_ * G
    # d(r13)/dt = -(g1 + i(D2 + W)) r13 - eta r23 - iG r12  [+ ig e^{-i d t}(r33 - r11)]
    C0[5, 3] = -i_ * G
    C0[5, 5] = -(g1 + i_ * (D2 + W))
    C0[5, 7] = -eta
    # d(r31)/dt: conjugate row
    C0[6, 4] = i_ * G
    C0[6, 6] = -(g1 - i_ * (D2 + W))
    C0[6, 8] = -eta
    # d(r23)/dt = -(g2 + i D2) r23 - eta r13 + iG (r33 - r22)  [- ig e^{-i d t} r21]
    C0[7, 1] = -i_ * G
    C0[7, 2] = i_ * G
    C0[7, 5] = -eta
    C0[7, 7] = -(g2 + i_ * D2)
    # d(r32)/dt: conjugate row
    C0[8, 1] = i_ * G
    C0[8, 2] = -i_ * G
    C0[8, 6] = -eta
    C0[8, 8] = -(g2 - i_ * D2)

    Dm = np.zeros((9, 9), dtype=complex)
    Dm[0, 6] = i_          # +ig e^{-i d t} r31 in d(r11)
    Dm[2, 6] = -i_
    Dm[3, 8] = i_          # +ig e^{-i d t} r32 in d(r12)
    Dm[5, 0] = -i_         # +ig e^{-i d t} (r33 - r11) in d(r13)
    Dm[5, 2] = i_
    Dm[7, 4] = -i_         # -ig e^{-i d t} r21 in d(r23)

    Dp = np.zeros((9, 9), dtype=complex)
    Dp[0, 5] = -i_
    Dp[2, 5] = i_
    Dp[4, 7] = -i_
    Dp[6, 0] = i_
    Dp[6, 2] = -i_
    Dp[8, 3] = i_
    return C0, Dm, Dp


def fieldfree_blocks(params: SystemParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient matrices of the field-free interaction-picture equations.

    d(v)/dt = (F0 + e^{-i w12 t} Fm + e^{+i w12 t} Fp) v

    Only decay terms survive; the cross-decay (interference) terms carry the
    explicit splitting phases.
    """
    g1, g2 = params.gamma1, params.gamma2
    eta = params.eta

    F0 = np.zeros((9, 9), dtype=complex)
    F0[0, 0] = -2 * g1
    F0[1, 1] = -2 * g2
    F0[3, 3] = -(g1 + g2)
    F0[4, 4] = -(g1 + g2)
    F0[5, 5] = -g1
    F0[6, 6] = -g1
    F0[7, 7] = -g2
    F0[8, 8] = -g2

    Fm = np.zeros((9, 9), dtype=complex)
    Fm[0, 3] = -eta
    Fm[1, 3] = -eta
    Fm[4, 0] = -eta
    Fm[4, 1] = -eta
    Fm[6, 8] = -eta
    Fm[7, 5] = -eta

    Fp = np.zeros((9, 9), dtype=complex)
    Fp[0, 4] = -eta
    Fp[1, 4] = -eta
    Fp[3, 0] = -eta
    Fp[3, 1] = -eta
    Fp[5, 7] = -eta
    Fp[8, 6] = -eta

    for M in (F0, Fm, Fp):
        M[2, :] = -(M[0, :] + M[1, :])
    return F0, Fm, Fp


def _real_action(M: np.ndarray) -> np.ndarray:
    """Real 9x9 matrix acting on REAL_LAYOUT, equivalent to v -> M v.

    Valid because every block maps Hermitian-consistent vectors to
    Hermitian-consistent vectors; obtained by probing with basis states.
    """
    out = np.empty((9, 9))
    for col in range(9):
        e = np.zeros(9)
        e[col] = 1.0
        v = mat_to_vec9(real9_to_mat(e))
        out[:, col] = mat_to_real9(vec9_to_mat(M @ v))
    return out


@dataclass(frozen=True)
class MasterRHS:
    """Right-hand side of the equations of motion in one of the two modes.

    Pure and immutable; the phase-separated coefficient matrices are
    precomputed once so the integrator's inner loop is three small real
    matrix-vector products.
    """

    params: SystemParams
    mode: Mode = Mode.DRIVEN
    _freq: float = field(init=False, repr=False)
    _blocks: tuple = field(init=False, repr=False)
    _real_blocks: tuple = field(init=False, repr=False)
    _static: bool = field(init=False, repr=False)

    def __post_init__(self):
        if self.mode is Mode.DRIVEN:
            C0, Dm, Dp = driven_blocks(self.params)
            g = self.params.small_g
            const, cosm, sinm = C0, g * (Dm + Dp), 1j * g * (Dp - Dm)
            freq = self.params.delta
        else:
            F0, Fm, Fp = fieldfree_blocks(self.params)
            const, cosm, sinm = F0, Fm + Fp, 1j * (Fp - Fm)
            freq = self.params.w12
        object.__setattr__(self, "_freq", freq)
        object.__setattr__(self, "_blocks", (const, cosm, sinm))
        object.__setattr__(
            self,
            "_real_blocks",
            (_real_action(const), _real_action(cosm), _real_action(sinm)),
        )
        # no oscillating terms when the probe (or the interference) is absent
        static = not (np.any(cosm) or np.any(sinm))
        object.__setattr__(self, "_static", static)

    def matrix_at(self, t: float) -> np.ndarray:
        """Complex 9x9 generator at time t."""
        const, cosm, sinm = self._blocks
        return const + np.cos(self._freq * t) * cosm + np.sin(self._freq * t) * sinm

    def real_rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        a0, ac, as_ = self._real_blocks
        if self._static:
            return a0 @ y
        return a0 @ y + np.cos(self._freq * t) * (ac @ y) + np.sin(self._freq * t) * (as_ @ y)


def rhs(t: float, rho: DensityMatrix | np.ndarray, r: MasterRHS) -> np.ndarray:
    """Time derivative of the density matrix at time t.

    Returns a 3x3 complex matrix; traceless and Hermitian-consistent by
    construction of the coefficient rows.
    """
    mat = rho.rho if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    dv = r.matrix_at(t) @ mat_to_vec9(mat)
    return vec9_to_mat(dv)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered density-matrix history."""

    times: np.ndarray
    states: list[DensityMatrix]

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states must have equal length")
        if len(self.times) > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def final(self) -> DensityMatrix:
        return self.states[-1]


def default_dt_hint(params: SystemParams, mode: Mode = Mode.DRIVEN) -> float:
    """Initial step resolving the fastest oscillation present."""
    if mode is Mode.DRIVEN:
        fastest = max(params.big_g, abs(params.w12), abs(params.delta))
    else:
        fastest = abs(params.w12)
    return min(0.01, 0.1 / fastest) if fastest > 0 else 0.01


def integrate(
    r: MasterRHS,
    rho0: DensityMatrix,
    t_end: float,
    dt_hint: float | None = None,
    tol: float = 1e-9,
    t_eval: np.ndarray | None = None,
) -> Trajectory:
    """Integrate the master equation from rho0 over [0, t_end].

    Local error is held below ``tol`` per unit time.  With ``t_eval`` given,
    only those instants are recorded; otherwise every accepted step is.

    Raises StepSizeUnderflow if step control collapses below 1e-12.
    """
    if t_end <= 0:
        raise ValueError(f"t_end must be positive, got {t_end}")
    rho0.validate()
    if dt_hint is None:
        dt_hint = default_dt_hint(r.params, r.mode)
    y0 = mat_to_real9(rho0.rho)
    times, ys = integrate_adaptive(r.real_rhs, 0.0, y0, t_end, dt_hint, tol=tol, t_eval=t_eval)
    states = [
        DensityMatrix(real9_to_mat(y)).validate(trace_tol=1e-9, diag_tol=1e-8) for y in ys
    ]
    return Trajectory(times=times, states=states)


def steady_state_pump_only(params: SystemParams) -> DensityMatrix:
    """Steady state of the pump-only system (probe amplitude treated as 0).

    With no probe the driven equations are time independent, so the state
    solves the linear system C0 v = 0 with the 33 row replaced by the unit
    trace condition.

    Raises SingularSystem if the solve fails or the homogeneous residual
    exceeds 1e-10 (parameter degeneracy).
    """
    C0, _, _ = driven_blocks(params)
    A = C0.copy()
    A[2, :] = 0.0
    A[2, 0] = A[2, 1] = A[2, 2] = 1.0
    b = np.zeros(9, dtype=complex)
    b[2] = 1.0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] < 1e-12 * sv[0]:
        raise SingularSystem(
            "steady state is not unique (rank deficiency beyond the trace "
            f"condition, sigma_min/sigma_max = {sv[-1] / sv[0]:.2e}); a "
            "non-decaying dark combination leaves a family of stationary states"
        )
    try:
        v = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"pump-only steady state is degenerate: {exc}") from exc
    residual = float(np.max(np.abs(C0 @ v)))
    if residual > 1e-10:
        raise SingularSystem(
            f"pump-only steady state residual {residual:.3e} exceeds 1e-10"
        )
    return DensityMatrix(vec9_to_mat(v)).validate()
