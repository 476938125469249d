"""Time-periodic steady state of the driven system.

With a non-degenerate probe the equations of motion are periodic in the
pump-probe beat delta, so the steady state is a harmonic series

    rho_ij(t) = sum_m  rho^(m)_ij  exp(-i m delta t),      m in [-M, M].

Setting every harmonic's time derivative to zero turns the equations into a
block-tridiagonal linear system

    (C0 + i m delta I) v^(m) + g Dm v^(m-1) + g Dp v^(m+1) = 0,

closed by the unit-trace condition on the m = 0 block.  The probe
absorption is read off the m = +1 coefficient of the 13 coherence.

A first-order-in-g path (``solve_perturbative``) covers the weak-probe
regime exactly: the m = 0 block is the pump-only steady state and the
m = +/-1 blocks follow from one linear solve each.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDetuning, NotConverged, PeaksNotFound, SingularSystem
from .master import driven_blocks, mat_to_vec9, steady_state_pump_only, vec9_to_mat
from .model import DensityMatrix, SystemParams

DEFAULT_TAIL_TOL = 1e-12
MAX_ORDER = 64


@dataclass(frozen=True)
class HarmonicSet:
    """Truncated harmonic coefficients of the periodic steady state."""

    order: int
    coeffs: dict[int, np.ndarray]  # m -> 3x3 complex matrix
    delta: float
    tail_norm: float

    def reconstruct(self, t: float) -> np.ndarray:
        """Density matrix at time t from the harmonic series."""
        out = np.zeros((3, 3), dtype=complex)
        for m, mat in self.coeffs.items():
            out += mat * np.exp(-1j * m * self.delta * t)
        return out

    def conjugation_defect(self) -> float:
        """max |rho^(m) - conj(rho^(-m)).T| over all harmonics (reality check)."""
        worst = 0.0
        for m in range(0, self.order + 1):
            d = np.max(np.abs(self.coeffs[m] - self.coeffs[-m].conj().T))
            worst = max(worst, float(d))
        return worst


def _solve_fixed_order(params: SystemParams, order: int) -> HarmonicSet:
    delta = params.delta
    C0, Dm, Dp = driven_blocks(params)
    g = params.small_g
    n = 9
    nblocks = 2 * order + 1
    N = n * nblocks
    A = np.zeros((N, N), dtype=complex)
    b = np.zeros(N, dtype=complex)
    eye = np.eye(n)
    for k, m in enumerate(range(-order, order + 1)):
        s = k * n
        A[s:s + n, s:s + n] = C0 + 1j * m * delta * eye
        if m - 1 >= -order:
            A[s:s + n, s - n:s] = g * Dm
        if m + 1 <= order:
            A[s:s + n, s + n:s + 2 * n] = g * Dp
    # unit trace on the m = 0 block, replacing its redundant 33 row
    k0 = order * n
    A_orig_row = A[k0 + 2, :].copy()
    A[k0 + 2, :] = 0.0
    A[k0 + 2, k0 + 0] = A[k0 + 2, k0 + 1] = A[k0 + 2, k0 + 2] = 1.0
    b[k0 + 2] = 1.0
    try:
        v = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"harmonic-balance system is singular: {exc}") from exc

    # residual of the original (pre-replacement) homogeneous system
    A[k0 + 2, :] = A_orig_row
    residual = float(np.max(np.abs(A @ v)))
    if residual > 1e-10:
        raise SingularSystem(f"harmonic-balance residual {residual:.3e} exceeds 1e-10")

    coeffs = {
        m: vec9_to_mat(v[(m + order) * n:(m + order + 1) * n])
        for m in range(-order, order + 1)
    }
    tail = max(float(np.max(np.abs(coeffs[order]))), float(np.max(np.abs(coeffs[-order]))))
    return HarmonicSet(order=order, coeffs=coeffs, delta=delta, tail_norm=tail)


def solve_floquet(
    params: SystemParams,
    order: int | None = None,
    tail_tol: float = DEFAULT_TAIL_TOL,
    max_order: int = MAX_ORDER,
) -> HarmonicSet:
    """Solve for the periodic steady state by harmonic balance.

    With ``order`` given, solves at that truncation and requires the tail
    harmonics to be below ``tail_tol``.  Otherwise starts at order 2 and
    doubles until the tail converges or ``max_order`` is reached.

    Raises
    ------
    DegenerateDetuning
        delta == 0 (degenerate pump and probe; every harmonic would
        contribute).  Use the time-domain integrator instead.
    NotConverged
        Tail harmonics above ``tail_tol`` at the final truncation order.
    """
    if params.delta == 0.0:
        raise DegenerateDetuning(
            "pump-probe beat delta = w12 - delta1 + delta2 is zero; the harmonic "
            "expansion does not truncate. Integrate in the time domain instead."
        )
    if order is not None:
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        h = _solve_fixed_order(params, order)
        if h.tail_norm >= tail_tol:
            raise NotConverged(
                f"tail norm {h.tail_norm:.3e} at order {order} exceeds {tail_tol:.1e}"
            )
        return h

    m = 2
    while True:
        h = _solve_fixed_order(params, m)
        if h.tail_norm < tail_tol:
            return h
        if m >= max_order:
            raise NotConverged(
                f"tail norm {h.tail_norm:.3e} still above {tail_tol:.1e} at order {m}"
            )
        m = min(2 * m, max_order)


def absorption_coefficient(h: HarmonicSet, params: SystemParams) -> float:
    """Dimensionless probe absorption (positive) or gain (negative).

    Reads the m = +1 harmonic of the 13 coherence:
    alpha/alpha0 = (gamma1 / g) * Im rho^(+1)_13.
    """
    if params.small_g <= 0:
        raise ValueError("absorption coefficient requires small_g > 0")
    return float(params.gamma1 / params.small_g * np.imag(h.coeffs[1][0, 2]))


@dataclass(frozen=True)
class PerturbativeSolution:
    """First-order-in-probe decomposition rho = sigma0 + g sigma+ e^{-i d t}
    + g* sigma- e^{+i d t}."""

    sigma0: DensityMatrix
    sigma_plus: np.ndarray
    sigma_minus: np.ndarray
    delta: float

    def reconstruct(self, t: float, small_g: float) -> np.ndarray:
        phase = np.exp(-1j * self.delta * t)
        return (
            self.sigma0.rho
            + small_g * self.sigma_plus * phase
            + np.conj(small_g) * self.sigma_minus / phase
        )


def solve_perturbative(params: SystemParams) -> PerturbativeSolution:
    """Exact first-order weak-probe response.

    sigma0 solves the pump-only system; the sidebands solve

        (C0 + i delta I) sigma+ = -Dm sigma0
        (C0 - i delta I) sigma- = -Dp sigma0

    so that g*sigma+_13 equals the m = +1 harmonic of the full solution up
    to O(g^2) corrections.
    """
    sigma0 = steady_state_pump_only(params)
    C0, Dm, Dp = driven_blocks(params)
    v0 = mat_to_vec9(sigma0.rho)
    delta = params.delta
    eye = np.eye(9)
    try:
        vp = np.linalg.solve(C0 + 1j * delta * eye, -(Dm @ v0))
        vm = np.linalg.solve(C0 - 1j * delta * eye, -(Dp @ v0))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"first-order response system is singular: {exc}") from exc
    for A_shift, v_side, rhs_side in (
        (C0 + 1j * delta * eye, vp, Dm @ v0),
        (C0 - 1j * delta * eye, vm, Dp @ v0),
    ):
        residual = float(np.max(np.abs(A_shift @ v_side + rhs_side)))
        scale = max(1.0, float(np.max(np.abs(v_side))))
        if residual > 1e-8 * scale:
            raise SingularSystem(
                f"first-order response residual {residual:.3e} too large "
                "(delta too close to zero?)"
            )
    return PerturbativeSolution(
        sigma0=sigma0,
        sigma_plus=vec9_to_mat(vp),
        sigma_minus=vec9_to_mat(vm),
        delta=delta,
    )


def autler_townes_peaks(scan, column: str | None = None) -> list[tuple[float, float]]:
    """Local extrema of |alpha/alpha0| over a sweep.

    ``scan`` needs ``sweep_values`` and a ``columns`` mapping (duck-typed so
    any scan-result object works).  Returns (position, signed value) pairs
    sorted by position.

    Raises PeaksNotFound if fewer than two extrema are present.
    """
    x = np.asarray(scan.sweep_values, dtype=float)
    if column is None:
        column = "alpha_over_alpha0" if "alpha_over_alpha0" in scan.columns else next(iter(scan.columns))
    y = np.asarray(scan.columns[column], dtype=float)
    mag = np.abs(y)
    peaks = []
    for i in range(1, len(x) - 1):
        window = mag[i - 1:i + 2]
        if np.any(np.isnan(window)):
            continue
        if mag[i] > mag[i - 1] and mag[i] >= mag[i + 1]:
            peaks.append((float(x[i]), float(y[i])))
    if len(peaks) < 2:
        raise PeaksNotFound(
            f"found {len(peaks)} extrema in column '{column}'; need at least 2"
        )
    return sorted(peaks)
