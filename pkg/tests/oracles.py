"""Independent oracles used by the test suite.

These deliberately avoid the solver paths they are used to check: the
harmonic extraction below goes through brute-force time integration plus
trapezoid Fourier projection, and the two-level steady state is a hand
closed form.
"""
from __future__ import annotations

import numpy as np

from vicprobe.master import MasterRHS, Mode, integrate, steady_state_pump_only
from vicprobe.model import DensityMatrix, SystemParams


def two_level_steady_state(params: SystemParams) -> tuple[float, complex]:
    """(r22, r23) of the resonantly damped pump-only two-level system,
    valid when the interference is off (level |1> empty)."""
    g2, G, d2 = params.gamma2, params.big_g, params.delta2
    sat = g2**2 + d2**2 + 2 * G**2
    return G**2 / sat, G * (d2 + 1j * g2) / sat


def harmonic_from_time_domain(
    params: SystemParams,
    m: int,
    t_transient: float,
    n_samples: int = 128,
    tol: float = 2e-10,
    rho0: DensityMatrix | None = None,
) -> np.ndarray:
    """m-th harmonic of the periodic steady state by brute force.

    Integrates the full equations of motion past the transients, then
    projects one beat period onto exp(+i m delta t) with the trapezoid rule
    (spectrally accurate for periodic data).
    """
    delta = params.delta
    if delta == 0.0:
        raise ValueError("harmonic projection needs a nonzero beat")
    period = 2 * np.pi / abs(delta)
    if rho0 is None:
        rho0 = steady_state_pump_only(params)
    r = MasterRHS(params, Mode.DRIVEN)

    t_eval = np.concatenate((
        [0.0],
        t_transient + period * np.arange(n_samples + 1) / n_samples,
    ))
    traj = integrate(r, rho0, float(t_eval[-1]), tol=tol, t_eval=t_eval)

    acc = np.zeros((3, 3), dtype=complex)
    # endpoints are one full period apart: weight them half each
    for k in range(1, len(traj.times)):
        t = traj.times[k]
        w = 0.5 if k in (1, len(traj.times) - 1) else 1.0
        acc += w * traj.states[k].rho * np.exp(1j * m * delta * t)
    return acc / n_samples


def log_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])
