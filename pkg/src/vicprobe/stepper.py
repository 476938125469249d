"""Adaptive Dormand-Prince 5(4) integrator with PI step-size control.

Small and self-contained: every system in this package is at most nine real
components, so a dense explicit pair with first-same-as-last reuse is all
that is needed.  Error is budgeted per unit time: a step of size h is
accepted when ``max|err| <= tol * h``.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import StepSizeUnderflow

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_ALPHA = 0.7 / 5.0  # PI exponents for a 5th-order pair
_BETA = 0.4 / 5.0

# Dormand-Prince coefficients
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1 = 35 / 384 - 5179 / 57600
_E3 = 500 / 1113 - 7571 / 16695
_E4 = 125 / 192 - 393 / 640
_E5 = -2187 / 6784 + 92097 / 339200
_E6 = 11 / 84 - 187 / 2100
_E7 = -1 / 40
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9


def integrate_adaptive(
    f: Callable[[float, np.ndarray], np.ndarray],
    t0: float,
    y0: np.ndarray,
    t_end: float,
    dt0: float,
    tol: float = 1e-9,
    t_eval: np.ndarray | None = None,
    min_step: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate y' = f(t, y) from t0 to t_end.

    Returns ``(times, states)``; rows of ``states`` are the solution at
    ``times``.  With ``t_eval`` given, the integrator steps exactly onto the
    requested output times (no interpolation); otherwise every accepted step
    is recorded.

    Raises StepSizeUnderflow when error control pushes the step size below
    ``min_step``.
    """
    y = np.array(y0, dtype=float, copy=True)
    t = float(t0)
    if t_end <= t0:
        raise ValueError(f"t_end must exceed t0, got {t_end} <= {t0}")

    targets: list[float]
    if t_eval is None:
        targets = [t_end]
        record_all = True
    else:
        t_eval = np.asarray(t_eval, dtype=float)
        if t_eval.ndim != 1 or (len(t_eval) > 1 and np.any(np.diff(t_eval) <= 0)):
            raise ValueError("t_eval must be strictly increasing")
        if len(t_eval) == 0 or t_eval[0] < t0 or t_eval[-1] > t_end:
            raise ValueError("t_eval must be non-empty and lie within [t0, t_end]")
        targets = list(t_eval)
        record_all = False

    out_t: list[float] = []
    out_y: list[np.ndarray] = []
    if record_all:
        out_t.append(t)
        out_y.append(y.copy())
    elif targets and targets[0] == t0:
        out_t.append(t)
        out_y.append(y.copy())
        targets.pop(0)

    h = max(min(float(dt0), t_end - t), min_step)
    k1 = f(t, y)
    prev_ratio = 1.0

    while targets:
        target = targets[0]
        remaining = target - t
        if remaining <= 1e-14 * max(1.0, abs(target)):
            # already there (up to rounding)
            out_t.append(target)
            out_y.append(y.copy())
            targets.pop(0)
            continue

        hit = h >= remaining
        h_step = remaining if hit else h
        if h_step < min_step:
            raise StepSizeUnderflow(
                f"step size {h_step:.3e} below {min_step:.3e} at t={t:.6g}"
            )

        k2 = f(t + _C2 * h_step, y + h_step * (_A21 * k1))
        k3 = f(t + _C3 * h_step, y + h_step * (_A31 * k1 + _A32 * k2))
        k4 = f(t + _C4 * h_step, y + h_step * (_A41 * k1 + _A42 * k2 + _A43 * k3))
        k5 = f(t + _C5 * h_step, y + h_step * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
        k6 = f(t + h_step, y + h_step * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5))
        y5 = y + h_step * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
        k7 = f(t + h_step, y5)

        err_vec = h_step * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
        err = float(np.max(np.abs(err_vec)))
        ratio = err / (tol * h_step)

        if ratio <= 1.0:
            t = target if hit else t + h_step
            y = y5
            k1 = k7
            if hit:
                out_t.append(target)
                out_y.append(y.copy())
                targets.pop(0)
            elif record_all:
                out_t.append(t)
                out_y.append(y.copy())
            fac = _SAFETY * max(ratio, 1e-10) ** (-_ALPHA) * prev_ratio**_BETA
            prev_ratio = max(ratio, 1e-10)
            h = max(h_step * min(_MAX_FACTOR, max(_MIN_FACTOR, fac)), min_step)
        else:
            h = max(h_step * max(_MIN_FACTOR, _SAFETY * ratio ** (-0.2)), 0.0)

    return np.array(out_t), np.array(out_y)
