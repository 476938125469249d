"""Physical parameters and density-matrix value types.

Conventions
-----------
* Bare basis: two excited states |1>, |2> share the ground state |3> (V scheme).
* All rates and frequencies are dimensionless, expressed in units of a single
  reference decay rate.  ``gamma1`` and ``gamma2`` are the HALF population
  decay rates of |1> and |2> (full rates 2*gamma1, 2*gamma2).
* ``big_g`` and ``small_g`` are the pump/probe Rabi half-amplitudes (the full
  Rabi frequencies are 2G and 2g).
* Detunings: ``delta1`` (probe, W13 - omega1), ``delta2`` (pump,
  W23 - omega2), and the excited-level splitting ``w12`` = W13 - W23.  The
  pump-probe beat delta = omega1 - omega2 is derived, never stored:
  delta = w12 - delta1 + delta2.
* ``eta0`` switches the cross-decay interference on (1) or off (0); the
  interference strength is eta = eta0 * sqrt(gamma1*gamma2) * cos(theta).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import (
    ConfigSyntaxError,
    InvalidSwitch,
    MissingKey,
    NonPositiveRate,
    UnknownKey,
)

PARAM_KEYS = (
    "gamma1",
    "gamma2",
    "theta_deg",
    "eta0",
    "big_g",
    "small_g",
    "w12",
    "delta2",
    "delta1",
)


@dataclass(frozen=True, eq=True)
class SystemParams:
    """Immutable parameter set shared by every solver."""

    gamma1: float
    gamma2: float
    theta_deg: float
    eta0: float
    big_g: float
    small_g: float
    w12: float
    delta2: float
    delta1: float

    @property
    def eta(self) -> float:
        """Cross-decay interference strength eta0*sqrt(g1*g2)*cos(theta)."""
        return self.eta0 * math.sqrt(self.gamma1 * self.gamma2) * math.cos(
            math.radians(self.theta_deg)
        )

    @property
    def delta(self) -> float:
        """Probe-pump beat frequency omega1 - omega2."""
        return self.w12 - self.delta1 + self.delta2

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def make_params(raw: Mapping[str, object]) -> SystemParams:
    """Validate a flat key/value mapping and build a :class:`SystemParams`.

    Raises
    ------
    MissingKey
        A required key is absent.
    UnknownKey
        The mapping contains a key that is not a parameter field.
    NonPositiveRate
        gamma1 or gamma2 is not strictly positive.
    InvalidSwitch
        eta0 is neither 0 nor 1.
    """
    unknown = sorted(set(raw) - set(PARAM_KEYS))
    if unknown:
        raise UnknownKey(f"unknown parameter key(s): {', '.join(unknown)}")
    missing = [k for k in PARAM_KEYS if k not in raw]
    if missing:
        raise MissingKey(f"missing parameter key(s): {', '.join(missing)}")

    vals = {}
    for key in PARAM_KEYS:
        try:
            vals[key] = float(raw[key])  # type: ignore[arg-type]
        except (TypeError, ValueError) as exc:
            raise ConfigSyntaxError(f"value for '{key}' is not a number: {raw[key]!r}") from exc

    if vals["gamma1"] <= 0:
        raise NonPositiveRate(f"gamma1 must be > 0, got {vals['gamma1']}")
    if vals["gamma2"] <= 0:
        raise NonPositiveRate(f"gamma2 must be > 0, got {vals['gamma2']}")
    if vals["eta0"] not in (0.0, 1.0):
        raise InvalidSwitch(f"eta0 must be exactly 0 or 1, got {vals['eta0']}")
    if not math.isfinite(vals["small_g"]) or vals["small_g"] < 0:
        raise ConfigSyntaxError(f"small_g must be finite and >= 0, got {vals['small_g']}")
    return SystemParams(**vals)


def eta(params: SystemParams) -> float:
    """Interference strength of the shared-vacuum decay channels."""
    return params.eta


def parse_config_text(text: str) -> dict[str, float]:
    """Parse flat ``key = value`` configuration text.

    Blank lines and '#' comments are ignored.  Syntax errors report the
    offending line number.
    """
    out: dict[str, float] = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigSyntaxError(f"line {lineno}: expected 'key = value', got {rawline!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigSyntaxError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigSyntaxError(f"line {lineno}: duplicate key '{key}'")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigSyntaxError(
                f"line {lineno}: value for '{key}' is not a number: {value!r}"
            ) from None
    return out


def load_config(path: str | Path) -> dict[str, float]:
    return parse_config_text(Path(path).read_text(encoding="utf-8"))


def config_text(params: SystemParams) -> str:
    """Serialize parameters as config text; floats use repr so that a
    parse round trip is bit-exact."""
    return "".join(f"{k} = {params.as_dict()[k]!r}\n" for k in PARAM_KEYS)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """3x3 density matrix in the bare basis {|1>, |2>, |3>}."""

    rho: np.ndarray

    def __post_init__(self):
        arr = np.array(self.rho, dtype=complex)
        if arr.shape != (3, 3):
            raise ValueError(f"density matrix must be 3x3, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "rho", arr)

    @classmethod
    def ground_state(cls) -> "DensityMatrix":
        m = np.zeros((3, 3), dtype=complex)
        m[2, 2] = 1.0
        return cls(m)

    @classmethod
    def from_populations(cls, p1: float, p2: float, p3: float) -> "DensityMatrix":
        return cls(np.diag([p1, p2, p3]).astype(complex))

    @property
    def populations(self) -> np.ndarray:
        return self.rho.diagonal().real.copy()

    @property
    def trace(self) -> float:
        return float(self.rho.trace().real)

    def validate(self, hermitian_tol=1e-12, trace_tol=1e-10, diag_tol=1e-10) -> "DensityMatrix":
        """Check hermiticity, unit trace and diagonal bounds; returns self.

        ``diag_tol`` is relaxed (1e-8) for states produced by time
        integration, where accumulated step error can push a population
        slightly below zero.
        """
        defect = np.max(np.abs(self.rho - self.rho.conj().T))
        if defect > hermitian_tol:
            raise ValueError(f"density matrix not Hermitian: defect {defect:.3e}")
        if abs(self.trace - 1.0) > trace_tol:
            raise ValueError(f"density matrix trace {self.trace!r} != 1")
        diags = self.rho.diagonal()
        if np.max(np.abs(diags.imag)) > hermitian_tol:
            raise ValueError("density matrix diagonal is not real")
        if np.min(diags.real) < -diag_tol or np.max(diags.real) > 1 + diag_tol:
            raise ValueError(f"populations out of [0, 1]: {diags.real}")
        return self
