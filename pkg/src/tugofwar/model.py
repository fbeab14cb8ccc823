"""Mean-field tug-of-war model in the bound fractions (y, z).

y and z are the fractions of plus and minus motors attached to the track.
The load-sharing coefficients (a, b) depend on which team wins, i.e. on the
side of the switching line z = y * nu * F_s+ / F_s- the state lies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .params import MotorParams, Regime, TugOfWarConfig


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class RegimeCoeffs:
    a: float
    b: float
    regime: str


@dataclass(frozen=True)
class MotorFractions:
    y: float
    z: float

    def __post_init__(self):
        if not (0.0 <= self.y <= 1.0 and 0.0 <= self.z <= 1.0):
            raise DomainError(f"fractions must lie in [0, 1], got ({self.y}, {self.z})")


def regime_of(y: float, z: float, cfg: TugOfWarConfig) -> str:
    """Winning team at (y, z); ties on the switching line go to the plus team."""
    if y < 0 or z < 0:
        raise DomainError(f"negative fraction ({y}, {z})")
    if y == 0 and z == 0:
        raise DomainError("regime undefined at y = z = 0")
    if z * cfg.minus.F_s <= y * cfg.nu * cfg.plus.F_s:
        return Regime.PLUS
    return Regime.MINUS


def regime_coeffs(cfg: TugOfWarConfig, regime: str) -> RegimeCoeffs:
    p, m = cfg.plus, cfg.minus
    if regime == Regime.PLUS:
        s = p.V_F + m.V_B
        return RegimeCoeffs(m.V_B / (m.F_s * s), p.V_F / (p.F_s * s), regime)
    if regime == Regime.MINUS:
        s = p.V_B + m.V_F
        return RegimeCoeffs(m.V_F / (m.F_s * s), p.V_B / (p.F_s * s), regime)
    raise ValueError(f"unknown regime {regime!r}")


def load_exponents(y: float, z: float, cfg: TugOfWarConfig) -> tuple[float, float]:
    """Per-motor load over detachment force for each team, F/F_d."""
    c = regime_coeffs(cfg, regime_of(y, z, cfg))
    denom = c.a * cfg.nu * y + c.b * z
    if denom <= 0:
        raise DomainError("a*nu*y + b*z vanishes")
    return z / (denom * cfg.plus.F_d), cfg.nu * y / (denom * cfg.minus.F_d)


def off_rates(y: float, z: float, cfg: TugOfWarConfig) -> tuple[float, float]:
    e_plus, e_minus = load_exponents(y, z, cfg)
    return cfg.plus.k_off0 * math.exp(e_plus), cfg.minus.k_off0 * math.exp(e_minus)


def flow(y: float, z: float, cfg: TugOfWarConfig) -> tuple[float, float]:
    """Right-hand side (dy/dt, dz/dt) of the mean-field equations."""
    k_plus, k_minus = off_rates(y, z, cfg)
    p, m = cfg.plus, cfg.minus
    return p.k_on - y * (p.k_on + k_plus), m.k_on - z * (m.k_on + k_minus)


def cargo_velocity(y: float, z: float, cfg: TugOfWarConfig) -> float:
    p, m = cfg.plus, cfg.minus
    pull_plus = y * cfg.nu * p.F_s
    pull_minus = z * m.F_s
    if regime_of(y, z, cfg) == Regime.PLUS:
        if pull_plus == pull_minus:
            return 0.0
        return (pull_plus - pull_minus) / (pull_plus / p.V_F + pull_minus / m.V_B)
    return (pull_plus - pull_minus) / (pull_plus / p.V_B + pull_minus / m.V_F)


def cargo_force(y: float, z: float, cfg: TugOfWarConfig) -> float:
    """Cargo load in pN; proportional to the plus-motor count N+."""
    if cfg.n_plus_total is None:
        raise ValueError("cargo force needs n_plus_total")
    p, m = cfg.plus, cfg.minus
    n_plus = cfg.n_plus_total
    if regime_of(y, z, cfg) == Regime.PLUS:
        denom = y * cfg.nu * m.V_B / m.F_s + z * p.V_F / p.F_s
        return y * z * (m.V_B + p.V_F) * n_plus / denom
    denom = y * cfg.nu * m.V_F / m.F_s + z * p.V_B / p.F_s
    return y * z * (p.V_B + m.V_F) * n_plus / denom


def single_motor_velocity(F: float, params: MotorParams) -> float:
    """Piecewise-linear force-velocity law; F > 0 opposes the motor."""
    if F <= 0:
        return params.V_F
    if F <= params.F_s:
        return params.V_F * (1.0 - F / params.F_s)
    return params.V_B * (1.0 - F / params.F_s)


def cargo_force_discrete(n_plus: int, n_minus: int, cfg: TugOfWarConfig) -> float:
    """Cargo load for integer numbers of attached motors.

    Zero when the losing team has no attached motor.
    """
    if n_plus < 0 or n_minus < 0:
        raise DomainError("negative motor count")
    if n_plus == 0 and n_minus == 0:
        raise DomainError("cargo force undefined with no attached motors")
    if n_plus == 0 or n_minus == 0:
        return 0.0
    p, m = cfg.plus, cfg.minus
    pull_plus, pull_minus = n_plus * p.F_s, n_minus * m.F_s
    if pull_plus == pull_minus:
        return pull_plus
    if pull_plus > pull_minus:
        return (p.V_F + m.V_B) / (p.V_F / pull_plus + m.V_B / pull_minus)
    return (p.V_B + m.V_F) / (p.V_B / pull_plus + m.V_F / pull_minus)
