"""One-dimensional reduction of the stationary-state problem.

At a stationary state the ratio theta = y/z is a zero of

    h(theta) = (theta - 1) k+on k-on + theta k-on k+off(theta) - k+on k-off(theta)

and y, z follow from theta alone. h is continuous on [0, inf) with a kink at
the regime threshold theta = F_s- / (nu F_s+). Two compactifications map
[0, inf) onto [0, 2): ``w`` breaks at 1, ``w_hat`` breaks at the threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import DomainError, regime_coeffs
from .params import Regime, TugOfWarConfig


class NonDifferentiableError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Slope:
    """One-sided derivatives at a point.

    ``left == right`` away from breakpoints. At a breakpoint the sign rule
    applies: agreeing signs carry over, disagreeing signs count as zero.
    """

    left: float
    right: float

    @property
    def kinked(self) -> bool:
        return self.left != self.right

    @property
    def value(self) -> float:
        if self.kinked:
            raise NonDifferentiableError(f"one-sided derivatives differ: {self.left} vs {self.right}")
        return self.right

    def sign(self, tol: float = 0.0) -> int:
        if self.left > tol and self.right > tol:
            return 1
        if self.left < -tol and self.right < -tol:
            return -1
        return 0

    def effective(self) -> float:
        """Single number consistent with the sign rule (smaller magnitude if kinked)."""
        if not self.kinked:
            return self.right
        if self.sign() == 0:
            return 0.0
        return min(self.left, self.right, key=abs)


@dataclass(frozen=True)
class ThetaPoint:
    theta: float
    value: float
    derivative: Slope


@dataclass(frozen=True)
class VarthetaPoint:
    vartheta: float
    value: float
    derivative: Slope


def _coeffs_for_theta(theta: float, cfg: TugOfWarConfig, side: str = "right"):
    # the threshold itself belongs to the plus-winning branch
    t = cfg.threshold
    if theta > t or (theta == t and side == "right"):
        return regime_coeffs(cfg, Regime.PLUS)
    return regime_coeffs(cfg, Regime.MINUS)


def off_rates_theta(theta: float, cfg: TugOfWarConfig, side: str = "right") -> tuple[float, float]:
    """Per-motor off-rates along the ray z = y / theta."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    c = _coeffs_for_theta(theta, cfg, side)
    d = c.a * cfg.nu * theta + c.b
    k_plus = cfg.plus.k_off0 * math.exp(1.0 / (d * cfg.plus.F_d))
    k_minus = cfg.minus.k_off0 * math.exp(cfg.nu * theta / (d * cfg.minus.F_d))
    return k_plus, k_minus


def h_eval(theta: float, cfg: TugOfWarConfig) -> float:
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    kon_p, kon_m = cfg.plus.k_on, cfg.minus.k_on
    koff_p, koff_m = off_rates_theta(theta, cfg)
    return (theta - 1.0) * kon_p * kon_m + theta * kon_m * koff_p - kon_p * koff_m


def _h_prime_branch(theta: float, cfg: TugOfWarConfig, side: str) -> float:
    c = _coeffs_for_theta(theta, cfg, side)
    nu = cfg.nu
    kon_p, kon_m = cfg.plus.k_on, cfg.minus.k_on
    koff_p, koff_m = off_rates_theta(theta, cfg, side)
    d2 = (c.a * nu * theta + c.b) ** 2
    return (
        kon_m * (kon_p + koff_p)
        - theta * kon_m * koff_p * c.a * nu / (d2 * cfg.plus.F_d)
        - kon_p * koff_m * c.b * nu / (d2 * cfg.minus.F_d)
    )


def h_prime_eval(theta: float, cfg: TugOfWarConfig) -> Slope:
    """Analytic dh/dtheta; one-sided pair at the regime threshold."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    right = _h_prime_branch(theta, cfg, "right")
    if theta == cfg.threshold and theta > 0:
        return Slope(_h_prime_branch(theta, cfg, "left"), right)
    return Slope(right, right)


def h_prime_at_root(theta: float, cfg: TugOfWarConfig, side: str = "right") -> float:
    """Derivative in the form valid only where h(theta) = 0.

    Uses k+on k-off = (theta - 1) k+on k-on + theta k-on k+off to remove k-off.
    """
    c = _coeffs_for_theta(theta, cfg, side)
    nu = cfg.nu
    kon_p, kon_m = cfg.plus.k_on, cfg.minus.k_on
    koff_p, _ = off_rates_theta(theta, cfg, side)
    d2 = (c.a * nu * theta + c.b) ** 2
    return (
        kon_m * (kon_p + koff_p)
        - c.b * nu * kon_m * ((theta - 1.0) * kon_p + theta * koff_p) / (d2 * cfg.minus.F_d)
        - c.a * theta * nu * kon_m * koff_p / (d2 * cfg.plus.F_d)
    )


def h_point(theta: float, cfg: TugOfWarConfig) -> ThetaPoint:
    return ThetaPoint(theta, h_eval(theta, cfg), h_prime_eval(theta, cfg))


def h_limit_slope(cfg: TugOfWarConfig) -> float:
    """lim h(theta)/theta as theta -> infinity."""
    return cfg.minus.k_on * (cfg.plus.k_on + cfg.plus.k_off0)


def h_at_zero(cfg: TugOfWarConfig) -> float:
    return -cfg.plus.k_on * (cfg.minus.k_on + cfg.minus.k_off0)


# --- compactification w: breakpoint at 1 -------------------------------------

def _check_vartheta(vartheta: float) -> None:
    if not 0.0 <= vartheta < 2.0:
        raise DomainError(f"vartheta must lie in [0, 2), got {vartheta}")


def map_root(vartheta: float) -> float:
    _check_vartheta(vartheta)
    if vartheta <= 1.0:
        return vartheta
    return 1.0 / (2.0 - vartheta)


def unmap_root(theta: float) -> float:
    """Inverse of :func:`map_root`."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    if theta <= 1.0:
        return theta
    return 2.0 - 1.0 / theta


def w_eval(vartheta: float, cfg: TugOfWarConfig) -> float:
    _check_vartheta(vartheta)
    if vartheta <= 1.0:
        return h_eval(vartheta, cfg)
    return (2.0 - vartheta) * h_eval(1.0 / (2.0 - vartheta), cfg)


def _chain_slope(t: float, slope: Slope, value: float, scale: float) -> Slope:
    # d/dvartheta [h(t)/t * scale-free factor] for t(vartheta) increasing
    return Slope((t * slope.left - value) / scale, (t * slope.right - value) / scale)


def w_prime_eval(vartheta: float, cfg: TugOfWarConfig) -> Slope:
    """dw/dvartheta as a one-sided pair.

    On the compactified branch w = h(t)/t with t = 1/(2 - vartheta), so
    w' = t h'(t) - h(t); at a root this has the sign of h'(t).
    """
    _check_vartheta(vartheta)
    if vartheta < 1.0:
        return h_prime_eval(vartheta, cfg)
    t = 1.0 / (2.0 - vartheta)
    outer = _chain_slope(t, h_prime_eval(t, cfg), h_eval(t, cfg), 1.0)
    if vartheta == 1.0:
        return Slope(h_prime_eval(1.0, cfg).left, outer.right)
    return outer


def w_breakpoints(cfg: TugOfWarConfig) -> list[float]:
    """Points in [0, 2) where w may lack a derivative."""
    beta = cfg.threshold
    image = beta if beta <= 1.0 else 2.0 - 1.0 / beta
    return sorted({1.0, image})


# --- compactification w_hat: breakpoint at the regime threshold --------------

def hat_usable(cfg: TugOfWarConfig) -> bool:
    return cfg.threshold < 2.0


def map_root_hat(vartheta: float, cfg: TugOfWarConfig) -> float:
    _check_vartheta(vartheta)
    beta = cfg.threshold
    if not hat_usable(cfg):
        return map_root(vartheta)
    if vartheta <= beta:
        return vartheta
    return (2.0 - beta) * beta / (2.0 - vartheta)


def unmap_root_hat(theta: float, cfg: TugOfWarConfig) -> float:
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    beta = cfg.threshold
    if not hat_usable(cfg):
        return unmap_root(theta)
    if theta <= beta:
        return theta
    return 2.0 - (2.0 - beta) * beta / theta


def w_hat_eval(vartheta: float, cfg: TugOfWarConfig) -> float:
    """Compactified h with its single breakpoint at the regime threshold.

    Falls back to :func:`w_eval` when the threshold is not below 2.
    """
    _check_vartheta(vartheta)
    beta = cfg.threshold
    if not hat_usable(cfg):
        return w_eval(vartheta, cfg)
    if vartheta <= beta:
        return h_eval(vartheta, cfg)
    theta = (2.0 - beta) * beta / (2.0 - vartheta)
    return (2.0 - vartheta) / (2.0 - beta) * h_eval(theta, cfg)


def w_hat_prime_eval(vartheta: float, cfg: TugOfWarConfig) -> Slope:
    _check_vartheta(vartheta)
    beta = cfg.threshold
    if not hat_usable(cfg):
        return w_prime_eval(vartheta, cfg)
    if vartheta < beta:
        return h_prime_eval(vartheta, cfg)
    s = (2.0 - beta) * beta / (2.0 - vartheta)
    outer = _chain_slope(s, h_prime_eval(s, cfg), h_eval(s, cfg), 2.0 - beta)
    if vartheta == beta:
        return Slope(h_prime_eval(beta, cfg).left, outer.right)
    return outer


def w_hat_breakpoints(cfg: TugOfWarConfig) -> list[float]:
    if not hat_usable(cfg):
        return w_breakpoints(cfg)
    return [cfg.threshold]


def w_limit(cfg: TugOfWarConfig) -> float:
    return h_limit_slope(cfg)


def w_hat_limit(cfg: TugOfWarConfig) -> float:
    if not hat_usable(cfg):
        return w_limit(cfg)
    return cfg.threshold * h_limit_slope(cfg)


def vartheta_point(vartheta: float, cfg: TugOfWarConfig, curve: str = "w") -> VarthetaPoint:
    if curve == "w":
        return VarthetaPoint(vartheta, w_eval(vartheta, cfg), w_prime_eval(vartheta, cfg))
    if curve == "what":
        return VarthetaPoint(vartheta, w_hat_eval(vartheta, cfg), w_hat_prime_eval(vartheta, cfg))
    raise ValueError(f"unknown curve {curve!r}")
