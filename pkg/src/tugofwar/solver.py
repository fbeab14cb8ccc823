"""Stationary states: root finding on the reduced curve, stability, scans."""
from __future__ import annotations

import logging
import math
import warnings
from functools import partial
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import reduction as red
from .model import cargo_force, flow, regime_coeffs, regime_of
from .params import TugOfWarConfig

log = logging.getLogger(__name__)

MARGINAL_TOL = 1e-9
TANGENT_TOL = 1e-6
GRID_TOP_GAP = 1e-6
MERGE_DIST = 1e-9
MAX_BISECTIONS = 200


class Stability:
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    MARGINAL = "Marginal"


class RootFindingError(RuntimeError):
    pass


class ConsistencyError(RuntimeError):
    """The derivative-sign and Jacobian stability criteria disagree."""


@dataclass(frozen=True)
class StationaryState:
    theta: float
    y: float
    z: float
    velocity: float
    force: Optional[float]
    h_prime: float
    stability: str
    h_prime_left: float
    h_prime_right: float


@dataclass(frozen=True)
class JacobianSummary:
    trace: float
    determinant: float
    stable: bool


@dataclass
class Bifurcation:
    lower: float
    upper: float
    value: float
    stable_before: int
    stable_after: int
    theta: Optional[float]
    h_prime: Optional[float]


@dataclass
class ScanResult:
    parameter: str
    values: list[float]
    states: list[list[StationaryState]]
    errors: list[Optional[str]]
    bifurcations: list[Bifurcation] = field(default_factory=list)

    def stable_counts(self) -> list[Optional[int]]:
        return [None if err else _count_stable(s) for s, err in zip(self.states, self.errors)]


# --- root finding -------------------------------------------------------------

class FallbackWarning(UserWarning):
    """The regime threshold is at least 2, so root search uses w instead of w_hat."""


def _curve(cfg: TugOfWarConfig, curve: str):
    if curve == "what" and not red.hat_usable(cfg):
        # fixed text, so the default filter shows it once per process
        warnings.warn("regime threshold >= 2: root search uses w instead of w_hat", FallbackWarning, stacklevel=3)
        log.debug("w fallback at threshold %.6g", cfg.threshold)
        curve = "w"
    if curve == "what":
        return (lambda v: red.w_hat_eval(v, cfg)), (lambda v: red.map_root_hat(v, cfg)), red.w_hat_breakpoints(cfg)
    if curve == "w":
        return (lambda v: red.w_eval(v, cfg)), red.map_root, red.w_breakpoints(cfg)
    raise ValueError(f"unknown curve {curve!r}")


def bisect_theta(h: Callable[[float], float], lo: float, hi: float) -> float:
    """Bisection on a sign-change bracket, run until the floats are exhausted."""
    h_lo, h_hi = h(lo), h(hi)
    if h_lo == 0:
        return lo
    if h_hi == 0:
        return hi
    if (h_lo > 0) == (h_hi > 0):
        raise RootFindingError(f"no sign change on [{lo}, {hi}]")
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return lo if abs(h_lo) <= abs(h_hi) else hi
        h_mid = h(mid)
        if h_mid == 0:
            return mid
        if (h_mid > 0) == (h_lo > 0):
            lo, h_lo = mid, h_mid
        else:
            hi, h_hi = mid, h_mid
    raise RootFindingError(f"bisection did not converge on [{lo}, {hi}] in {MAX_BISECTIONS} steps")


def _tangent_candidates(grid, values, tol, cfg, to_theta, sink):
    """Inspect shallow local minima of |curve| that show no sign change."""
    h = partial(red.h_eval, cfg=cfg)
    threshold = math.sqrt(tol)
    mags = np.abs(values)
    for i in range(1, len(grid) - 1):
        v_prev, v, v_next = values[i - 1], values[i], values[i + 1]
        if v == 0 or mags[i] > mags[i - 1] or mags[i] > mags[i + 1] or mags[i] >= threshold:
            continue
        if not (np.sign(v_prev) == np.sign(v) == np.sign(v_next)):
            continue
        sgn = 1.0 if v > 0 else -1.0
        lo, hi = to_theta(grid[i - 1]), to_theta(grid[i + 1])
        res = minimize_scalar(lambda t: sgn * h(t), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14 * max(1.0, hi)})
        t_ext = float(res.x)
        h_ext = h(t_ext)
        if h_ext == 0:
            sink.append(t_ext)
        elif (h_ext > 0) != (sgn > 0):
            # two close simple roots hidden inside one grid cell
            sink.append(bisect_theta(h, lo, t_ext))
            sink.append(bisect_theta(h, t_ext, hi))
        elif abs(h_ext) <= TANGENT_TOL and abs(red.h_prime_eval(t_ext, cfg).effective()) <= TANGENT_TOL:
            sink.append(t_ext)


def _tail_root(h, theta_top: float) -> float:
    """Root beyond the last grid point; h(theta)/theta has a positive limit, so doubling brackets it."""
    lo, hi = theta_top, 2.0 * theta_top
    for _ in range(MAX_BISECTIONS):
        if h(hi) > 0:
            return bisect_theta(h, lo, hi)
        lo, hi = hi, 2.0 * hi
    raise RootFindingError(f"no sign change of h up to theta={hi:.3g}")


def _dedupe(thetas: Sequence[float]) -> list[float]:
    out: list[float] = []
    for t in sorted(thetas):
        if out and abs(t - out[-1]) <= MERGE_DIST * max(1.0, abs(t)):
            continue
        out.append(t)
    return out


def find_roots(cfg: TugOfWarConfig, grid_points: int = 4096, tol: float = 1e-12,
               curve: str = "what") -> list[float]:
    """All roots theta* of h, sorted ascending.

    The compactified curve is sampled on a uniform grid over [0, 2 - 1e-6]
    plus its breakpoints; every sign change is refined by bisection in theta.
    Tangent roots are looked for at local minima of |curve| below sqrt(tol).
    """
    if grid_points < 64:
        raise ValueError("grid_points must be at least 64")
    if tol <= 0:
        raise ValueError("tol must be positive")
    value, to_theta, breaks = _curve(cfg, curve)
    h = partial(red.h_eval, cfg=cfg)
    grid = np.union1d(np.linspace(0.0, 2.0 - GRID_TOP_GAP, grid_points), breaks)
    values = np.array([value(v) for v in grid])

    roots: list[float] = [to_theta(v) for v, f in zip(grid, values) if f == 0]
    signs = np.sign(values)
    for i in np.nonzero(signs[:-1] * signs[1:] < 0)[0]:
        roots.append(bisect_theta(h, to_theta(grid[i]), to_theta(grid[i + 1])))
    if values[-1] < 0:
        roots.append(_tail_root(h, to_theta(grid[-1])))
    _tangent_candidates(grid, values, tol, cfg, to_theta, roots)
    result = _dedupe(float(t) for t in roots)
    if not result:
        raise RootFindingError("no root found; the curve must change sign on [0, 2)")
    return result


# --- stationary states and stability -----------------------------------------

def steady_velocity(theta: float, cfg: TugOfWarConfig) -> float:
    """Cargo velocity at a stationary state, as a function of theta alone."""
    p, m = cfg.plus, cfg.minus
    pull_plus = theta * cfg.nu * p.F_s
    if theta >= cfg.threshold:
        if pull_plus == m.F_s:
            return 0.0
        return (pull_plus - m.F_s) / (pull_plus / p.V_F + m.F_s / m.V_B)
    return (pull_plus - m.F_s) / (pull_plus / p.V_B + m.F_s / m.V_F)


def _root_scale(theta: float, cfg: TugOfWarConfig) -> float:
    return max(1.0, abs(red.h_at_zero(cfg)), red.h_limit_slope(cfg) * max(1.0, theta))


def steady_from_theta(theta: float, cfg: TugOfWarConfig, root_tol: float = 1e-9) -> StationaryState:
    """Stationary state for a root of h.

    Tangent roots (|h| and |h'| both at most 1e-6) are accepted with the
    looser residual that their detection allows.
    """
    residual = red.h_eval(theta, cfg)
    slope = red.h_prime_eval(theta, cfg)
    tangent = abs(residual) <= TANGENT_TOL and abs(slope.effective()) <= TANGENT_TOL
    strict = abs(residual) <= root_tol * _root_scale(theta, cfg)
    if not strict and not tangent:
        raise ValueError(f"theta={theta} is not a root: h={residual:.3e}")
    koff_p, koff_m = red.off_rates_theta(theta, cfg)
    y = cfg.plus.k_on / (cfg.plus.k_on + koff_p)
    z = cfg.minus.k_on / (cfg.minus.k_on + koff_m)
    sign = slope.sign(MARGINAL_TOL) if strict else 0
    stability = {1: Stability.STABLE, -1: Stability.UNSTABLE, 0: Stability.MARGINAL}[sign]
    force = cargo_force(y, z, cfg) if cfg.n_plus_total is not None else None
    return StationaryState(theta, y, z, steady_velocity(theta, cfg), force,
                           slope.effective(), stability, slope.left, slope.right)


def jacobian_at(y_star: float, z_star: float, cfg: TugOfWarConfig, fixed_tol: float = 1e-8) -> JacobianSummary:
    """Trace and determinant of the flow Jacobian at a fixed point.

    The closed forms substitute the fixed-point relations, so they are only
    meaningful at fixed points; other points are rejected.
    """
    f, g = flow(y_star, z_star, cfg)
    scale = max(1.0, cfg.plus.k_on, cfg.minus.k_on)
    if abs(f) + abs(g) > fixed_tol * scale:
        raise ValueError(f"({y_star}, {z_star}) is not a fixed point: |f|+|g|={abs(f) + abs(g):.3e}")
    c = regime_coeffs(cfg, regime_of(y_star, z_star, cfg))
    nu = cfg.nu
    y, z = y_star, z_star
    kp, km = cfg.plus.k_on, cfg.minus.k_on
    d2 = (c.a * nu * y + c.b * z) ** 2
    trace = ((1 - y) * z * c.a * nu * kp / (d2 * cfg.plus.F_d)
             + (1 - z) * y * c.b * nu * km / (d2 * cfg.minus.F_d)
             - kp / y - km / z)
    det = (1 / (y * z)
           - (1 - z) * c.b * nu / (d2 * cfg.minus.F_d)
           - (1 - y) * c.a * nu / (d2 * cfg.plus.F_d)) * kp * km
    return JacobianSummary(trace, det, det > 0)


def flow_jacobian(y: float, z: float, cfg: TugOfWarConfig) -> np.ndarray:
    """Analytic partial derivatives of (f, g) at any interior point (regime at (y, z))."""
    c = regime_coeffs(cfg, regime_of(y, z, cfg))
    nu = cfg.nu
    p, m = cfg.plus, cfg.minus
    d = c.a * nu * y + c.b * z
    kp = p.k_off0 * math.exp(z / (d * p.F_d))
    km = m.k_off0 * math.exp(nu * y / (d * m.F_d))
    # derivatives of the two exponents
    ep_y = -z * c.a * nu / (d * d * p.F_d)
    ep_z = c.a * nu * y / (d * d * p.F_d)
    em_y = nu * c.b * z / (d * d * m.F_d)
    em_z = -nu * y * c.b / (d * d * m.F_d)
    return np.array([
        [-(p.k_on + kp) - y * kp * ep_y, -y * kp * ep_z],
        [-z * km * em_y, -(m.k_on + km) - z * km * em_z],
    ])


def _count_stable(states: Sequence[StationaryState]) -> int:
    return sum(s.stability == Stability.STABLE for s in states)


def classify_all(cfg: TugOfWarConfig, grid_points: int = 4096, tol: float = 1e-12) -> list[StationaryState]:
    """Every stationary state, labelled by dh/dtheta and cross-checked against the Jacobian."""
    states = [steady_from_theta(t, cfg) for t in find_roots(cfg, grid_points, tol)]
    for s in states:
        if s.stability == Stability.MARGINAL:
            continue
        jac = jacobian_at(s.y, s.z, cfg)
        if jac.stable != (s.stability == Stability.STABLE):
            raise ConsistencyError(
                f"theta={s.theta}: h'={s.h_prime:.6g} but det(J)={jac.determinant:.6g}")
    if len(states) % 2 == 0 and not any(s.stability == Stability.MARGINAL for s in states):
        log.info("even number of stationary states (%d) without a marginal root", len(states))
    return states


# --- parameter scans ----------------------------------------------------------

def _classify_safe(cfg, parameter, value, grid_points):
    try:
        return classify_all(cfg.with_param(parameter, value), grid_points), None
    except (RootFindingError, ConsistencyError, ValueError) as exc:
        return [], f"{type(exc).__name__}: {exc}"


def _refine(cfg, parameter, lo, hi, states_lo, states_hi, grid_points, rel_width):
    c_lo = _count_stable(states_lo)
    scale = max(abs(lo), abs(hi), 1e-300)
    while hi - lo > rel_width * scale:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        states, err = _classify_safe(cfg, parameter, mid, grid_points)
        if err:
            log.warning("refinement stopped at %s=%r: %s", parameter, mid, err)
            break
        if _count_stable(states) == c_lo:
            lo, states_lo = mid, states
        else:
            hi, states_hi = mid, states
    candidates = [(abs(s.h_prime), v, s) for v, ss in ((lo, states_lo), (hi, states_hi)) for s in ss]
    if not candidates:
        return 0.5 * (lo + hi), None, None
    _, value, best = min(candidates, key=lambda c: c[0])
    return value, best.theta, best.h_prime


def scan_parameter(cfg: TugOfWarConfig, parameter: str, values: Sequence[float],
                   grid_points: int = 4096, rel_width: float = 1e-8) -> ScanResult:
    """Classify stationary states along a parameter grid and locate bifurcations.

    A bifurcation interval is a pair of adjacent grid values whose numbers of
    stable states differ; it is narrowed by bisection on the parameter to
    ``rel_width`` relative width. A marginal root on a grid point is reported
    as a zero-width interval.
    """
    cfg.get_param(parameter)
    values = [float(v) for v in values]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError("scan values must be strictly increasing")
    result = ScanResult(parameter, values, [], [])
    for v in values:
        states, err = _classify_safe(cfg, parameter, v, grid_points)
        result.states.append(states)
        result.errors.append(err)

    for i, (states, err) in enumerate(zip(result.states, result.errors)):
        if err:
            continue
        marginal = [s for s in states if s.stability == Stability.MARGINAL]
        if marginal:
            best = min(marginal, key=lambda s: abs(s.h_prime))
            n = _count_stable(states)
            result.bifurcations.append(Bifurcation(values[i], values[i], values[i], n, n, best.theta, best.h_prime))
        if i + 1 < len(values) and not result.errors[i + 1]:
            nxt = result.states[i + 1]
            if _count_stable(states) != _count_stable(nxt):
                value, theta, hp = _refine(cfg, parameter, values[i], values[i + 1], states, nxt,
                                           grid_points, rel_width)
                result.bifurcations.append(Bifurcation(values[i], values[i + 1], value,
                                                       _count_stable(states), _count_stable(nxt), theta, hp))
    return result
