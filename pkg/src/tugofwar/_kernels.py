"""Compiled inner loops for RK4 integration and Gillespie simulation."""
import numpy as np
from numba import njit

from .model import regime_coeffs
from .params import Regime, TugOfWarConfig

# packed flow parameters
(KON_P, KOFF_P, FD_P, KON_M, KOFF_M, FD_M, NU, PULL_P, PULL_M,
 A_PLUS, B_PLUS, A_MINUS, B_MINUS) = range(13)

OK, REJECTED = 0, 1


def pack_flow_params(cfg: TugOfWarConfig) -> np.ndarray:
    cp = regime_coeffs(cfg, Regime.PLUS)
    cm = regime_coeffs(cfg, Regime.MINUS)
    return np.array([
        cfg.plus.k_on, cfg.plus.k_off0, cfg.plus.F_d,
        cfg.minus.k_on, cfg.minus.k_off0, cfg.minus.F_d,
        cfg.nu, cfg.nu * cfg.plus.F_s, cfg.minus.F_s,
        cp.a, cp.b, cm.a, cm.b,
    ])


@njit(cache=True)
def flow(y, z, P):
    if z * P[PULL_M] <= y * P[PULL_P]:
        a, b = P[A_PLUS], P[B_PLUS]
    else:
        a, b = P[A_MINUS], P[B_MINUS]
    d = a * P[NU] * y + b * z
    k_plus = P[KOFF_P] * np.exp(z / (d * P[FD_P]))
    k_minus = P[KOFF_M] * np.exp(P[NU] * y / (d * P[FD_M]))
    return P[KON_P] - y * (P[KON_P] + k_plus), P[KON_M] - z * (P[KON_M] + k_minus)


@njit(cache=True)
def _outside(y, z, lo, hi):
    return y < lo or y > hi or z < lo or z > hi


@njit(cache=True)
def rk4_step(y, z, dt, P, lo, hi):
    """One classical RK4 step; status REJECTED if a stage leaves [lo, hi]^2."""
    k1y, k1z = flow(y, z, P)
    y2, z2 = y + 0.5 * dt * k1y, z + 0.5 * dt * k1z
    if _outside(y2, z2, lo, hi):
        return y, z, REJECTED
    k2y, k2z = flow(y2, z2, P)
    y3, z3 = y + 0.5 * dt * k2y, z + 0.5 * dt * k2z
    if _outside(y3, z3, lo, hi):
        return y, z, REJECTED
    k3y, k3z = flow(y3, z3, P)
    y4, z4 = y + dt * k3y, z + dt * k3z
    if _outside(y4, z4, lo, hi):
        return y, z, REJECTED
    k4y, k4z = flow(y4, z4, P)
    return (y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
            z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z), OK)


@njit(cache=True)
def integrate_one(y0, z0, P, n_steps, dt, stride, stop_tol, lo, hi):
    """Returns (samples[k, 3] as t, y, z, number of samples, steps taken, status)."""
    out = np.empty((n_steps // stride + 2, 3))
    out[0, 0], out[0, 1], out[0, 2] = 0.0, y0, z0
    k = 1
    y, z = y0, z0
    step = 0
    status = OK
    while step < n_steps:
        y, z, status = rk4_step(y, z, dt, P, lo, hi)
        if status != OK:
            break
        step += 1
        done = False
        if stop_tol > 0:
            f, g = flow(y, z, P)
            done = abs(f) + abs(g) < stop_tol
        if step % stride == 0 or done or step == n_steps:
            out[k, 0], out[k, 1], out[k, 2] = step * dt, y, z
            k += 1
        if done:
            break
    return out, k, step, status


@njit(cache=True)
def integrate_batch(y0, z0, P, n_steps, dt, stop_tol, lo, hi):
    n = y0.shape[0]
    y_end = np.empty(n)
    z_end = np.empty(n)
    status = np.zeros(n, dtype=np.int64)
    for i in range(n):
        y, z = y0[i], z0[i]
        for _ in range(n_steps):
            if stop_tol > 0:
                f, g = flow(y, z, P)
                if abs(f) + abs(g) < stop_tol:
                    break
            y, z, st = rk4_step(y, z, dt, P, lo, hi)
            if st != OK:
                status[i] = st
                break
        y_end[i], z_end[i] = y, z
    return y_end, z_end, status


@njit(cache=True)
def _choose(r, pick):
    acc = 0.0
    last = 0
    for k in range(4):
        if r[k] > 0.0:
            last = k
            acc += r[k]
            if pick < acc:
                return k
    # rounding pushed pick past the cumulative sum
    return last


@njit(cache=True)
def gillespie_chunk(n_plus, n_minus, t, t_end, rates, uniforms, occupancy, log, log_events):
    """Advance the chain until ``t_end`` or the uniform buffer runs out.

    ``rates[i, j]`` holds (detach+, detach-, attach+, attach-) in state (i, j).
    Occupancy accumulates time spent per state. Returns the new state, time,
    uniforms consumed, events logged and an underflow flag.
    """
    used = 0
    n_logged = 0
    m = uniforms.shape[0]
    while used + 1 < m:
        r = rates[n_plus, n_minus]
        total = r[0] + r[1] + r[2] + r[3]
        if not total > 0.0:
            return n_plus, n_minus, t, used, n_logged, True
        tau = -np.log(1.0 - uniforms[used]) / total
        pick = uniforms[used + 1] * total
        used += 2
        if t + tau >= t_end:
            occupancy[n_plus, n_minus] += t_end - t
            return n_plus, n_minus, t_end, used, n_logged, False
        occupancy[n_plus, n_minus] += tau
        t += tau
        event = _choose(r, pick)
        if event == 0:
            n_plus -= 1
        elif event == 1:
            n_minus -= 1
        elif event == 2:
            n_plus += 1
        else:
            n_minus += 1
        if log_events:
            log[n_logged, 0] = t
            log[n_logged, 1] = n_plus
            log[n_logged, 2] = n_minus
            n_logged += 1
    return n_plus, n_minus, t, used, n_logged, False
