"""Independent oracles and parameter generators shared by the tests."""
import math

import numpy as np

from tugofwar.params import MotorParams, TugOfWarConfig


def random_configs(n, seed=2010):
    """Positive parameter sets: alternately broad draws and jittered copies of the two example families.

    Broad draws keep F_s / F_d <= 2 and V_F / V_B <= 7.5, so every load
    exponent stays below ~17. The family-like draws (fast forward, slow
    backward motors) are often multistable.
    """
    rng = np.random.default_rng(seed)

    def logu(lo, hi):
        return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))

    out = []
    for k in range(n):
        motors = []
        if k % 2 == 0:
            for _ in range(2):
                F_d = logu(0.5, 3.0)
                motors.append(MotorParams(
                    k_on=logu(0.2, 5.0), k_off0=logu(0.1, 5.0), F_d=F_d, F_s=F_d * logu(0.5, 2.0),
                    V_F=logu(5.0, 60.0), V_B=logu(8.0, 30.0)))
            nu = logu(0.3, 3.0)
        else:
            for _ in range(2):
                motors.append(MotorParams(
                    k_on=logu(0.7, 1.4), k_off0=logu(0.7, 1.4), F_d=logu(0.8, 1.3), F_s=logu(0.8, 1.3),
                    V_F=logu(25.0, 60.0), V_B=logu(8.0, 12.0)))
            nu = logu(0.7, 1.4)
        out.append(TugOfWarConfig(motors[0], motors[1], nu=nu))
    return out


def h_dense(theta, cfg):
    """h on an array of theta, written straight from the flow equations on the ray y = theta z."""
    p, m, nu = cfg.plus, cfg.minus, cfg.nu
    theta = np.asarray(theta, dtype=float)
    plus = theta * nu * p.F_s >= m.F_s
    a = np.where(plus, m.V_B / (m.F_s * (p.V_F + m.V_B)), m.V_F / (m.F_s * (p.V_B + m.V_F)))
    b = np.where(plus, p.V_F / (p.F_s * (p.V_F + m.V_B)), p.V_B / (p.F_s * (p.V_B + m.V_F)))
    # off-rates at (y, z) = (theta, 1): homogeneous of degree zero in (y, z)
    d = a * nu * theta + b
    koff_p = p.k_off0 * np.exp(1.0 / (d * p.F_d))
    koff_m = m.k_off0 * np.exp(nu * theta / (d * m.F_d))
    # eliminate y between y (k+on + k+off) = k+on and y (k-on + k-off) = theta k-on
    return theta * m.k_on * (p.k_on + koff_p) - p.k_on * (m.k_on + koff_m)


def dense_root_oracle(cfg, n=10**6):
    """Roots of h located by sign changes of a dense grid in a compactified variable.

    Returns (theta estimates, brackets). Uses s in [0, 1): theta = s / (1 - s).
    """
    s = np.linspace(0.0, 1.0, n, endpoint=False)
    theta = np.concatenate([s / (1.0 - s), np.geomspace(n * 1.01, 1e18, 2000)])
    vals = h_dense(theta, cfg)
    sgn = np.sign(vals)
    exact = theta[sgn == 0]
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    lo, hi = theta[idx], theta[idx + 1]
    f_lo, f_hi = vals[idx], vals[idx + 1]
    est = lo - f_lo * (hi - lo) / (f_hi - f_lo)
    roots = np.sort(np.concatenate([exact, est]))
    brackets = sorted(list(zip(lo, hi)) + [(t, t) for t in exact])
    return roots, brackets


def stable_count_oracle(cfg, n=200_000):
    """Upward crossings of h on a dense grid (each is a stable stationary state)."""
    s = np.linspace(0.0, 1.0, n, endpoint=False)
    theta = np.concatenate([s / (1.0 - s), np.geomspace(n * 1.01, 1e18, 2000)])
    vals = h_dense(theta, cfg)
    # exact zeros on the grid are skipped so a crossing through one still counts
    vals = vals[vals != 0]
    return int(np.sum((vals[:-1] < 0) & (vals[1:] > 0)))


def central_difference(fn, x, step=1e-6):
    return (fn(x + step) - fn(x - step)) / (2.0 * step)


def master_equation_stationary(cfg):
    """Stationary law of the (n+, n-) chain by a null-space solve of the generator.

    Rates are rebuilt here from the single-motor laws: load per motor from
    velocity matching, then n k_off0 exp(load / F_d) and k_on (N - n).
    """
    N_p, N_m = cfg.n_plus_total, cfg.n_minus_total
    p, m = cfg.plus, cfg.minus
    states = [(i, j) for i in range(N_p + 1) for j in range(N_m + 1)]
    index = {s: k for k, s in enumerate(states)}

    def load(i, j):
        if i == 0 or j == 0:
            return 0.0
        # solve V_C from the two force-velocity branches by bisection on F
        lo, hi = 0.0, (i * p.F_s + j * m.F_s) * 4.0

        def mismatch(F):
            fp, fm = F / i, F / j
            vp = p.V_F * (1 - fp / p.F_s) if fp <= p.F_s else p.V_B * (1 - fp / p.F_s)
            vm = m.V_F * (1 - fm / m.F_s) if fm <= m.F_s else m.V_B * (1 - fm / m.F_s)
            return vp + vm  # plus velocity minus (-minus velocity)

        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mismatch(mid) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    Q = np.zeros((len(states), len(states)))
    for (i, j), k in index.items():
        F = load(i, j)
        moves = []
        if i > 0:
            moves.append(((i - 1, j), p.k_off0 * i * math.exp(F / (i * p.F_d))))
        if j > 0:
            moves.append(((i, j - 1), m.k_off0 * j * math.exp(F / (j * m.F_d))))
        if i < N_p:
            moves.append(((i + 1, j), p.k_on * (N_p - i)))
        if j < N_m:
            moves.append(((i, j + 1), m.k_on * (N_m - j)))
        for target, rate in moves:
            Q[k, index[target]] += rate
            Q[k, k] -= rate
    A = np.vstack([Q.T, np.ones(len(states))])
    rhs = np.zeros(len(states) + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    table = np.zeros((N_p + 1, N_m + 1))
    for (i, j), k in index.items():
        table[i, j] = pi[k]
    return table
