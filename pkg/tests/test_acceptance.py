"""End-to-end acceptance checks, one test per criterion."""
import math

import numpy as np
import pytest

from tugofwar import reduction as red
from tugofwar import solver
from tugofwar.dynamics import basin_sample
from tugofwar.params import MotorParams, TugOfWarConfig, asymmetric_config, symmetric_config
from tugofwar.solver import Stability
from tugofwar.stochastic import gillespie_run

from .acceptance_log import criterion
from .helpers import dense_root_oracle, master_equation_stationary, random_configs, stable_count_oracle
from .test_dynamics import rk4_order

S = 1.0 / (1.0 + math.e)
FAMILIES = [symmetric_config(V_F=v) for v in (10.0, 30.0, 50.0)] + [asymmetric_config(V_F=v) for v in (20.0, 30.0, 40.0)]


@pytest.fixture(scope="module")
def randomized():
    return random_configs(50)


def test_criterion_01_boundary_values():
    with criterion(1, "boundary values of w", budget=1.0):
        for cfg in FAMILIES:
            p, m = cfg.plus, cfg.minus
            left = -p.k_on * (m.k_on + m.k_off0)
            right = m.k_on * (p.k_on + p.k_off0)
            assert red.w_eval(0.0, cfg) == pytest.approx(left, rel=1e-15)
            assert abs(red.w_eval(2 - 1e-9, cfg) - right) <= 1e-6 * abs(right)
        for cfg in FAMILIES[:3]:
            assert red.w_eval(0.0, cfg) == -2.0
            assert red.w_eval(2 - 1e-9, cfg) == pytest.approx(2.0, rel=1e-6)


def test_criterion_02_derivative_identity(randomized):
    with criterion(2, "h'(theta*) = det(J) z* at every root", budget=10.0):
        checked = 0
        for cfg in randomized:
            for s in solver.classify_all(cfg):
                det = solver.jacobian_at(s.y, s.z, cfg).determinant
                assert abs(s.h_prime - det * s.z) <= 1e-8 * max(1.0, abs(s.h_prime)), (cfg, s)
                checked += 1
        assert checked > 50


def _sign(x):
    return (x > 0) - (x < 0)


def test_criterion_03_stability_equivalence(randomized):
    with criterion(3, "h', det(J) and w' stability labels agree"):
        for cfg in randomized:
            for theta in solver.find_roots(cfg):
                slope = red.h_prime_eval(theta, cfg)
                if abs(slope.effective()) <= 1e-9:
                    continue
                label_h = slope.sign(1e-9)
                s = solver.steady_from_theta(theta, cfg)
                label_det = _sign(solver.jacobian_at(s.y, s.z, cfg).determinant)
                label_w = red.w_prime_eval(red.unmap_root(theta), cfg).sign(0.0)
                assert label_h == label_det == label_w != 0, (cfg, theta)
                if red.hat_usable(cfg):
                    assert red.w_hat_prime_eval(red.unmap_root_hat(theta, cfg), cfg).sign(0.0) == label_h


def _symmetric_family():
    rng = np.random.default_rng(4)
    motors = [MotorParams(*rng.uniform([0.2, 0.2, 0.5, 0.5, 2, 2], [5, 5, 3, 3, 60, 30])) for _ in range(20)]
    return FAMILIES[:3] + [TugOfWarConfig(mp, mp, 1.0) for mp in motors]


def test_criterion_04_reflection():
    with criterion(4, "reflection identity and reciprocal root sets"):
        thetas = np.geomspace(1e-3, 1e3, 1000)
        n_multi = 0
        for cfg in _symmetric_family():
            h = np.array([red.h_eval(t, cfg) for t in thetas])
            mirrored = np.array([t * red.h_eval(1 / t, cfg) for t in thetas])
            assert np.max(np.abs(mirrored + h)) <= 1e-10 * np.max(np.abs(h))
            roots = solver.find_roots(cfg)
            n_multi += len(roots) > 1
            for t, u in zip(roots, reversed(roots)):
                assert abs(1 / t - u) <= 1e-8 * max(1.0, u)
        assert n_multi >= 2


def test_criterion_05_symmetric_vf10():
    with criterion(5, "symmetric V_F = 10 has the single stable root theta* = 1"):
        cfg = symmetric_config(V_F=10.0)
        oracle, brackets = dense_root_oracle(cfg, n=10**6)
        assert len(oracle) == 1 and brackets[0][0] <= 1.0 <= brackets[0][1]
        (s,) = solver.classify_all(cfg)
        assert abs(s.theta - 1.0) <= 1e-10
        assert abs(s.y - S) <= 1e-10 and abs(s.z - S) <= 1e-10
        assert s.stability == Stability.STABLE and s.velocity == 0.0


def test_criterion_06_parity_and_extremes(randomized):
    with criterion(6, "odd root counts, extremal roots with h' > 0"):
        for cfg in randomized:
            states = solver.classify_all(cfg)
            if not any(s.stability == Stability.MARGINAL for s in states):
                assert len(states) % 2 == 1
            assert states[0].h_prime > 0 and states[-1].h_prime > 0


def test_criterion_07_ode_consistency():
    with criterion(7, "RK4 trajectories end on stable states; order exponent", budget=60.0):
        for cfg in FAMILIES:
            states = solver.classify_all(cfg)
            hist = basin_sample(cfg, states, n_starts=100, seed=0)
            assert sum(hist.counts.values()) == 100, hist
            assert hist.unstable <= 5
        exps = rk4_order(symmetric_config(V_F=10.0))
        assert np.all((3.5 <= exps) & (exps <= 4.5)), exps


def test_criterion_08_stochastic_consistency():
    with criterion(8, "Gillespie matches the master equation and the mean field", budget=120.0):
        small = symmetric_config(V_F=10.0, n_total=1)
        exact = master_equation_stationary(small)
        rec = gillespie_run(small, 1e5, seed=0)
        tv = 0.5 * np.abs(rec.occupancy / rec.t_end - exact).sum()
        assert tv <= 0.01, tv
        big = symmetric_config(V_F=10.0, n_total=1000)
        rec = gillespie_run(big, 1e4, seed=0)
        assert abs(rec.mean_fraction_plus - S) <= 0.02
        assert abs(rec.mean_fraction_minus - S) <= 0.02


def test_criterion_09_bifurcation_scan():
    with criterion(9, "V_F scan finds every stable-count change, tangency at refined values", budget=60.0):
        cfg = symmetric_config()
        grid = np.linspace(10.0, 50.0, 41)
        scan = solver.scan_parameter(cfg, "V_F", grid)
        oracle = [stable_count_oracle(cfg.with_param("V_F", v)) for v in grid]
        assert scan.stable_counts() == oracle
        changes = [(a, b) for a, b, ca, cb in zip(grid, grid[1:], oracle, oracle[1:]) if ca != cb]
        assert changes and oracle[0] != oracle[-1]
        found = {(b.lower, b.upper) for b in scan.bifurcations}
        assert set(changes) <= found
        for b in scan.bifurcations:
            states = solver.classify_all(cfg.with_param("V_F", b.value))
            assert min(abs(s.h_prime) for s in states) <= 1e-4


def test_criterion_10_w_and_w_hat_agree(randomized):
    with criterion(10, "root sets from w and w_hat agree"):
        for cfg in randomized:
            a = solver.find_roots(cfg, curve="w")
            b = solver.find_roots(cfg, curve="what")
            assert len(a) == len(b)
            assert max(abs(x - y) for x, y in zip(a, b)) <= 1e-9
