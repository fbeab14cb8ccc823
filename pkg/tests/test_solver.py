import math

import numpy as np
import pytest

from tugofwar import reduction as red
from tugofwar import solver
from tugofwar.model import flow
from tugofwar.params import MotorParams, TugOfWarConfig, asymmetric_config, symmetric_config
from tugofwar.solver import Stability

from .helpers import dense_root_oracle, random_configs, stable_count_oracle

S = 1.0 / (1.0 + math.e)
RANDOM = random_configs(50)


@pytest.fixture(scope="module")
def random_states():
    return [(cfg, solver.classify_all(cfg)) for cfg in RANDOM]


def test_single_root_symmetric_vf10():
    cfg = symmetric_config(V_F=10.0)
    roots = solver.find_roots(cfg)
    oracle, _ = dense_root_oracle(cfg)
    assert len(roots) == len(oracle) == 1
    assert roots[0] == pytest.approx(1.0, abs=1e-12)


def test_symmetric_vf50_reciprocal_roots():
    cfg = symmetric_config(V_F=50.0)
    roots = solver.find_roots(cfg)
    oracle, _ = dense_root_oracle(cfg)
    assert len(roots) == len(oracle) == 5
    assert any(abs(t - 1.0) < 1e-12 for t in roots)
    for t, u in zip(roots, reversed(roots)):
        assert t * u == pytest.approx(1.0, rel=1e-8)


def test_roots_match_dense_oracle(random_states):
    for cfg, states in random_states[:20]:
        oracle, brackets = dense_root_oracle(cfg, n=200_000)
        assert len(states) == len(oracle)
        for s, (lo, hi) in zip(states, brackets):
            assert lo <= s.theta <= hi


def test_stable_count_matches_oracle(random_states):
    for cfg, states in random_states[:20]:
        assert solver._count_stable(states) == stable_count_oracle(cfg)


def test_root_residuals(random_states):
    for cfg, states in random_states:
        scale = max(abs(red.w_hat_eval(0.0, cfg)), abs(red.w_hat_limit(cfg)))
        for s in states:
            assert abs(red.h_eval(s.theta, cfg)) <= 1e-9 * max(1.0, s.theta)
            v = red.unmap_root_hat(s.theta, cfg)
            if v < 2.0:
                assert abs(red.w_hat_eval(v, cfg)) <= 1e-10 * scale


@pytest.mark.parametrize("F_s_minus", [1.9, 2.0, 2.5])
def test_tail_root_is_found(F_s_minus):
    # the last crossing lies far past the top of the grid in theta
    cfg = TugOfWarConfig(MotorParams(1, 1, 1, 1, 90, 10), MotorParams(1, 1, 1, F_s_minus, 10, 10), 1.0)
    roots = solver.find_roots(cfg)
    oracle, _ = dense_root_oracle(cfg)
    assert len(roots) == len(oracle)
    assert roots[-1] > 1e6
    assert abs(red.h_eval(roots[-1], cfg)) <= 1e-9 * roots[-1]
    assert red.h_prime_eval(roots[-1], cfg).effective() > 0


def test_fallback_is_warned():
    cfg = TugOfWarConfig(MotorParams(1, 1, 1, 1, 90, 10), MotorParams(1, 1, 1, 2.5, 10, 10), 1.0)
    with pytest.warns(solver.FallbackWarning):
        solver.find_roots(cfg)


def test_grid_points_precondition(sym50):
    with pytest.raises(ValueError):
        solver.find_roots(sym50, grid_points=10)
    with pytest.raises(ValueError):
        solver.find_roots(sym50, tol=0.0)


def test_curves_agree(random_states):
    for cfg, states in random_states:
        w_roots = solver.find_roots(cfg, curve="w")
        assert np.allclose(w_roots, [s.theta for s in states], rtol=1e-9, atol=1e-9)


def test_bisection_reports_bad_bracket():
    with pytest.raises(solver.RootFindingError):
        solver.bisect_theta(lambda t: 1.0 + t, 0.0, 1.0)


def test_steady_state_at_one():
    cfg = symmetric_config(V_F=10.0, n_total=1000)
    s = solver.steady_from_theta(1.0, cfg)
    assert s.y == pytest.approx(S, abs=1e-15) and s.z == pytest.approx(S, abs=1e-15)
    assert s.velocity == 0.0
    assert s.h_prime == pytest.approx(1.0, rel=1e-14)
    assert s.stability == Stability.STABLE
    assert s.force == pytest.approx(1000 * S * 1.0, rel=1e-12)


def test_steady_velocity_limit():
    cfg = asymmetric_config(V_F=30.0)
    assert solver.steady_velocity(1e12, cfg) == pytest.approx(cfg.plus.V_F, rel=1e-9)
    assert solver.steady_velocity(1e-12, cfg) == pytest.approx(-cfg.minus.V_F, rel=1e-9)


def test_steady_rejects_non_root(sym50):
    with pytest.raises(ValueError):
        solver.steady_from_theta(3.0, sym50)


def test_jacobian_examples():
    cfg = symmetric_config(V_F=10.0)
    jac = solver.jacobian_at(S, S, cfg)
    assert jac.determinant == pytest.approx(1 + math.e, rel=1e-13)
    assert jac.determinant * S == pytest.approx(1.0, rel=1e-13)
    assert jac.trace < 0 and jac.stable
    with pytest.raises(ValueError):
        solver.jacobian_at(0.5, 0.5, cfg)


def _fd_jacobian(y, z, cfg, step=1e-7):
    out = np.empty((2, 2))
    for j, (dy, dz) in enumerate(((step, 0.0), (0.0, step))):
        plus = flow(y + dy, z + dz, cfg)
        minus = flow(y - dy, z - dz, cfg)
        out[:, j] = (np.array(plus) - np.array(minus)) / (2 * step)
    return out


def test_closed_forms_match_partials(random_states):
    checked = 0
    for cfg, states in random_states:
        for s in states:
            if abs(s.theta - cfg.threshold) < 1e-6 or s.theta > 1e4:
                continue
            J = solver.flow_jacobian(s.y, s.z, cfg)
            assert np.allclose(J, _fd_jacobian(s.y, s.z, cfg), rtol=1e-6, atol=1e-6)
            jac = solver.jacobian_at(s.y, s.z, cfg)
            assert jac.trace == pytest.approx(np.trace(J), rel=1e-9, abs=1e-9)
            assert jac.determinant == pytest.approx(np.linalg.det(J), rel=1e-8, abs=1e-9)
            checked += 1
    assert checked > 50


def test_derivative_identity(random_states):
    for cfg, states in random_states:
        for s in states:
            jac = solver.jacobian_at(s.y, s.z, cfg)
            assert abs(s.h_prime - jac.determinant * s.z) <= 1e-8 * max(1.0, abs(s.h_prime))


def test_trace_negative_when_determinant_nonnegative(random_states):
    for cfg, states in random_states:
        for s in states:
            jac = solver.jacobian_at(s.y, s.z, cfg)
            if jac.determinant >= 0:
                assert jac.trace < 0


def test_reconstruction(random_states):
    for cfg, states in random_states:
        for s in states:
            assert 0 < s.y < 1 and 0 < s.z < 1
            f, g = flow(s.y, s.z, cfg)
            assert abs(f) + abs(g) <= 1e-10


def test_parity_and_extremal_stability(random_states):
    counts = set()
    for cfg, states in random_states:
        counts.add(len(states))
        assert len(states) % 2 == 1
        assert states[0].stability == states[-1].stability == Stability.STABLE
        signs = [1 if s.stability == Stability.STABLE else -1 for s in states]
        assert all(a != b for a, b in zip(signs, signs[1:]))
    assert {1, 3} <= counts


def test_classify_symmetric_vf50(sym50):
    states = solver.classify_all(sym50)
    assert [s.stability for s in states] == [Stability.STABLE, Stability.UNSTABLE] * 2 + [Stability.STABLE]


def test_degenerate_bifurcation_point():
    cfg = asymmetric_config(V_F=30.0)
    scan = solver.scan_parameter(cfg, "V_F", [34.0, 35.0])
    (bif,) = scan.bifurcations
    states = solver.classify_all(cfg.with_param("V_F", bif.value))
    assert len(states) % 2 == 0
    assert sum(s.stability == Stability.MARGINAL for s in states) == 1


def test_scan_detects_bifurcation():
    cfg = symmetric_config()
    scan = solver.scan_parameter(cfg, "V_F", np.linspace(10, 50, 9))
    counts = scan.stable_counts()
    assert counts[0] == 1 and counts[-1] == 3
    (bif,) = scan.bifurcations
    assert 25 <= bif.lower < bif.value < bif.upper <= 30
    assert bif.upper - bif.lower == 5
    assert abs(bif.h_prime) <= 1e-4


def test_scan_without_change():
    cfg = symmetric_config(V_F=10.0)
    scan = solver.scan_parameter(cfg, "k_on", np.linspace(0.5, 2.0, 6))
    assert scan.bifurcations == [] and all(e is None for e in scan.errors)


def test_scan_requires_increasing_grid(sym50):
    with pytest.raises(ValueError):
        solver.scan_parameter(sym50, "V_F", [3.0, 2.0])
    with pytest.raises(KeyError):
        solver.scan_parameter(sym50, "colour", [1.0, 2.0])
