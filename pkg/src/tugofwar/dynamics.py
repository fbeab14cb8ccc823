"""Fixed-step RK4 integration of the mean-field flow."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import qmc

from . import _kernels
from .params import TugOfWarConfig
from .solver import Stability, StationaryState

CONVERGED_FLOW = 1e-10
STAGE_BOX = (-0.1, 1.1)


class StepRejected(RuntimeError):
    """An RK stage left the padded unit square; dt is too large."""


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    z: np.ndarray
    converged: bool
    converged_to: Optional[int] = None

    @property
    def terminal(self) -> tuple[float, float]:
        return float(self.y[-1]), float(self.z[-1])


@dataclass
class BasinHistogram:
    counts: dict[int, int]
    unstable: int
    not_converged: int
    seed: int
    n_starts: int
    sequence: str = "scrambled Halton (scipy.stats.qmc)"


def _check_inputs(y, z, t_end, dt):
    if dt <= 0 or t_end < dt:
        raise ValueError("need dt > 0 and t_end >= dt")
    if np.any((y <= 0) | (y > 1) | (z <= 0) | (z > 1)):
        raise ValueError("starts must lie in (0, 1]^2")


def integrate(y0: float, z0: float, cfg: TugOfWarConfig, t_end: float = 200.0, dt: float = 1e-3,
              stride: int = 100, stop_on_convergence: bool = True,
              states: Optional[Sequence[StationaryState]] = None) -> Trajectory:
    """Integrate one trajectory with classical RK4, keeping every ``stride``-th step.

    The terminal state is always sampled. Integration stops early once
    |f| + |g| < 1e-10 unless ``stop_on_convergence`` is off. If ``states`` is
    given, a converged terminal state is matched to a stationary state.
    """
    _check_inputs(np.array([y0]), np.array([z0]), t_end, dt)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    n_steps = int(round(t_end / dt))
    stop = CONVERGED_FLOW if stop_on_convergence else 0.0
    out, k, _, status = _kernels.integrate_one(
        float(y0), float(z0), _kernels.pack_flow_params(cfg), n_steps, float(dt), stride, stop, *STAGE_BOX)
    if status != _kernels.OK:
        raise StepRejected(f"RK stage left {STAGE_BOX} with dt={dt}")
    out = out[:k]
    f, g = _kernels.flow(out[-1, 1], out[-1, 2], _kernels.pack_flow_params(cfg))
    traj = Trajectory(out[:, 0].copy(), out[:, 1].copy(), out[:, 2].copy(),
                      bool(abs(f) + abs(g) < CONVERGED_FLOW))
    if traj.converged and states is not None:
        traj.converged_to = match_state(traj.terminal, states)
    return traj


def integrate_many(y0, z0, cfg: TugOfWarConfig, t_end: float = 200.0, dt: float = 1e-3):
    """Terminal states of a batch of starts; each stops once converged.

    Returns (y, z, converged mask).
    """
    y0 = np.ascontiguousarray(y0, dtype=float)
    z0 = np.ascontiguousarray(z0, dtype=float)
    _check_inputs(y0, z0, t_end, dt)
    y, z, status = _kernels.integrate_batch(
        y0, z0, _kernels.pack_flow_params(cfg), int(round(t_end / dt)), float(dt), CONVERGED_FLOW, *STAGE_BOX)
    if np.any(status != _kernels.OK):
        raise StepRejected(f"RK stage left {STAGE_BOX} with dt={dt}")
    P = _kernels.pack_flow_params(cfg)
    conv = np.array([abs(f) + abs(g) < CONVERGED_FLOW for f, g in (_kernels.flow(a, b, P) for a, b in zip(y, z))],
                    dtype=bool)
    return y, z, conv


def match_state(point: tuple[float, float], states: Sequence[StationaryState], tol: float = 1e-6) -> Optional[int]:
    """Index of the stationary state within ``tol`` (max-norm) of ``point``."""
    y, z = point
    best, best_dist = None, tol
    for i, s in enumerate(states):
        dist = max(abs(s.y - y), abs(s.z - z))
        if dist <= best_dist:
            best, best_dist = i, dist
    return best


def quasi_random_starts(n_starts: int, seed: int) -> np.ndarray:
    """Scrambled Halton points in the open unit square."""
    pts = qmc.Halton(d=2, scramble=True, seed=seed).random(n_starts)
    return np.clip(pts, 1e-9, 1.0)


def basin_sample(cfg: TugOfWarConfig, states: Sequence[StationaryState], n_starts: int = 100,
                 seed: int = 0, t_end: float = 200.0, dt: float = 1e-3) -> BasinHistogram:
    """Histogram of which stationary state quasi-random starts converge to.

    ``counts`` is keyed by index into ``states`` and covers stable states only
    (zero counts included). Converged starts that sit on an unstable state
    are counted in ``unstable``.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    pts = quasi_random_starts(n_starts, seed)
    y, z, ok = integrate_many(pts[:, 0], pts[:, 1], cfg, t_end, dt)
    counts = {i: 0 for i, s in enumerate(states) if s.stability == Stability.STABLE}
    unstable = not_converged = 0
    for yi, zi, conv in zip(y, z, ok):
        idx = match_state((yi, zi), states) if conv else None
        if idx is None:
            not_converged += 1
        elif states[idx].stability == Stability.STABLE:
            counts[idx] += 1
        else:
            unstable += 1
    return BasinHistogram(counts, unstable, not_converged, seed, n_starts)
