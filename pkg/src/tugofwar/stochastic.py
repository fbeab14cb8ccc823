"""Exact stochastic simulation of the finite-N attachment/detachment chain.

State (n+, n-) counts attached motors. Each team detaches at
n * k_off0 * exp(F_C / (n F_d)) with the cargo load F_C shared equally, and
attaches at k_on * (N - n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .model import cargo_force_discrete, regime_coeffs
from .params import Regime, TugOfWarConfig

GENERATOR = "numpy.random.PCG64"
CHUNK = 1 << 20


class MotorState(NamedTuple):
    n_plus: int
    n_minus: int


class Rates(NamedTuple):
    detach_plus: float
    detach_minus: float
    attach_plus: float
    attach_minus: float


@dataclass
class SimRecord:
    t_end: float
    initial: MotorState
    final: MotorState
    n_events: int
    occupancy: np.ndarray
    mean_fraction_plus: float
    mean_fraction_minus: float
    seed: int
    stream: tuple = ()
    generator: str = GENERATOR
    events: Optional[np.ndarray] = field(default=None, repr=False)

    def summary(self, include_occupancy: Optional[bool] = None) -> dict:
        """JSON-ready summary; occupancy is included for small state spaces by default."""
        if include_occupancy is None:
            include_occupancy = self.occupancy.size <= 4096
        doc = {
            "t_end": self.t_end,
            "initial": list(self.initial),
            "final": list(self.final),
            "n_events": self.n_events,
            "mean_fraction_plus": self.mean_fraction_plus,
            "mean_fraction_minus": self.mean_fraction_minus,
            "seed": self.seed,
            "stream": list(self.stream),
            "generator": self.generator,
        }
        if include_occupancy:
            doc["occupancy"] = self.occupancy.tolist()
        return doc


@dataclass
class EnsembleStats:
    run_means: np.ndarray          # shape (n_runs, 2): <n+>/N+, <n->/N-
    mean: np.ndarray
    variance: np.ndarray
    stderr: np.ndarray
    seed: int
    records: list = field(default_factory=list, repr=False)


def _totals(cfg: TugOfWarConfig) -> tuple[int, int]:
    if cfg.n_plus_total is None or cfg.n_minus_total is None:
        raise ValueError("stochastic simulation needs n_plus_total and n_minus_total")
    return cfg.n_plus_total, cfg.n_minus_total


def transition_rates(state: MotorState, cfg: TugOfWarConfig) -> Rates:
    n_plus, n_minus = state
    N_plus, N_minus = _totals(cfg)
    if not (0 <= n_plus <= N_plus and 0 <= n_minus <= N_minus):
        raise ValueError(f"state {state} outside [0, {N_plus}] x [0, {N_minus}]")
    p, m = cfg.plus, cfg.minus
    force = cargo_force_discrete(n_plus, n_minus, cfg) if n_plus + n_minus > 0 else 0.0
    eps_plus = p.k_off0 * n_plus * math.exp(force / (n_plus * p.F_d)) if n_plus else 0.0
    eps_minus = m.k_off0 * n_minus * math.exp(force / (n_minus * m.F_d)) if n_minus else 0.0
    return Rates(eps_plus, eps_minus, p.k_on * (N_plus - n_plus), m.k_on * (N_minus - n_minus))


def rate_table(cfg: TugOfWarConfig) -> np.ndarray:
    """All four rates for every state, shape (N+ + 1, N- + 1, 4).

    Uses the load-per-motor form F_C / n+ = n- / (a n+ + b n-), which has no
    0/0 when a team is empty.
    """
    N_plus, N_minus = _totals(cfg)
    p, m = cfg.plus, cfg.minus
    n_p, n_m = np.meshgrid(np.arange(N_plus + 1, dtype=float), np.arange(N_minus + 1, dtype=float), indexing="ij")
    cp, cm = regime_coeffs(cfg, Regime.PLUS), regime_coeffs(cfg, Regime.MINUS)
    plus_wins = n_p * p.F_s >= n_m * m.F_s
    a = np.where(plus_wins, cp.a, cm.a)
    b = np.where(plus_wins, cp.b, cm.b)
    d = a * n_p + b * n_m
    d[0, 0] = 1.0
    table = np.empty((N_plus + 1, N_minus + 1, 4))
    table[..., 0] = p.k_off0 * n_p * np.exp(n_m / (d * p.F_d))
    table[..., 1] = m.k_off0 * n_m * np.exp(n_p / (d * m.F_d))
    table[..., 2] = p.k_on * (N_plus - n_p)
    table[..., 3] = m.k_on * (N_minus - n_m)
    table[0, :, 0] = 0.0
    table[:, 0, 1] = 0.0
    return table


def derive_seeds(seed: int, n: int) -> list[np.random.SeedSequence]:
    """Independent child streams for ``n`` runs from one master seed."""
    return np.random.SeedSequence(seed).spawn(n)


def gillespie_run(cfg: TugOfWarConfig, t_end: float, seed: int | np.random.SeedSequence = 0,
                  initial: Optional[MotorState] = None, record_events: bool = False,
                  table: Optional[np.ndarray] = None) -> SimRecord:
    """Direct-method simulation up to ``t_end`` seconds.

    Averages are time-weighted over [0, t_end]. The default start is half of
    each team attached.
    """
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    N_plus, N_minus = _totals(cfg)
    if initial is None:
        initial = MotorState(N_plus // 2, N_minus // 2)
    initial = MotorState(int(initial[0]), int(initial[1]))
    if not (0 <= initial.n_plus <= N_plus and 0 <= initial.n_minus <= N_minus):
        raise ValueError(f"initial state {initial} out of bounds")
    seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.PCG64(seq))
    if table is None:
        table = rate_table(cfg)
    occupancy = np.zeros((N_plus + 1, N_minus + 1))
    log = np.empty((CHUNK // 2 if record_events else 1, 3))
    logs = []
    n_plus, n_minus = initial
    t = 0.0
    n_events = 0
    while t < t_end:
        uniforms = rng.random(CHUNK)
        n_plus, n_minus, t, used, n_logged, underflow = _kernels.gillespie_chunk(
            n_plus, n_minus, t, float(t_end), table, uniforms, occupancy, log, record_events)
        if underflow:
            raise FloatingPointError(f"total rate vanished in state ({n_plus}, {n_minus}) at t={t}")
        # every draw pair except a final overshoot is an event
        n_events += used // 2 - (1 if t >= t_end else 0)
        if record_events and n_logged:
            logs.append(log[:n_logged].copy())
    fractions = occupancy.sum(axis=1) @ np.arange(N_plus + 1) / t_end / N_plus, \
        occupancy.sum(axis=0) @ np.arange(N_minus + 1) / t_end / N_minus
    events = None
    if record_events:
        head = np.array([[0.0, initial.n_plus, initial.n_minus]])
        events = np.concatenate([head] + logs)
    return SimRecord(float(t_end), initial, MotorState(int(n_plus), int(n_minus)), n_events, occupancy,
                     float(fractions[0]), float(fractions[1]),
                     int(seq.entropy), tuple(seq.spawn_key), GENERATOR, events)


def ensemble_stats(cfg: TugOfWarConfig, t_end: float, n_runs: int, seed: int = 0,
                   initial: Optional[MotorState | Sequence[MotorState]] = None,
                   keep_records: bool = False) -> EnsembleStats:
    """Independent runs with seeds spawned from ``seed``; pooled mean, variance, standard error.

    ``initial`` may be one state for all runs or one per run.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    if initial is None or isinstance(initial[0], (int, np.integer)):
        starts = [initial] * n_runs
    else:
        starts = list(initial)
        if len(starts) != n_runs:
            raise ValueError("need one initial state per run")
    table = rate_table(cfg)
    records = [gillespie_run(cfg, t_end, s, start, table=table)
               for s, start in zip(derive_seeds(seed, n_runs), starts)]
    means = np.array([[r.mean_fraction_plus, r.mean_fraction_minus] for r in records])
    var = means.var(axis=0, ddof=1) if n_runs > 1 else np.zeros(2)
    return EnsembleStats(means, means.mean(axis=0), var, np.sqrt(var / n_runs), seed,
                         records if keep_records else [])
