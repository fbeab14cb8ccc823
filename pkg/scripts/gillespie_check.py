"""Finite-N chain against the master equation (N = 1) and the mean field (N = 1000)."""
import argparse
import math

import numpy as np

from tugofwar.params import symmetric_config
from tugofwar.solver import classify_all
from tugofwar.stochastic import MotorState, ensemble_stats, gillespie_run, rate_table


def stationary_law(cfg):
    """Null vector of the generator built from the rate table."""
    table = rate_table(cfg)
    n_p, n_m = table.shape[:2]
    index = lambda i, j: i * n_m + j
    Q = np.zeros((n_p * n_m, n_p * n_m))
    for i in range(n_p):
        for j in range(n_m):
            k = index(i, j)
            for (di, dj), rate in zip(((-1, 0), (0, -1), (1, 0), (0, 1)), table[i, j]):
                if rate > 0:
                    Q[k, index(i + di, j + dj)] += rate
                    Q[k, k] -= rate
    A = np.vstack([Q.T, np.ones(len(Q))])
    b = np.zeros(len(Q) + 1)
    b[-1] = 1.0
    return np.linalg.lstsq(A, b, rcond=None)[0].reshape(n_p, n_m)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--runs", type=int, default=8)
    args = ap.parse_args()

    small = symmetric_config(V_F=10.0, n_total=1)
    rec = gillespie_run(small, 1e5, seed=args.seed)
    tv = 0.5 * np.abs(rec.occupancy / rec.t_end - stationary_law(small)).sum()
    print(f"N=1, t_end=1e5: total variation to the exact law = {tv:.4f}")

    big = symmetric_config(V_F=10.0, n_total=1000)
    stats = ensemble_stats(big, 1e4, args.runs, seed=args.seed)
    target = 1 / (1 + math.e)
    print(f"N=1000, t_end=1e4, {args.runs} runs: mean fractions {stats.mean.round(5).tolist()}"
          f" +- {stats.stderr.round(5).tolist()}  (mean field {target:.5f})")

    multi = symmetric_config(V_F=50.0, n_total=50)
    stable = [s for s in classify_all(multi) if s.stability == "Stable"]
    starts = [MotorState(round(s.y * 50), round(s.z * 50)) for s in stable] * 4
    stats = ensemble_stats(multi, 0.5, len(starts), seed=args.seed, initial=starts)
    print("N=50, symmetric V_F=50, short runs from each stable state:")
    for s, means in zip(stable * 4, stats.run_means):
        print(f"  start near ({s.y:.3f}, {s.z:.3f}) -> ({means[0]:.3f}, {means[1]:.3f})")


if __name__ == "__main__":
    main()
