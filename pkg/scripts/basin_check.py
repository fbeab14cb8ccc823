"""Integrate the mean-field flow from quasi-random starts and tally where they end up."""
import argparse
from pathlib import Path

from tugofwar.dynamics import basin_sample
from tugofwar.params import load_config
from tugofwar.solver import classify_all

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs" / "families"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--starts", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--t-end", type=float, default=200.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    args = ap.parse_args()

    for path in sorted(CONFIG_DIR.glob("*.json")):
        cfg = load_config(path)
        states = classify_all(cfg)
        hist = basin_sample(cfg, states, args.starts, args.seed, args.t_end, args.dt)
        shares = "  ".join(f"({states[i].y:.4f}, {states[i].z:.4f}): {n}" for i, n in hist.counts.items())
        print(f"{path.stem:18s} {shares}  unstable={hist.unstable}  not converged={hist.not_converged}")


if __name__ == "__main__":
    main()
