"""Curve data (w, w_hat) and stationary states for the six example configurations."""
import argparse
from pathlib import Path

import numpy as np

from tugofwar import io as tio
from tugofwar import reduction as red
from tugofwar.params import load_config
from tugofwar.solver import classify_all

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs" / "families"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("curves_out"))
    ap.add_argument("--grid", type=int, default=2000)
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    xs = np.linspace(0.0, 2.0 - 1e-6, args.grid)
    for path in sorted(CONFIG_DIR.glob("*.json")):
        cfg = load_config(path)
        w = [red.w_eval(x, cfg) for x in xs]
        w_hat = [red.w_hat_eval(x, cfg) for x in xs]
        tio.emit(tio.csv_text(["vartheta", "w", "w_hat"], zip(xs, w, w_hat)), args.out_dir / f"{path.stem}_curve.csv")
        states = classify_all(cfg)
        tio.emit(tio.states_csv(states), args.out_dir / f"{path.stem}_roots.csv")
        labels = ", ".join(f"{s.theta:.6g} ({s.stability})" for s in states)
        print(f"{path.stem:18s} w(0)={w[0]:+.4f}  w(2-)={w[-1]:+.4f}  roots: {labels}")


if __name__ == "__main__":
    main()
