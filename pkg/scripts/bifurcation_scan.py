"""Sweep V_F (both motors) over [10, 50] for both example families and report bifurcations."""
import argparse
from pathlib import Path

import numpy as np

from tugofwar import io as tio
from tugofwar.params import asymmetric_config, symmetric_config
from tugofwar.solver import classify_all, scan_parameter


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", type=Path, default=Path("scan_out"))
    ap.add_argument("--steps", type=int, default=41)
    args = ap.parse_args()

    grid = np.linspace(10.0, 50.0, args.steps)
    for name, cfg in (("symmetric", symmetric_config()), ("asymmetric", asymmetric_config())):
        result = scan_parameter(cfg, "V_F", grid)
        tio.emit(tio.scan_csv(result), args.out_dir / f"{name}_vf.csv")
        tio.emit(tio.scan_json(result), args.out_dir / f"{name}_vf.json")
        print(f"{name}: stable counts {result.stable_counts()}")
        for b in result.bifurcations:
            states = classify_all(cfg.with_param("V_F", b.value))
            tangency = min(abs(s.h_prime) for s in states)
            print(f"  V_F in [{b.lower:g}, {b.upper:g}] -> {b.value:.10f}"
                  f"  stable {b.stable_before}->{b.stable_after}  min|h'| = {tangency:.2e}")


if __name__ == "__main__":
    main()
