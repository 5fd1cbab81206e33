"""Observed convergence orders of every discrete operator on power-law test functions.

    python3 scripts/convergence_study.py --out results/convergence.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path

from fraccalc.convergence import convergence_table
from fraccalc.funcspace import polynomial, power


@dataclass
class StudyConfig:
    alphas: tuple[float, ...] = (0.25, 0.5, 0.75, 1.5)
    n_start: int = 65
    n_stop: int = 2049
    x: float = 1.0
    functions: dict = field(default_factory=lambda: {
        "x^2": power(2),
        "x^3": power(3),
        "x^2.5": power(2.5),
        "1+x+x^2": polynomial([1, 1, 1]),
    })
    methods: tuple[str, ...] = ("integral", "rl", "caputo", "gl")


def run(cfg: StudyConfig):
    for method in cfg.methods:
        for name, f in cfg.functions.items():
            for alpha in cfg.alphas:
                if method == "caputo" and name == "x^2.5" and alpha > 1:
                    continue
                for row in convergence_table(method, f, alpha, cfg.x, cfg.x, cfg.n_start, cfg.n_stop):
                    yield method, name, alpha, row


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, help="CSV destination (default: stdout)")
    ap.add_argument("--n-stop", type=int, default=StudyConfig.n_stop)
    args = ap.parse_args(argv)
    cfg = StudyConfig(n_stop=args.n_stop)

    fh = args.out.open("w", newline="") if args.out else sys.stdout
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
    w = csv.writer(fh)
    w.writerow(["method", "function", "alpha", "n_points", "h", "abs_error", "observed_order"])
    last = {}
    for method, name, alpha, r in run(cfg):
        w.writerow([method, name, alpha, r.n_points, f"{r.h:.6g}", f"{r.abs_error:.6e}", f"{r.observed_order:.3f}"])
        last[(method, name, alpha)] = r.observed_order
    if args.out:
        fh.close()
        for (method, name, alpha), order in last.items():
            print(f"{method:9s} {name:8s} alpha={alpha:<5g} final order {order:.2f}")


if __name__ == "__main__":
    main()
