"""Sweep the fractional order of a damped oscillator and record how the end state, action and residual move.

    python3 scripts/alpha_sweep.py --out results/alpha_sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from fraccalc import falva as fv


@dataclass
class SweepConfig:
    omega: float = 1.0
    horizon: float = 10.0
    steps: int = 8192
    epsilon: float = 0.01
    q0: float = 1.0
    v0: float = 0.0
    alphas: tuple[float, ...] = tuple(np.round(np.linspace(0.1, 1.0, 19), 3))


def sweep(cfg: SweepConfig):
    model = fv.harmonic_oscillator(cfg.omega)
    for alpha in cfg.alphas:
        p = fv.FalvaProblem(model, float(alpha), 0.0, cfg.horizon, [cfg.q0], [cfg.v0],
                            epsilon=cfg.epsilon, steps=cfg.steps)
        tr = fv.simulate(p)
        energy = 0.5 * tr.vs[:, 0] ** 2 + 0.5 * cfg.omega**2 * tr.qs[:, 0] ** 2
        yield {
            "alpha": float(alpha),
            "q_end": tr.qs[-1, 0],
            "v_end": tr.vs[-1, 0],
            "energy_end": energy[-1],
            "action": fv.falva_action(p, tr),
            "max_residual": float(np.max(np.abs(fv.el_residuals(p, tr)))),
        }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path)
    ap.add_argument("--steps", type=int, default=SweepConfig.steps)
    args = ap.parse_args(argv)
    cfg = SweepConfig(steps=args.steps)

    rows = list(sweep(cfg))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
    fh = args.out.open("w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    for r in rows:
        w.writerow({k: f"{v:.10g}" for k, v in r.items()})
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
