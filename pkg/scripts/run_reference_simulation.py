#!/usr/bin/env python3
"""Evolve a sech^2 pulse under the reference coefficient set and report
energy conservation and Sobolev norm history."""

import argparse
import math

from bbm5 import REFERENCE_COEFFICIENTS, RhsSpec, StepperConfig, run_simulation
from bbm5.evolution import sech_squared
from bbm5.spectral import Grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--length", type=float, default=16.0 * math.pi)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--T", type=float, default=2.0)
    ap.add_argument("--amplitude", type=float, default=0.5)
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args()

    grid = Grid(n=args.n, length=args.length)
    eta0 = sech_squared(grid, args.amplitude, 1.0)
    spec = RhsSpec(REFERENCE_COEFFICIENTS)
    cfg = StepperConfig(dt=args.dt)
    report = run_simulation(eta0, spec, cfg, args.T, record_every=10)
    if args.out:
        report.write_csv(args.out)
    e0, e1 = report.energy[0], report.energy[-1]
    print(f"steps: {int(round(args.T / args.dt))}, recorded: {len(report.times)}")
    print(f"E(0) = {e0:.12e}   E(T) = {e1:.12e}")
    print(f"relative drift: {abs(e1 - e0) / e0:.3e}")
    print(f"zero mode span: {report.zero_mode.max() - report.zero_mode.min():.3e}")
    for s, vals in sorted(report.hs_norms.items()):
        print(f"H^{s:g}: {vals[0]:.6e} -> {vals[-1]:.6e}")


if __name__ == "__main__":
    main()
