#!/usr/bin/env python3
"""Check the modelling error of the one-equation reduction: the reconstructed
first-order system residuals should shrink like epsilon^2."""

import argparse
import math

from bbm5.coefficients import reference_parameters
from bbm5.derivation import epsilon_sweep, write_sweep_csv
from bbm5.spectral import Grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--length", type=float, default=16.0 * math.pi)
    ap.add_argument("--dt", type=float, default=2e-3)
    ap.add_argument("--t-final", type=float, default=1.0)
    ap.add_argument("--epsilons", type=float, nargs="+",
                    default=[0.1, 0.05, 0.025, 0.0125])
    ap.add_argument("--out", default=None, help="optional CSV path")
    args = ap.parse_args()

    grid = Grid(n=args.n, length=args.length)
    sweep = epsilon_sweep(
        grid,
        reference_parameters(),
        epsilons=tuple(args.epsilons),
        t_final=args.t_final,
        dt=args.dt,
    )
    for row in sweep["rows"]:
        print(f"eps={row['eps']:.4g}  r1={row['r1_L2']:.4e}  r2={row['r2_L2']:.4e}")
    print(f"slope r1: {sweep['slope_r1_L2']:.3f}   slope r2: {sweep['slope_r2_L2']:.3f}")
    if args.out:
        write_sweep_csv(sweep, args.out)


if __name__ == "__main__":
    main()
