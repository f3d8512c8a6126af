#!/usr/bin/env python3
"""Intrinsic energy and boosted phase speed across a range of boost velocities.

    python3 scripts/boost_sweep.py --speed 0.8 --betas 0 0.2 0.4 0.6 0.8 0.95
"""

import argparse

from matterwave.model import make_constants, make_electron
from matterwave.relativity import boost_sweep, boost_wave_equation, frame_quantities, make_boost


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--speed", type=float, default=0.8, help="electron speed along x")
    ap.add_argument("--rho0", type=float, default=1.0)
    ap.add_argument("--betas", type=float, nargs="+", default=[i / 10 for i in range(10)] + [0.99])
    ap.add_argument("--density-factor", type=float, default=None,
                    help="rho' = a*rho; defaults to gamma")
    args = ap.parse_args(argv)

    c = make_constants()
    spec = make_electron(c, args.rho0, (args.speed, 0.0, 0.0))
    rows = boost_sweep(frame_quantities(spec), c, args.betas, args.density_factor)
    print(f"{'beta':>6}{'gamma':>10}{'phi0':>11}{'V_P':>11}{'E0':>11}{'dE0/E0':>10}{'u_x':>10}{'wave res':>11}")
    for row in rows:
        b = row.boost
        try:
            res = boost_wave_equation(spec, make_boost(c, b.V), density_factor=args.density_factor).max_residual
            res = f"{res:.1e}"
        except ValueError:  # at rest in the boosted frame
            res = "at rest"
        a = row.after
        print(f"{b.beta:>6.2f}{b.gamma:>10.4f}{a.phi0:>11.4e}{a.V_P:>11.4e}{a.E0:>11.4e}"
              f"{row.E0_relative_change:>10.1e}{a.u_x:>10.4f}{res:>11}")


if __name__ == "__main__":
    main()
