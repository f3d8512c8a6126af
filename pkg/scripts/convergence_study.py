#!/usr/bin/env python3
"""Finite-difference residuals of every suite identity over successive grid halvings.

Prints one row per identity and spacing with the observed order. Example:

    python3 scripts/convergence_study.py --kind electron --speed 0.6 --levels 3
"""

import argparse

import numpy as np

from matterwave import diffops
from matterwave import maxwell_verify as mv
from matterwave.fields import GridGeometry, default_geometry
from matterwave.model import make_constants, make_electron, make_photon


def build_spec(args):
    c = make_constants()
    d = np.asarray(args.direction, dtype=float)
    d /= np.linalg.norm(d)
    if args.kind == "electron":
        return make_electron(c, args.rho0, tuple(args.speed * d))
    return make_photon(c, args.rho0, tuple(d), args.omega)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kind", choices=("electron", "photon"), default="electron")
    ap.add_argument("--rho0", type=float, default=1.0)
    ap.add_argument("--speed", type=float, default=0.5)
    ap.add_argument("--omega", type=float, default=1.0)
    ap.add_argument("--direction", type=float, nargs=3, default=(1.0, 0.4, 0.2))
    ap.add_argument("--order", type=int, choices=(2, 4), default=2)
    ap.add_argument("--levels", type=int, default=3, help="number of h -> h/2 steps")
    ap.add_argument("--ppw", type=float, default=8.0, help="points per wavelength on the coarsest grid")
    args = ap.parse_args(argv)

    spec = build_spec(args)
    geo = default_geometry(spec, dims=(24, 24, 24, 16), points_per_wavelength=args.ppw)
    lo, hi = diffops.ratio_window(args.order)
    print(f"{'identity':<22}{'h':>12}{'fine max':>14}{'ratio':>9}{'order':>7}  window [{lo:.2f}, {hi:.2f}]")
    for ident in mv.SUITE_IDENTITIES:
        g = geo
        for _ in range(args.levels):
            r = mv.check_identity(ident, spec, g, mv.Method.FINITE_DIFFERENCE, order=args.order)
            ratio = r.convergence_ratio
            order = "-" if ratio is None else f"{diffops.observed_order(ratio):.2f}"
            shown = "exact" if ratio is None else f"{ratio:.3f}"
            print(f"{ident.value:<22}{g.h:>12.4e}{r.max_residual:>14.4e}{shown:>9}{order:>7}")
            g = GridGeometry(g.h / 2, g.dt / 2, g.dims, g.origin, g.t0)


if __name__ == "__main__":
    main()
