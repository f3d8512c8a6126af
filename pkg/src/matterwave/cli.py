"""Command line entry point: ``matterwave verify|fields|boost --config PATH``.

Exit codes: 0 every check passed, 1 some check failed, 2 invalid config,
unreadable input or unwritable output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import energetics, interaction, maxwell_verify as mv, relativity, spin
from .config import RunConfig, load_config
from .errors import ConfigError, MatterWaveError
from .fields import components, eval_channels, sample_grid
from .model import Kind, make_electron, mass_consistent_volume

REPORT_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
RANDOM_POINTS = 256


def _check(identity: str, method: str, max_residual: float, tolerance: float, paper_ref: str,
           l2_residual: float | None = None, convergence_ratio: float | None = None) -> dict:
    """A non-suite check in the report's check schema."""
    return {
        "identity": identity,
        "method": method,
        "max_residual": float(max_residual),
        "l2_residual": float(abs(max_residual) if l2_residual is None else l2_residual),
        "convergence_ratio": convergence_ratio,
        "tolerance": float(tolerance),
        "passed": bool(abs(max_residual) <= tolerance),
        "paper_ref": paper_ref,
    }


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


# ----------------------------------------------------------------- checks


def energetics_checks(spec) -> list[dict]:
    c = spec.constants
    checks = []
    eb = energetics.energy_breakdown(spec)
    checks.append(_check("EnergySplit", "Quadrature", _rel(eb.W_K, eb.W_P), 1e-6,
                         "W_K = W_P, W_K = 1/2 |u|^2 int rho dV, W_P = 1/2 int phi dV"))
    if spec.kind is Kind.ELECTRON:
        # the Planck ratio needs the volume whose integrated density is m
        ref = make_electron(c, spec.rho0, spec.u, mass_consistent_volume(c, spec.rho0), spec.C_amp)
        eb_m = energetics.energy_breakdown(ref)
        checks.append(_check("PlanckRatio", "Quadrature", eb_m.planck_ratio - 1.0, 1e-6,
                             "W_T = hbar*omega when rho_bar*V_P = m"))
        r = energetics.kinetic_operator_check(spec)
        checks.append(_check("KineticOperator", "Analytic", r, 1e-10 * c.hbar * spec.omega * spec.psi0,
                             "-(hbar^2/2m) lap(psi) = (hbar*omega/2) psi"))
        u = energetics.uncertainty_product(c, spec.speed)
        checks.append(_check("UncertaintyProduct", "Analytic", u.product_xp - u.bound, 1e-12 * u.bound,
                             "dx * hbar*dk = h/2"))
    else:
        pe = energetics.photon_energy_check(spec)
        scale = spec.p0 * spec.wavenumber
        checks.append(_check("PhotonEinstein", "Analytic", pe.einstein, 1e-14 * max(scale, 1e-300),
                             "p0*|k| - (omega/c0^2) phi0 = 0"))
        checks.append(_check("PhotonPotential", "Analytic", pe.potential, 1e-14 * max(spec.phi0, 1e-300),
                             "phi0 = rho0 c0^2"))
    return checks


def spin_checks(spec) -> list[dict]:
    c = spec.constants
    out = []
    for res, s_exp, g_exp in ((spin.spin_photon(c, spec.omega), c.hbar, 1.0),
                              (spin.spin_electron(c, spec.omega), c.hbar / 2, 2.0)):
        err = max(abs(res.product_gs - c.hbar), abs(res.s - s_exp), abs(res.g - g_exp) * c.hbar)
        out.append(_check(f"Spin{res.kind.value.capitalize()}", "Analytic", err, 1e-12 * c.hbar,
                          f"g*s = hbar with (s, g) = ({'hbar, 1' if res.kind is Kind.PHOTON else 'hbar/2, 2'})"))
    return out


def interaction_checks(cfg: RunConfig, spec) -> list[dict]:
    c = cfg.constants
    ic = cfg.interaction
    xdot = 0.5 * c.c0 if ic.xdot is None else ic.xdot
    state = interaction.hamiltonian_balance(ic.rho_el0, xdot, ic.sigma_el0, ic.phi_ext, c)
    lhs = state.photon_energy_density
    rhs = ic.rho_el0 * xdot**2
    out = [_check("InteractionBalance", "Analytic", lhs - rhs, 1e-12 * max(rhs, 1e-300),
                  "rho_ph0 c0^2 = rho_el0 xdot^2")]
    nu = spec.omega / (2 * math.pi) if ic.nu is None else ic.nu
    wavelength = c.c0 / nu if ic.wavelength is None else ic.wavelength
    ts = interaction.TransferSpec(ic.A_cross, nu, wavelength, ic.alpha_frac)
    rate = interaction.transfer_rate(c, nu)
    out.append(_check("TransferRate", "Analytic", rate * ts.tau - c.h * nu, 1e-12 * c.h * nu,
                      "dW/dt = h nu^2, rate*tau = h nu"))
    return out


def random_point_checks(source, geometry, seed: int, charge_density: float = 0.0) -> list[dict]:
    """Analytic identities and the energy-density invariant at seeded random points."""
    rng = np.random.default_rng(seed)
    lo = np.asarray(geometry.origin)
    span = geometry.h * (np.asarray(geometry.dims[:3]) - 1)
    X = lo + rng.random((RANDOM_POINTS, 3)) * span
    ts = geometry.t0 + rng.random(RANDOM_POINTS) * geometry.dt * (geometry.dims[3] - 1)
    ch = eval_channels(source, X, ts, ("rho", "phi"))
    const = sum(s.rho0 * s.speed**2 for s in components(source))
    out = []
    if len(components(source)) == 1:
        spec = components(source)[0]
        total = ch["rho"] * spec.speed**2 + ch["phi"]
        r = np.abs(total - const)
        out.append(_check("EnergyDensityConstant", f"RandomPoints(seed={seed})", r.max(), 1e-12 * const,
                          "rho |u|^2 + phi = rho0 |u|^2", l2_residual=float(np.sqrt(np.mean(r**2)))))
    worst = 0.0
    for ident in mv.SUITE_IDENTITIES:
        specs = components(source)
        r = sum(mv.analytic_residual(ident, s, X, ts, charge_density if i == 0 else 0.0)
                for i, s in enumerate(specs))
        worst = max(worst, float(np.max(np.abs(r))))
    out.append(_check("AnalyticSuite", f"RandomPoints(seed={seed})", worst, mv.ANALYTIC_TOL,
                      "max over all suite identities at random points"))
    return out


# --------------------------------------------------------------- commands


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def build_verify_report(cfg: RunConfig) -> dict:
    cfg.require_stencil_room()
    source = cfg.source()
    geometry = cfg.grid.build(source)
    first = components(source)[0]
    reports = mv.run_suite(source, geometry, cfg.tolerances, order=cfg.order,
                           charge_density=cfg.charge_density)
    checks = [r.to_dict() for r in reports]
    checks += energetics_checks(first)
    checks += spin_checks(first)
    checks += interaction_checks(cfg, first)
    checks += random_point_checks(source, geometry, cfg.seed, cfg.charge_density)
    aspect = energetics.aspect_resolution_check(cfg.constants, first.wavelength, first.speed)
    diagnostics = {
        "transversal_audit": [mv.transversal_audit(s, geometry) for s in components(source)],
        "aspect": aspect.to_dict(),
        "uncertainty_bounds": {"h_over_2": cfg.constants.h / 2, "hbar_over_2": cfg.constants.hbar / 2},
        "geometry": {"h": geometry.h, "dt": geometry.dt, "dims": list(geometry.dims),
                     "origin": list(geometry.origin), "t0": geometry.t0},
    }
    return {
        "version": REPORT_VERSION,
        "config_echo": cfg.echo(),
        "checks": checks,
        "diagnostics": diagnostics,
        "seed": cfg.seed,
        "all_passed": all(c["passed"] for c in checks),
    }


def exit_code(report: dict) -> int:
    return EXIT_OK if all(c["passed"] for c in report["checks"]) else EXIT_FAIL


def cmd_verify(cfg: RunConfig, out_dir: Path) -> int:
    report = build_verify_report(cfg)
    _write(out_dir / cfg.outputs["report"], _dump(report))
    for c in report["checks"]:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['identity']:<22} {c['method']:<20} "
              f"max={c['max_residual']:.3e} tol={c['tolerance']:.3e}")
    return exit_code(report)


def cmd_fields(cfg: RunConfig, out_dir: Path) -> int:
    source = cfg.source()
    grid = sample_grid(source, cfg.grid.build(source))
    path = out_dir / cfg.outputs["fields_csv"]
    _write(path, grid.to_csv_string())
    print(f"wrote {path} ({int(np.prod(grid.dims))} rows)")
    return EXIT_OK


def build_boost_report(cfg: RunConfig) -> dict:
    if cfg.boost is None:
        raise ConfigError("boost: section required for the boost command")
    b = cfg.boost
    spec = components(cfg.source())[0]
    q = relativity.frame_quantities(spec)
    rows = relativity.boost_sweep(q, cfg.constants, b.betas, b.density_factor)
    checks = []
    for row in rows:
        checks.append(_check("E0Invariance", f"beta={row.boost.beta!r}", row.E0_relative_change, b.rtol,
                             "E0(S') = phi0' V_P' = E0(S)"))
    wave = None
    if b.single and abs(spec.u[1]) + abs(spec.u[2]) == 0:
        boost = relativity.make_boost(cfg.constants, b.betas[0] * cfg.constants.c0)
        rep = relativity.boost_wave_equation(spec, boost, method=mv.Method.ANALYTIC,
                                             density_factor=b.density_factor)
        checks.append(rep.to_dict())
        wave = {k: rep.extras[k] for k in ("u_x_prime", "c_ph_squared", "c_ph_residual", "operator_scaling")}
    return {
        "version": REPORT_VERSION,
        "config_echo": cfg.echo(),
        "rows": [r.to_dict(b.rtol) for r in rows],
        "gamma": [r.boost.gamma for r in rows],
        "invariant": all(r.invariant(b.rtol) for r in rows),
        "boosted_wave": wave,
        "checks": checks,
        "seed": cfg.seed,
    }


def cmd_boost(cfg: RunConfig, out_dir: Path) -> int:
    report = build_boost_report(cfg)
    _write(out_dir / cfg.outputs["boost_report"], _dump(report))
    for row in report["rows"]:
        print(f"beta={row['beta']:.4f} gamma={row['gamma']:.6f} "
              f"dE0/E0={row['E0_relative_change']:.2e} {'invariant' if row['invariant'] else 'NOT invariant'}")
    return exit_code(report)


COMMANDS = {"verify": cmd_verify, "fields": cmd_fields, "boost": cmd_boost}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="matterwave", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="JSON run configuration (version 1)")
    ap.add_argument("--out", default=".", help="output directory (default: current)")
    ap.add_argument("--order", type=int, choices=(2, 4), default=None, help="finite-difference order")
    ap.add_argument("--seed", type=int, default=None, help="seed for random-point checks")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, order=args.order)
        return COMMANDS[args.command](cfg, Path(args.out))
    except (MatterWaveError, OSError) as exc:
        print(f"matterwave: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
