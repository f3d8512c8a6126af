"""Residuals of the wave, continuity and field identities of the matter-wave model.

Every identity is evaluated two independent ways:

* ``Analytic`` differentiates the closed-form fields by hand (each field is
  a constant vector times a function of the phase, so a spatial derivative
  is a factor ``k_j`` and a time derivative a factor ``-omega``);
* ``FiniteDifference`` samples the fields on a lattice and applies the
  central stencils of :mod:`matterwave.diffops` at spacing h and h/2.

The electromagnetic fields entering the Maxwell-type identities are the ones
*defined* from momentum density and intrinsic potential,
``E = (-grad phi + dp/dt)/sigma_bar`` and ``B = -curl(p)/sigma_bar``. The
transversal fields of :func:`matterwave.fields.eval_EB` are audited
separately by :func:`transversal_audit`.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import diffops
from .errors import ZeroVelocity
from .fields import (
    GridGeometry,
    Source,
    components,
    default_geometry,
    phase,
    sample_grid,
)
from .model import Kind, ParticleSpec

ANALYTIC_TOL = 1e-10
# FD residuals at or below FD_FLOOR * (size of the largest term) count as exact
FD_FLOOR = 1e-9


class Identity(str, enum.Enum):
    WAVE_EQ_PSI = "WaveEqPsi"
    WAVE_EQ_RHO = "WaveEqRho"
    WAVE_EQ_P = "WaveEqP"
    CONTINUITY = "Continuity"
    FARADAY = "Faraday"
    AMPERE_SUBLUMINAL = "AmpereSubluminal"
    AMPERE_INHOMOGENEOUS = "AmpereInhomogeneous"
    DIV_B = "DivB"
    GAUSS_D = "GaussD"
    LORENTZ_CONDITION = "LorentzCondition"
    # produced by matterwave.relativity, never by run_suite
    BOOSTED_WAVE_EQ_RHO = "BoostedWaveEqRho"


SUITE_IDENTITIES = tuple(i for i in Identity if i is not Identity.BOOSTED_WAVE_EQ_RHO)


class Method(str, enum.Enum):
    ANALYTIC = "Analytic"
    FINITE_DIFFERENCE = "FiniteDifference"

    @classmethod
    def parse(cls, value) -> "Method":
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        if v in ("analytic", "a"):
            return cls.ANALYTIC
        if v in ("finitedifference", "finite_difference", "fd"):
            return cls.FINITE_DIFFERENCE
        raise ValueError(f"unknown method {value!r}")


FORMULAS = {
    Identity.WAVE_EQ_PSI: "lap(psi) - (1/|u|^2) d2psi/dt2 = 0",
    Identity.WAVE_EQ_RHO: "lap(rho) - (1/|u|^2) d2rho/dt2 = 0",
    Identity.WAVE_EQ_P: "lap(p) - (1/|u|^2) d2p/dt2 = 0",
    Identity.CONTINUITY: "div(p) + drho/dt = 0",
    Identity.FARADAY: "curl(E) + dB/dt = 0",
    Identity.AMPERE_SUBLUMINAL: "(1/|u|^2) dE/dt - curl(B) = 0",
    Identity.AMPERE_INHOMOGENEOUS: "J + dD/dt - curl(H) = 0, J = 0, D = eps E, H = B/mu",
    Identity.DIV_B: "div(B) = 0",
    Identity.GAUSS_D: "div(eps E) - sigma = 0",
    Identity.LORENTZ_CONDITION: "(1/|u|^2) dphi/dt - div(p) = 0; div(A) + (1/c0) dphi/dt = 0 with A = -c0 p when |u| = c0",
    Identity.BOOSTED_WAVE_EQ_RHO: "lap(rho) - (1/u_x'^2) d2rho/dt2 = 0 with lap' = (1-beta^2) lap, d2/dt'2 = (1-beta^2) d2/dt2",
}


@dataclass(frozen=True)
class ResidualReport:
    """Residual norms of one identity by one method; passes iff max <= tolerance."""

    identity: Identity
    method: Method
    max_residual: float
    l2_residual: float
    tolerance: float
    convergence_ratio: float | None = None
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tolerance)

    @property
    def paper_ref(self) -> str:
        return FORMULAS[self.identity]

    def to_dict(self) -> dict:
        return {
            "identity": self.identity.value,
            "method": self.method.value,
            "max_residual": float(self.max_residual),
            "l2_residual": float(self.l2_residual),
            "convergence_ratio": None if self.convergence_ratio is None else float(self.convergence_ratio),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
            "paper_ref": self.paper_ref,
        }


# ---------------------------------------------------------------- analytic


def _intrinsic_coeffs(spec: ParticleSpec):
    """Constant vectors c_E, c_B with E = sin(2 phase) c_E, B = sin(2 phase) c_B."""
    k = np.asarray(spec.k)
    u = np.asarray(spec.u)
    scale = spec.rho0 / spec.constants.sigma_bar
    return scale * (spec.speed**2 * k - spec.omega * u), -scale * np.cross(k, u)


def analytic_residual(identity: Identity, spec: ParticleSpec, x, t, charge_density: float = 0.0) -> np.ndarray:
    """Pointwise residual from hand-differentiated closed forms.

    Vector identities return a trailing axis of length 3. The vector-potential
    form of the Lorentz condition is :func:`lorentz_gauge_residual`.
    """
    identity = Identity(identity)
    th = phase(spec, x, t)
    k = np.asarray(spec.k)
    u = np.asarray(spec.u)
    kk = float(k @ k)
    ku = float(k @ u)
    w = spec.omega
    u2 = spec.speed**2
    cst = spec.constants
    if identity in (Identity.WAVE_EQ_PSI, Identity.WAVE_EQ_RHO, Identity.WAVE_EQ_P,
                    Identity.CONTINUITY, Identity.LORENTZ_CONDITION) and u2 == 0:
        raise ZeroVelocity("identity divides by |u|^2")

    if identity is Identity.WAVE_EQ_PSI:
        s = np.sin(th)
        lap = -spec.psi0 * kk * s
        dtt = -spec.psi0 * w * w * s
        return lap - dtt / u2
    if identity in (Identity.WAVE_EQ_RHO, Identity.WAVE_EQ_P):
        c2 = np.cos(2 * th)
        lap = 2 * spec.rho0 * kk * c2
        dtt = 2 * spec.rho0 * w * w * c2
        r = lap - dtt / u2
        return r if identity is Identity.WAVE_EQ_RHO else r[..., None] * u
    if identity is Identity.CONTINUITY:
        s2 = np.sin(2 * th)
        return spec.rho0 * ku * s2 - w * spec.rho0 * s2
    if identity is Identity.LORENTZ_CONDITION:
        s2 = np.sin(2 * th)
        return spec.phi0 * w * s2 / u2 - spec.rho0 * ku * s2

    # derivatives of sin(2 phase): d/dx_j -> 2 cos(2 phase) k_j, d/dt -> -2 omega cos(2 phase)
    cE, cB = _intrinsic_coeffs(spec)
    c2 = np.cos(2 * th)[..., None]
    if identity is Identity.FARADAY:
        return 2 * c2 * np.cross(k, cE) - 2 * w * c2 * cB
    if identity is Identity.AMPERE_SUBLUMINAL:
        return -2 * w * c2 * cE / u2 - 2 * c2 * np.cross(k, cB)
    if identity is Identity.AMPERE_INHOMOGENEOUS:
        return -2 * w * cst.epsilon * c2 * cE - (2 / cst.mu_perm) * c2 * np.cross(k, cB)
    if identity is Identity.DIV_B:
        return 2 * c2[..., 0] * float(k @ cB)
    if identity is Identity.GAUSS_D:
        return 2 * cst.epsilon * c2[..., 0] * float(k @ cE) - charge_density
    raise ValueError(f"{identity} is not a suite identity")


def lorentz_gauge_residual(spec: ParticleSpec, x, t) -> np.ndarray:
    """div(A) + (1/c0) dphi/dt with A = -c0 p (meaningful when |u| = c0)."""
    th = phase(spec, x, t)
    s2 = np.sin(2 * th)
    c0 = spec.constants.c0
    div_a = -c0 * spec.rho0 * float(np.dot(spec.k, spec.u)) * s2
    return div_a + spec.phi0 * spec.omega * s2 / c0


def _points(geometry: GridGeometry):
    xs, ys, zs, ts = geometry.axes()
    X = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)[..., None, :]
    return X, ts


def _magnitude(spec: ParticleSpec) -> float:
    """Rough size of the largest derivative term any identity forms for ``spec``."""
    cst = spec.constants
    speed = max(spec.speed, 1e-300)
    rate = max(spec.wavenumber, spec.omega, spec.omega / speed, 1.0)
    amp = max(spec.psi0, spec.rho0, spec.p0, spec.phi0, spec.rho0 * speed * rate / cst.sigma_bar, 1e-300)
    factor = max(1.0, 1.0 / cst.sigma_bar, cst.epsilon, 1.0 / cst.mu_perm, 1.0 / speed**2)
    return amp * rate**2 * factor


def _norms(r: np.ndarray, vector: bool) -> tuple[float, float]:
    a = np.sqrt(np.sum(r * r, axis=0)) if vector else np.abs(r)
    if a.size == 0:
        return 0.0, 0.0
    return float(a.max()), float(math.sqrt(np.mean(a * a)))


_VECTOR = {Identity.WAVE_EQ_P, Identity.FARADAY, Identity.AMPERE_SUBLUMINAL,
           Identity.AMPERE_INHOMOGENEOUS}


def _analytic_array(identity, spec, geometry, charge_density):
    X, ts = _points(geometry)
    r = analytic_residual(identity, spec, X, ts, charge_density)
    if identity in _VECTOR:
        r = np.moveaxis(r, -1, 0)
    return r


def _analytic_report(identity, source, geometry, tolerance, charge_density) -> ResidualReport:
    r = None
    extra = None
    for i, spec in enumerate(components(source)):
        part = _analytic_array(identity, spec, geometry, charge_density if i == 0 else 0.0)
        r = part if r is None else r + part
        if identity is Identity.LORENTZ_CONDITION and spec.kind is Kind.PHOTON:
            X, ts = _points(geometry)
            g = lorentz_gauge_residual(spec, X, ts)
            extra = g if extra is None else extra + g
    mx, l2 = _norms(r, identity in _VECTOR)
    extras = {}
    if extra is not None:
        gmx, gl2 = _norms(extra, False)
        extras["gauge_form_max_residual"] = gmx
        mx = max(mx, gmx)
    return ResidualReport(identity, Method.ANALYTIC, mx, l2, tolerance, None, extras)


# ------------------------------------------------------------ finite difference

_FD_CHANNELS = ("psi", "rho", "px", "py", "pz", "phi", "Ax", "Ay", "Az")
WAVE_CHANNELS = ("psi", "rho", "px", "py", "pz")


def fd_residual(identity: Identity, spec: ParticleSpec, grid, cfg: diffops.StencilConfig,
                charge_density: float = 0.0) -> tuple[np.ndarray, int]:
    """Residual from stencils applied to sampled channels, and its crop depth."""
    identity = Identity(identity)
    cst = spec.constants
    u2 = spec.speed**2
    if u2 == 0 and identity in (Identity.WAVE_EQ_PSI, Identity.WAVE_EQ_RHO, Identity.WAVE_EQ_P,
                                Identity.CONTINUITY, Identity.LORENTZ_CONDITION):
        raise ZeroVelocity("identity divides by |u|^2")
    D = diffops
    if identity is Identity.WAVE_EQ_PSI:
        f = grid.channel("psi")
        return D.laplacian(f, cfg) - D.d2_dt2(f, cfg) / u2, 1
    if identity is Identity.WAVE_EQ_RHO:
        f = grid.channel("rho")
        return D.laplacian(f, cfg) - D.d2_dt2(f, cfg) / u2, 1
    p = grid.vector("p")
    if identity is Identity.WAVE_EQ_P:
        return D.laplacian(p, cfg) - D.d2_dt2(p, cfg) / u2, 1
    if identity is Identity.CONTINUITY:
        return D.div(p, cfg) + D.d_dt(grid.channel("rho"), cfg), 1
    phi = grid.channel("phi")
    if identity is Identity.LORENTZ_CONDITION:
        return D.d_dt(phi, cfg) / u2 - D.div(p, cfg), 1

    sb = cst.sigma_bar
    E = (-D.grad(phi, cfg) + D.d_dt(p, cfg)) / sb
    B = -D.curl(p, cfg) / sb
    if identity is Identity.FARADAY:
        return D.curl(E, cfg) + D.d_dt(B, cfg), 2
    if identity is Identity.AMPERE_SUBLUMINAL:
        return D.d_dt(E, cfg) / u2 - D.curl(B, cfg), 2
    if identity is Identity.AMPERE_INHOMOGENEOUS:
        return cst.epsilon * D.d_dt(E, cfg) - D.curl(B, cfg) / cst.mu_perm, 2
    if identity is Identity.DIV_B:
        return D.div(B, cfg), 2
    if identity is Identity.GAUSS_D:
        return D.div(cst.epsilon * E, cfg) - charge_density, 2
    raise ValueError(f"{identity} is not a suite identity")


def fd_gauge_residual(spec: ParticleSpec, grid, cfg: diffops.StencilConfig) -> np.ndarray:
    A = grid.vector("A")
    return diffops.div(A, cfg) + diffops.d_dt(grid.channel("phi"), cfg) / spec.constants.c0


@dataclass
class GridLevels:
    """Per-component field samples at spacing h and h/2."""

    geometry: GridGeometry
    grids: list  # [(spec, coarse, fine)]

    @classmethod
    def sample(cls, source: Source, geometry: GridGeometry, parallel: bool | None = None,
               channels=_FD_CHANNELS) -> "GridLevels":
        """``channels`` may be narrowed to what the identities of interest read."""
        fine_geo = geometry.refined()
        grids = [(s, sample_grid(s, geometry, channels, parallel),
                  sample_grid(s, fine_geo, channels, parallel)) for s in components(source)]
        return cls(geometry, grids)


def convergence_study(
    residual_fn,
    levels: GridLevels,
    order: int,
    vector: bool,
    floor: float,
) -> dict:
    """Measure a residual at h and h/2 on shared lattice points.

    ``residual_fn(spec, grid, cfg) -> (array, depth)`` is summed over
    packet components at each level.
    """
    coarse = fine = None
    depth = 0
    for spec, g_c, g_f in levels.grids:
        rc, depth = residual_fn(spec, g_c, diffops.StencilConfig.for_grid(g_c, order))
        rf, _ = residual_fn(spec, g_f, diffops.StencilConfig.for_grid(g_f, order))
        coarse = rc if coarse is None else coarse + rc
        fine = rf if fine is None else fine + rf
    depth *= order // 2
    sub_c, sub_f = diffops.restrict_to_shared(coarse, fine, depth)
    c_max, _ = _norms(sub_c, vector)
    f_max, f_l2 = _norms(sub_f, vector)
    lo, hi = diffops.ratio_window(order)
    if c_max <= floor:
        ratio = None
        tolerance = floor
    else:
        ratio = c_max / f_max if f_max > 0 else math.inf
        tolerance = max(floor, c_max / lo)
    h_fine = levels.geometry.h / 2
    return {
        "coarse_max": c_max,
        "fine_max": f_max,
        "fine_l2": f_l2,
        "ratio": ratio,
        "tolerance": tolerance,
        "C": tolerance / h_fine**order,
        "h": levels.geometry.h,
        "window": (lo, hi),
    }


def _fd_report(identity, source, levels: GridLevels, order: int, charge_density: float) -> ResidualReport:
    floor = FD_FLOOR * sum(_magnitude(s) for s in components(source))
    def fn(spec, grid, cfg):
        # the configured charge density belongs to the packet, not to each component
        cd = charge_density if spec is components(source)[0] else 0.0
        return fd_residual(identity, spec, grid, cfg, cd)

    study = convergence_study(fn, levels, order, identity in _VECTOR, floor)
    extras = {k: study[k] for k in ("coarse_max", "C", "h")}
    extras["ratio_window"] = list(study["window"])
    max_res, l2, ratio, tol = study["fine_max"], study["fine_l2"], study["ratio"], study["tolerance"]
    if identity is Identity.LORENTZ_CONDITION and any(s.kind is Kind.PHOTON for s in components(source)):
        g = convergence_study(lambda s, grid, cfg: (fd_gauge_residual(s, grid, cfg), 1),
                              levels, order, False, floor)
        extras["gauge_form_max_residual"] = g["fine_max"]
        extras["gauge_form_ratio"] = g["ratio"]
        if g["fine_max"] > g["tolerance"]:
            # report the failing form so that passed stays max <= tolerance
            max_res, l2, ratio, tol = g["fine_max"], g["fine_l2"], g["ratio"], g["tolerance"]
    return ResidualReport(identity, Method.FINITE_DIFFERENCE, max_res, l2, tol, ratio, extras)


# ------------------------------------------------------------------ checks


def check_identity(
    identity: Identity,
    source: Source,
    geometry: GridGeometry | None = None,
    method: Method | str = Method.ANALYTIC,
    *,
    order: int = 2,
    tolerance: float | None = None,
    charge_density: float = 0.0,
    levels: GridLevels | None = None,
) -> ResidualReport:
    identity = Identity(identity)
    method = Method.parse(method)
    geometry = geometry or default_geometry(source)
    if method is Method.ANALYTIC:
        return _analytic_report(identity, source, geometry,
                                ANALYTIC_TOL if tolerance is None else tolerance, charge_density)
    if levels is None:
        levels = GridLevels.sample(source, geometry)
    return _fd_report(identity, source, levels, order, charge_density)


def check_wave_equation(source, geometry=None, method=Method.ANALYTIC, *, field="rho", **kw) -> ResidualReport:
    """Wave equation with phase speed |u| for ``field`` in {"psi", "rho", "p"}."""
    identity = {"psi": Identity.WAVE_EQ_PSI, "rho": Identity.WAVE_EQ_RHO, "p": Identity.WAVE_EQ_P}[field]
    return check_identity(identity, source, geometry, method, **kw)


def check_continuity(source, geometry=None, method=Method.ANALYTIC, **kw) -> ResidualReport:
    return check_identity(Identity.CONTINUITY, source, geometry, method, **kw)


def check_faraday(source, geometry=None, method=Method.ANALYTIC, **kw) -> ResidualReport:
    return check_identity(Identity.FARADAY, source, geometry, method, **kw)


def check_ampere_subluminal(source, geometry=None, method=Method.ANALYTIC, **kw) -> ResidualReport:
    return check_identity(Identity.AMPERE_SUBLUMINAL, source, geometry, method, **kw)


def check_ampere_inhomogeneous(source, geometry=None, method=Method.ANALYTIC, **kw) -> ResidualReport:
    return check_identity(Identity.AMPERE_INHOMOGENEOUS, source, geometry, method, **kw)


def check_sources(source, geometry=None, method=Method.ANALYTIC, *, which="DivB", **kw) -> ResidualReport:
    """div(B) = 0 (``which="DivB"``) or div(eps E) = charge density (``"GaussD"``)."""
    return check_identity(Identity(which), source, geometry, method, **kw)


def check_lorentz_condition(source, geometry=None, method=Method.ANALYTIC, **kw) -> ResidualReport:
    return check_identity(Identity.LORENTZ_CONDITION, source, geometry, method, **kw)


def _parallel_default() -> bool:
    return os.environ.get("MW_NO_PARALLEL", "") in ("", "0")


def run_suite(
    source: Source,
    geometry: GridGeometry | None = None,
    tolerances: Mapping[str, float] | None = None,
    *,
    order: int = 2,
    charge_density: float = 0.0,
    parallel: bool | None = None,
) -> list[ResidualReport]:
    """All suite identities by both methods, ordered by identity then method.

    ``tolerances`` maps identity names (or ``"analytic"`` for all) to
    analytic-path tolerances.
    """
    geometry = geometry or default_geometry(source)
    tolerances = dict(tolerances or {})
    parallel = _parallel_default() if parallel is None else parallel
    levels = GridLevels.sample(source, geometry, parallel)
    jobs = [(i, m) for i in SUITE_IDENTITIES for m in Method]

    def run(job):
        identity, method = job
        tol = tolerances.get(identity.value, tolerances.get("analytic"))
        return check_identity(identity, source, geometry, method, order=order, tolerance=tol,
                              charge_density=charge_density, levels=levels)

    if parallel:
        with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]


def suite_passed(reports) -> bool:
    return all(r.passed for r in reports)


# ------------------------------------------------------ transversal audit


def transversal_residuals(spec: ParticleSpec, x, t) -> dict[str, np.ndarray]:
    """Maxwell-type residuals of the transversal (cosine) E and B fields.

    With E = a cos(phase) e_t and B = a cos(phase) (e_k x e_t):

    * Faraday: curl E + dB/dt = a sin(phase) (omega - |k|) e_b
    * Ampere:  dE/dt / |u|^2 - curl B = a sin(phase) (omega/|u|^2 - |k|) e_t

    Both vanish only when the phase speed is 1 in field units, i.e. for
    photons with c0 = 1. The energy identity (E^2 + B^2)/(8 pi) = phi holds
    for every particle.
    """
    th = phase(spec, x, t)
    s = np.sin(th)[..., None]
    c = np.cos(th)
    a = spec.field_amplitude
    k = np.asarray(spec.k)
    e_t = np.asarray(spec.e_t)
    e_b = np.asarray(spec.e_b)
    curl_E = -a * s * np.cross(k, e_t)
    dB_dt = a * spec.omega * s * e_b
    dE_dt = a * spec.omega * s * e_t
    curl_B = -a * s * np.cross(k, e_b)
    energy = (2 * (a * c) ** 2) / (8 * math.pi) - spec.phi0 * c * c
    return {
        "faraday": curl_E + dB_dt,
        "ampere": dE_dt / spec.speed**2 - curl_B,
        "energy": energy,
    }


def transversal_audit(spec: ParticleSpec, geometry: GridGeometry | None = None) -> dict:
    """Max residuals of :func:`transversal_residuals` over a lattice."""
    geometry = geometry or default_geometry(spec)
    X, ts = _points(geometry)
    res = transversal_residuals(spec, X, ts)
    out = {}
    for name, r in res.items():
        a = np.linalg.norm(r, axis=-1) if r.ndim == X.ndim else np.abs(r)
        out[name] = float(a.max())
    out["phase_speed_in_field_units"] = spec.phase_velocity
    return out
