"""x-axis Lorentz boosts of the wave parameters and of the intrinsic energy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import maxwell_verify as mv
from .errors import SuperluminalBoost, UnsupportedBoostAxis, ZeroVelocity
from .fields import GridGeometry, default_geometry
from .model import Constants, Kind, ParticleSpec, make_electron, make_photon


@dataclass(frozen=True)
class BoostSpec:
    V: float
    beta: float
    gamma: float
    c0: float
    Lambda: np.ndarray = field(repr=False, compare=False)


def boost_matrix(beta: float) -> np.ndarray:
    """4x4 boost along x acting on (c0 t, x, y, z)."""
    gamma = 1.0 / math.sqrt(1.0 - beta * beta)
    L = np.eye(4)
    L[0, 0] = L[1, 1] = gamma
    L[0, 1] = L[1, 0] = -beta * gamma
    L.setflags(write=False)
    return L


def make_boost(constants: Constants, V: float) -> BoostSpec:
    if not abs(V) < constants.c0:
        raise SuperluminalBoost(f"|V| = {abs(V)!r} must be below c0 = {constants.c0!r}")
    beta = V / constants.c0
    return BoostSpec(V=V, beta=beta, gamma=1.0 / math.sqrt(1.0 - beta * beta),
                     c0=constants.c0, Lambda=boost_matrix(beta))


def compose_velocity(u_x: float, V: float, c0: float) -> float:
    """Velocity seen from a frame moving at V along x: (u - V)/(1 - u V/c0^2)."""
    return (u_x - V) / (1.0 - u_x * V / c0**2)


@dataclass(frozen=True)
class FrameQuantities:
    rho: float
    phi0: float
    V_P: float
    u_x: float

    @property
    def E0(self) -> float:
        """Integrated intrinsic energy phi0*V_P."""
        return self.phi0 * self.V_P

    def to_dict(self) -> dict:
        return {"rho": self.rho, "phi0": self.phi0, "V_P": self.V_P, "u_x": self.u_x, "E0": self.E0}


def frame_quantities(spec: ParticleSpec) -> FrameQuantities:
    return FrameQuantities(rho=spec.rho0, phi0=spec.phi0, V_P=spec.V_P, u_x=spec.u[0])


def boost_frame_quantities(q: FrameQuantities, boost: BoostSpec,
                           density_factor: float | None = None) -> FrameQuantities:
    """Quantities in the moving frame.

    rho' = a*rho with a = gamma unless ``density_factor`` is given,
    phi0' = gamma*phi0, V_P' = V_P/gamma (length contraction along x) and u_x'
    by velocity composition. E0' = phi0'*V_P' = E0.
    """
    a = boost.gamma if density_factor is None else density_factor
    return FrameQuantities(
        rho=a * q.rho,
        phi0=boost.gamma * q.phi0,
        V_P=q.V_P / boost.gamma,
        u_x=compose_velocity(q.u_x, boost.V, boost.c0),
    )


def restore_frame_quantities(q: FrameQuantities, boost: BoostSpec,
                             density_factor: float | None = None) -> FrameQuantities:
    """Inverse of :func:`boost_frame_quantities` for the same boost.

    Boosting again with -V is *not* the inverse here: densities and
    potentials scale by gamma in either direction.
    """
    a = boost.gamma if density_factor is None else density_factor
    return FrameQuantities(
        rho=q.rho / a,
        phi0=q.phi0 / boost.gamma,
        V_P=q.V_P * boost.gamma,
        u_x=compose_velocity(q.u_x, -boost.V, boost.c0),
    )


def _check_axis(spec: ParticleSpec) -> None:
    ux, uy, uz = spec.u
    if math.hypot(uy, uz) > 1e-15 * spec.speed:
        raise UnsupportedBoostAxis("boosts are along x; the particle must move along x")


def boosted_particle(spec: ParticleSpec, boost: BoostSpec, density_factor: float | None = None) -> ParticleSpec:
    """The particle as described in the moving frame.

    Electrons keep the de Broglie relations at the composed velocity; photons
    keep |u| = c0 with the Doppler-shifted frequency gamma*(1 - beta*n_x)*omega.
    """
    _check_axis(spec)
    a = boost.gamma if density_factor is None else density_factor
    c = spec.constants
    ux = spec.u[0]
    if spec.kind is Kind.PHOTON:
        n_x = math.copysign(1.0, ux)
        omega = boost.gamma * (1.0 - boost.beta * n_x) * spec.omega
        return make_photon(c, a * spec.rho0, (n_x, 0.0, 0.0), omega, spec.V_P / boost.gamma, spec.C_amp)
    u_prime = compose_velocity(ux, boost.V, boost.c0)
    if u_prime == 0:
        raise ZeroVelocity("the particle is at rest in the boosted frame")
    return make_electron(c, a * spec.rho0, (u_prime, 0.0, 0.0), spec.V_P / boost.gamma, spec.C_amp)


def boost_wave_equation(
    spec: ParticleSpec,
    boost: BoostSpec,
    geometry: GridGeometry | None = None,
    method: mv.Method | str = mv.Method.ANALYTIC,
    *,
    order: int = 2,
    tolerance: float | None = None,
    density_factor: float | None = None,
) -> mv.ResidualReport:
    """Density wave equation with phase speed u_x' after an x-boost.

    The moving-frame operators are (1 - beta^2) lap and (1 - beta^2) d2/dt2,
    so the common factor drops out and rho = rho'/a must satisfy
    lap(rho) - d2rho/dt2 / u_x'^2 = 0. The report holds that residual; extras
    carry the moving-frame form, u_x' and the phase-speed measurement
    c_ph^2 = u_x'^2.
    """
    method = mv.Method.parse(method)
    moved = boosted_particle(spec, boost, density_factor)
    a = boost.gamma if density_factor is None else density_factor
    scaling = 1.0 - boost.beta**2
    geometry = geometry or default_geometry(moved)
    base = mv.check_identity(mv.Identity.WAVE_EQ_RHO, moved, geometry, method, order=order,
                             tolerance=tolerance)
    u_prime = moved.u[0]
    c_ph2 = moved.phase_velocity**2
    extras = dict(base.extras)
    extras.update({
        "u_x_prime": u_prime,
        "c_ph_squared": c_ph2,
        "c_ph_residual": c_ph2 - u_prime**2,
        "beta": boost.beta,
        "gamma": boost.gamma,
        "operator_scaling": scaling,
        "moving_frame_max_residual": scaling * base.max_residual,
    })
    # rho = rho'/a, so the residual in rho is the moving-frame one over a
    max_res = base.max_residual / a
    l2 = base.l2_residual / a
    tol = base.tolerance if method is mv.Method.ANALYTIC else base.tolerance / a
    return mv.ResidualReport(mv.Identity.BOOSTED_WAVE_EQ_RHO, method, max_res, l2, tol,
                             base.convergence_ratio, extras)


@dataclass(frozen=True)
class BoostRow:
    boost: BoostSpec
    before: FrameQuantities
    after: FrameQuantities

    @property
    def E0_relative_change(self) -> float:
        return abs(self.after.E0 - self.before.E0) / abs(self.before.E0)

    def invariant(self, rtol: float = 1e-9) -> bool:
        return self.E0_relative_change <= rtol

    def to_dict(self, rtol: float = 1e-9) -> dict:
        return {
            "beta": self.boost.beta, "V": self.boost.V, "gamma": self.boost.gamma,
            "before": self.before.to_dict(), "after": self.after.to_dict(),
            "E0_relative_change": self.E0_relative_change, "invariant": self.invariant(rtol),
        }


def boost_sweep(q: FrameQuantities, constants: Constants, betas, density_factor=None) -> list[BoostRow]:
    rows = []
    for beta in betas:
        b = make_boost(constants, beta * constants.c0)
        rows.append(BoostRow(b, q, boost_frame_quantities(q, b, density_factor)))
    return rows
