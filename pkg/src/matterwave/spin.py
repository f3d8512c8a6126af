"""Spin magnitude and gyromagnetic factor from W = -mu.B with rotating intrinsic fields."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import InvalidFactor, InvalidFrequency
from .fields import phase
from .model import Constants, Kind, ParticleSpec


@dataclass(frozen=True)
class SpinResult:
    kind: Kind
    s: float
    g: float
    product_gs: float
    direction: tuple[float, float, float] | None
    W: float
    B_field: float
    B_used: float
    field_conversion: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value, "s": self.s, "g": self.g, "product_gs": self.product_gs,
            "direction": None if self.direction is None else list(self.direction),
            "W": self.W, "B_field": self.B_field, "B_used": self.B_used,
            "field_conversion": self.field_conversion,
        }


def _product_gs(constants: Constants, W: float, B_field: float) -> tuple[float, float]:
    """Solve W = g*(e/(2 m c0))*s*B_used for g*s.

    B_used is the intrinsic field times c0 (the framework's fields are c0
    times the classical ones); rotation frequency and spin are taken parallel.
    """
    B_used = constants.c0 * B_field
    moment_per_gs = constants.e / (2 * constants.m * constants.c0)
    return W / (moment_per_gs * B_used), B_used


def _direction(spec: ParticleSpec | None):
    if spec is None:
        return None
    b = np.asarray(spec.e_b)
    b = b / np.linalg.norm(b)
    return tuple(float(v) for v in b)


def spin_photon(constants: Constants, omega: float, spec: ParticleSpec | None = None) -> SpinResult:
    """Photon: W = hbar*omega, B = 2 (rho_bar/sigma_bar) omega with rho_bar/sigma_bar = m/e."""
    if not omega > 0:
        raise InvalidFrequency(f"omega must be positive, got {omega!r}")
    W = constants.hbar * omega
    B = 2 * constants.rho_over_sigma * omega
    gs, B_used = _product_gs(constants, W, B)
    g = 1.0
    return SpinResult(Kind.PHOTON, gs / g, g, gs, _direction(spec), W, B, B_used, constants.c0)


def spin_electron(constants: Constants, omega: float, spec: ParticleSpec | None = None) -> SpinResult:
    """Electron: W = hbar*omega/2 and B = (rho_bar/sigma_bar) omega.

    The energy balance fixes only g*s = hbar; the two-state multiplicity
    splits it as s = hbar/2, g = 2.
    """
    if not omega > 0:
        raise InvalidFrequency(f"omega must be positive, got {omega!r}")
    W = 0.5 * constants.hbar * omega
    B = constants.rho_over_sigma * omega
    gs, B_used = _product_gs(constants, W, B)
    multiplicity = 2
    return SpinResult(Kind.ELECTRON, gs / multiplicity, float(multiplicity), gs,
                      _direction(spec), W, B, B_used, constants.c0)


@dataclass(frozen=True)
class RigidRotation:
    """Test helper: momentum density of uniform density in rigid rotation, p = rho_bar (w x r).

    Its curl is 2 rho_bar w, so B = -curl(p)/sigma_bar has magnitude
    2 (rho_bar/sigma_bar) |w|. Not a field of the matter-wave model itself.
    """

    constants: Constants
    rho_bar: float
    angular_velocity: tuple[float, float, float]
    label: str = "rigid-rotation helper field"

    def p(self, x, t=0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.rho_bar * np.cross(np.asarray(self.angular_velocity), x)

    def curl_p(self, x, t=0.0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(2 * self.rho_bar * np.asarray(self.angular_velocity), x.shape).copy()


MomentumSource = Union[ParticleSpec, RigidRotation]


def _curl_p(source: MomentumSource, x, t):
    if isinstance(source, RigidRotation):
        return source.curl_p(x, t)
    # curl(rho u) = grad(rho) x u with grad(rho) = rho0 sin(2 phase) k
    s2 = np.sin(2 * phase(source, x, t))[..., None]
    return source.rho0 * s2 * np.cross(source.k, source.u)


def magnetic_field_from_curl(source: MomentumSource, factor: int = 1) -> Callable:
    """B(x, t) = -curl(p)/(factor*sigma_bar); factor 1 for photons, 2 for electrons."""
    if factor not in (1, 2):
        raise InvalidFactor(f"factor must be 1 or 2, got {factor!r}")
    sigma_bar = source.constants.sigma_bar

    def B(x, t=0.0):
        return -_curl_p(source, x, t) / (factor * sigma_bar)

    return B
