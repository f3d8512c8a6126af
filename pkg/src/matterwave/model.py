"""Unit systems, physical constants and validated plane-wave particle models."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import constants as sc

from .errors import (
    DispersionMismatch,
    InvalidConstant,
    InvalidFrequency,
    InvalidParameter,
    SuperluminalElectron,
    ZeroVelocity,
)

Vec3 = tuple[float, float, float]

# relative slack for the construction invariants
_REL_TOL = 1e-14


class UnitSystem(str, enum.Enum):
    NATURAL = "natural"
    SI = "si"


class Kind(str, enum.Enum):
    ELECTRON = "electron"
    PHOTON = "photon"


@dataclass(frozen=True)
class Constants:
    """Unit system and physical constants. ``h`` is always ``2*pi*hbar``."""

    c0: float = 1.0
    hbar: float = 1.0
    m: float = 1.0
    e: float = 1.0
    sigma_bar: float = 1.0
    epsilon: float = 1.0
    mu_perm: float = 1.0
    system: UnitSystem = UnitSystem.NATURAL

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name == "system":
                continue
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidConstant(f"{f.name} must be a finite positive number, got {value!r}")

    @property
    def h(self) -> float:
        return 2.0 * math.pi * self.hbar

    @property
    def rho_over_sigma(self) -> float:
        """Ratio of mass density to charge density amplitudes, fixed at m/e."""
        return self.m / self.e

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["system"] = self.system.value
        d["h"] = self.h
        return d


_NATURAL_DEFAULTS = dict(c0=1.0, hbar=1.0, m=1.0, e=1.0, sigma_bar=1.0, epsilon=1.0, mu_perm=1.0)
_SI_DEFAULTS = dict(
    c0=sc.c,
    hbar=sc.hbar,
    m=sc.m_e,
    e=sc.e,
    sigma_bar=1.0,
    epsilon=1.0,
    mu_perm=1.0,
)


def make_constants(
    system: UnitSystem | str = UnitSystem.NATURAL,
    overrides: Mapping[str, float] | None = None,
) -> Constants:
    """Build a :class:`Constants` for ``system`` with optional overrides.

    ``h`` cannot be overridden; it is always derived from ``hbar``.
    """
    system = UnitSystem(system.lower() if isinstance(system, str) else system)
    values = dict(_NATURAL_DEFAULTS if system is UnitSystem.NATURAL else _SI_DEFAULTS)
    for name, value in (overrides or {}).items():
        if name not in values:
            raise InvalidConstant(f"unknown constant {name!r}")
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise InvalidConstant(f"{name} must be numeric, got {value!r}") from None
        if not (math.isfinite(value) and value > 0):
            raise InvalidConstant(f"{name} must be a finite positive number, got {value!r}")
        values[name] = value
    return Constants(system=system, **values)


def _vec3(v: Sequence[float]) -> Vec3:
    arr = tuple(float(x) for x in v)
    if len(arr) != 3 or not all(math.isfinite(x) for x in arr):
        raise InvalidParameter(f"expected a finite 3-vector, got {v!r}")
    return arr  # type: ignore[return-value]


def _norm(v: Sequence[float]) -> float:
    return math.sqrt(sum(x * x for x in v))


def _unit(v: Sequence[float]) -> Vec3:
    n = _norm(v)
    return (v[0] / n, v[1] / n, v[2] / n)


def transverse_direction(e_k: Sequence[float]) -> Vec3:
    """Deterministic unit vector orthogonal to ``e_k``.

    Gram-Schmidt of the first standard basis vector that is not nearly
    parallel to ``e_k`` (|cos| <= 0.9, which always exists for a unit vector).
    """
    ek = np.asarray(e_k, dtype=float)
    for i in range(3):
        if abs(ek[i]) <= 0.9:
            b = np.zeros(3)
            b[i] = 1.0
            t = b - ek[i] * ek
            t /= np.linalg.norm(t)
            # second pass removes the residual projection left by rounding
            t -= np.dot(t, ek) * ek
            t /= np.linalg.norm(t)
            return (float(t[0]), float(t[1]), float(t[2]))
    raise AssertionError("unreachable for a unit vector")


@dataclass(frozen=True)
class ParticleSpec:
    """A single monochromatic plane-wave particle.

    Vectors are stored as float tuples so the spec is hashable and immutable.
    """

    kind: Kind
    constants: Constants
    rho0: float
    u: Vec3
    k: Vec3
    omega: float
    e_k: Vec3
    e_t: Vec3
    V_P: float
    psi0: float
    C_amp: float = 1.0

    @property
    def speed(self) -> float:
        return _norm(self.u)

    @property
    def wavenumber(self) -> float:
        return _norm(self.k)

    @property
    def wavelength(self) -> float:
        return 2.0 * math.pi / self.wavenumber

    @property
    def phase_velocity(self) -> float:
        return self.omega / self.wavenumber

    @property
    def e_b(self) -> Vec3:
        """Direction of the transversal magnetic field, e_k x e_t."""
        b = np.cross(self.e_k, self.e_t)
        return (float(b[0]), float(b[1]), float(b[2]))

    @property
    def rho_bar(self) -> float:
        """Mean density over whole periods (mean of sin^2 is 1/2)."""
        return 0.5 * self.rho0

    @property
    def p0(self) -> float:
        """Longitudinal momentum-density amplitude rho0*|u|."""
        return self.rho0 * self.speed

    @property
    def phi0(self) -> float:
        """Intrinsic potential amplitude rho0*|u|^2."""
        return self.rho0 * self.speed**2

    @property
    def field_amplitude(self) -> float:
        """Amplitude |u|*sqrt(4*pi*rho0) of the transversal E and B fields."""
        return self.speed * math.sqrt(4.0 * math.pi * self.rho0)

    def validate(self) -> "ParticleSpec":
        """Check every construction invariant, raising on the first violation."""
        c = self.constants
        if not (self.rho0 > 0 and self.V_P > 0 and self.C_amp > 0):
            raise InvalidParameter("rho0, V_P and C_amp must be positive")
        speed = self.speed
        if speed == 0:
            raise ZeroVelocity("particle velocity is zero")
        if self.kind is Kind.ELECTRON and speed >= c.c0:
            raise SuperluminalElectron(f"|u| = {speed!r} >= c0 = {c.c0!r}")
        if self.kind is Kind.PHOTON and abs(speed - c.c0) > _REL_TOL * 4 * c.c0:
            raise InvalidParameter(f"photon speed {speed!r} differs from c0 = {c.c0!r}")
        if abs(_norm(self.e_k) - 1) > 1e-14 or abs(_norm(self.e_t) - 1) > 1e-14:
            raise InvalidParameter("e_k and e_t must be unit vectors")
        if abs(float(np.dot(self.e_k, self.e_t))) > 1e-14:
            raise InvalidParameter("e_t must be orthogonal to e_k")
        if abs(float(np.dot(self.u, self.e_k)) - speed) > 4 * _REL_TOL * speed:
            raise InvalidParameter("u must be parallel to e_k")
        if abs(float(np.dot(self.k, self.e_k)) - self.wavenumber) > 4 * _REL_TOL * self.wavenumber:
            raise InvalidParameter("k must be parallel to e_k")
        if abs(self.phase_velocity - speed) > 4 * _REL_TOL * speed:
            raise DispersionMismatch(
                f"omega/|k| = {self.phase_velocity!r} but |u| = {speed!r}"
            )
        if self.kind is Kind.ELECTRON:
            k_db = c.m * speed / c.hbar
            w_db = c.m * speed**2 / c.hbar
            if abs(self.wavenumber - k_db) > 4 * _REL_TOL * k_db or abs(self.omega - w_db) > 4 * _REL_TOL * w_db:
                raise DispersionMismatch("electron k, omega violate m|u|/hbar, m|u|^2/hbar")
        if abs(self.rho0 - self.C_amp * self.psi0**2) > 4 * _REL_TOL * self.rho0:
            raise InvalidParameter("rho0 must equal C_amp * psi0**2")
        return self


def _cubic_wavelength(wavenumber: float) -> float:
    return (2.0 * math.pi / wavenumber) ** 3


def make_electron(
    constants: Constants,
    rho0: float,
    u: Sequence[float],
    V_P: float | None = None,
    C_amp: float = 1.0,
) -> ParticleSpec:
    """Electron plane wave whose phase velocity equals its mechanical velocity.

    ``k = m|u|/hbar`` along ``u`` and ``omega = m|u|^2/hbar``. ``V_P``
    defaults to one cubic wavelength.
    """
    u = _vec3(u)
    speed = _norm(u)
    if speed == 0:
        raise ZeroVelocity("electron velocity must be nonzero")
    if speed >= constants.c0:
        raise SuperluminalElectron(f"|u| = {speed!r} must be below c0 = {constants.c0!r}")
    if not rho0 > 0:
        raise InvalidParameter(f"rho0 must be positive, got {rho0!r}")
    e_k = _unit(u)
    kmag = constants.m * speed / constants.hbar
    k = (kmag * e_k[0], kmag * e_k[1], kmag * e_k[2])
    omega = constants.m * speed**2 / constants.hbar
    if V_P is None:
        V_P = _cubic_wavelength(kmag)
    if not V_P > 0:
        raise InvalidParameter(f"V_P must be positive, got {V_P!r}")
    spec = ParticleSpec(
        kind=Kind.ELECTRON,
        constants=constants,
        rho0=rho0,
        u=u,
        k=k,
        omega=omega,
        e_k=e_k,
        e_t=transverse_direction(e_k),
        V_P=V_P,
        psi0=math.sqrt(rho0 / C_amp),
        C_amp=C_amp,
    )
    return spec.validate()


def make_photon(
    constants: Constants,
    rho0: float,
    e_k: Sequence[float],
    omega: float,
    V_P: float | None = None,
    C_amp: float = 1.0,
) -> ParticleSpec:
    """Photon plane wave moving at c0 along ``e_k`` with ``|k| = omega/c0``."""
    if not omega > 0:
        raise InvalidFrequency(f"omega must be positive, got {omega!r}")
    if not rho0 > 0:
        raise InvalidParameter(f"rho0 must be positive, got {rho0!r}")
    direction = _vec3(e_k)
    if _norm(direction) == 0:
        raise InvalidParameter("propagation direction must be nonzero")
    direction = _unit(direction)
    c0 = constants.c0
    kmag = omega / c0
    if V_P is None:
        V_P = _cubic_wavelength(kmag)
    if not V_P > 0:
        raise InvalidParameter(f"V_P must be positive, got {V_P!r}")
    spec = ParticleSpec(
        kind=Kind.PHOTON,
        constants=constants,
        rho0=rho0,
        u=(c0 * direction[0], c0 * direction[1], c0 * direction[2]),
        k=(kmag * direction[0], kmag * direction[1], kmag * direction[2]),
        omega=omega,
        e_k=direction,
        e_t=transverse_direction(direction),
        V_P=V_P,
        psi0=math.sqrt(rho0 / C_amp),
        C_amp=C_amp,
    )
    return spec.validate()


def detuned(spec: ParticleSpec, omega_factor: float = 1.0, k_factor: float = 1.0) -> ParticleSpec:
    """Copy of ``spec`` with omega and/or k scaled, bypassing validation.

    Used to build deliberately inconsistent models whose residuals must fail.
    """
    return dataclasses.replace(
        spec,
        omega=spec.omega * omega_factor,
        k=tuple(k_factor * x for x in spec.k),
    )


def mass_consistent_volume(constants: Constants, rho0: float) -> float:
    """Particle volume for which the integrated density rho_bar*V_P equals m."""
    return 2.0 * constants.m / rho0


@dataclass(frozen=True)
class WavePacket:
    """Superposition of N plane-wave components of one kind and one unit system."""

    components: tuple[ParticleSpec, ...]
    einstein_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise InvalidParameter("a wave packet needs at least one component")
        kinds = {c.kind for c in comps}
        if len(kinds) != 1:
            raise InvalidParameter("packet components must share one kind")
        if any(c.constants != comps[0].constants for c in comps):
            raise InvalidParameter("packet components must share one Constants instance")
        if self.kind is Kind.PHOTON:
            for i, r in enumerate(self.einstein_residuals()):
                scale = self.p_amplitudes[i] * comps[i].wavenumber
                if abs(r) > self.einstein_tol * scale:
                    raise DispersionMismatch(
                        f"component {i}: p0*k - omega/c0^2*phi0 = {r!r}"
                    )

    @property
    def kind(self) -> Kind:
        return self.components[0].kind

    @property
    def constants(self) -> Constants:
        return self.components[0].constants

    @property
    def p_amplitudes(self) -> tuple[float, ...]:
        return tuple(c.p0 for c in self.components)

    @property
    def phi_amplitudes(self) -> tuple[float, ...]:
        return tuple(c.phi0 for c in self.components)

    def einstein_residuals(self) -> tuple[float, ...]:
        """Per component ``p_i0*|k_i| - (omega_i/c0^2)*phi_i0``."""
        c0 = self.constants.c0
        return tuple(
            c.p0 * c.wavenumber - (c.omega / c0**2) * c.phi0 for c in self.components
        )

    def __len__(self) -> int:
        return len(self.components)
