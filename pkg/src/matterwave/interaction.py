"""Electron-photon interaction bookkeeping and the transfer-rate relations."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidFrequency, InvalidParameter, SuperluminalElectron
from .model import Constants


@dataclass(frozen=True)
class InteractionState:
    """Hamiltonian densities before and during interaction.

    ``H_w`` keeps the sign of H - H0 (non-positive); ``rho_ph0`` is built from
    its magnitude so the photon density stays non-negative. ``sign_tension``
    records that the balance equates -rho_el0*xdot^2 with a non-negative
    photon energy density.
    """

    rho_el0: float
    xdot: float
    phi_ext: float
    sigma_el0: float
    H0: float
    H: float
    H_w: float
    rho_ph0: float
    c0: float

    @property
    def photon_energy_density(self) -> float:
        return self.rho_ph0 * self.c0**2

    @property
    def sign_tension(self) -> bool:
        return self.H_w < 0

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in
             ("rho_el0", "xdot", "phi_ext", "sigma_el0", "H0", "H", "H_w", "rho_ph0")}
        d["sign_tension"] = self.sign_tension
        return d


def hamiltonian_balance(
    rho_el0: float,
    xdot: float,
    sigma_el0: float,
    phi_ext: float,
    constants: Constants,
) -> InteractionState:
    """H0 = rho_el0 xdot^2 + sigma phi, H = sigma phi, H_w = H - H0 = -rho_el0 xdot^2."""
    if not rho_el0 > 0:
        raise InvalidParameter(f"rho_el0 must be positive, got {rho_el0!r}")
    if abs(xdot) >= constants.c0:
        raise SuperluminalElectron(f"|xdot| = {abs(xdot)!r} must be below c0")
    kinetic = rho_el0 * xdot**2
    H0 = kinetic + sigma_el0 * phi_ext
    H = sigma_el0 * phi_ext
    # closed form of H - H0; the difference cancels badly when sigma*phi >> kinetic
    H_w = -kinetic
    return InteractionState(
        rho_el0=rho_el0, xdot=xdot, phi_ext=phi_ext, sigma_el0=sigma_el0,
        H0=H0, H=H, H_w=H_w, rho_ph0=abs(H_w) / constants.c0**2, c0=constants.c0,
    )


def transfer_rate(constants: Constants, nu: float) -> float:
    """Energy transfer rate h*nu^2 (one quantum h*nu per period 1/nu)."""
    if not nu > 0:
        raise InvalidFrequency(f"nu must be positive, got {nu!r}")
    return constants.h * nu**2


@dataclass(frozen=True)
class TransferSpec:
    A_cross: float
    nu: float
    wavelength: float
    alpha_frac: float = 1.0

    def __post_init__(self):
        for name in ("A_cross", "nu", "wavelength", "alpha_frac"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidParameter(f"{name} must be positive, got {v!r}")

    @property
    def tau(self) -> float:
        return 1.0 / self.nu

    @property
    def volume(self) -> float:
        """Interaction volume swept in one period, A*lambda."""
        return self.A_cross * self.wavelength


@dataclass(frozen=True)
class TransferResult:
    dW: float
    quantum: float
    rate: float

    @property
    def residual(self) -> float:
        return self.dW - self.quantum


def transfer_quantum(spec: TransferSpec, rho_ph0: float, constants: Constants) -> TransferResult:
    """Energy passed through the cross-section in one period.

    dW = A dt rho_ph0 c0^2 with dt = tau and the swept volume A*lambda:
    dW = A*lambda*rho_ph0*c0^2. ``quantum`` is alpha_frac*h*nu, which dW
    equals when rho_ph0*c0^2 = h*nu/(A*lambda).
    """
    if rho_ph0 < 0:
        raise InvalidParameter(f"rho_ph0 must be non-negative, got {rho_ph0!r}")
    dW = spec.volume * rho_ph0 * constants.c0**2
    return TransferResult(dW=dW, quantum=spec.alpha_frac * constants.h * spec.nu, rate=dW / spec.tau)


def quantum_density(spec: TransferSpec, constants: Constants) -> float:
    """Photon density amplitude carrying exactly one quantum h*nu in A*lambda."""
    return constants.h * spec.nu / (spec.volume * constants.c0**2)
