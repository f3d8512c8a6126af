"""JSON run configuration: parsing, validation and object construction.

Unknown keys are rejected at every level so a config documents exactly the
parameters that were used.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigError, MatterWaveError
from .maxwell_verify import SUITE_IDENTITIES
from .fields import GridGeometry, default_geometry
from .model import (
    Constants,
    Kind,
    ParticleSpec,
    WavePacket,
    detuned,
    make_constants,
    make_electron,
    make_photon,
)

CONFIG_VERSION = 1

_TOP_KEYS = {"version", "units", "constants", "particle", "packet", "grid", "tolerances",
             "boost", "interaction", "outputs", "seed", "order", "charge_density"}
_PARTICLE_KEYS = {"kind", "rho0", "u", "e_k", "omega", "V_P", "C_amp"}
_GRID_KEYS = {"h", "dt", "dims", "origin", "t0", "points_per_wavelength", "courant"}
_BOOST_KEYS = {"beta", "V", "betas", "density_factor", "rtol"}
_INTERACTION_KEYS = {"rho_el0", "xdot", "sigma_el0", "phi_ext", "nu", "A_cross", "wavelength", "alpha_frac"}
_OUTPUT_KEYS = {"report", "fields_csv", "boost_report"}

DEFAULT_OUTPUTS = {"report": "report.json", "fields_csv": "fields.csv", "boost_report": "boost.json"}


def _reject_unknown(section: str, data: dict, allowed: set) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object, got {type(data).__name__}")
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(extra)}")


def _number(section: str, name: str, value, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{name}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or (positive and not value > 0):
        raise ConfigError(f"{section}.{name}: expected a finite{' positive' if positive else ''} number, got {value!r}")
    return value


def _vector(section: str, name: str, value) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"{section}.{name}: expected a list of 3 numbers")
    return tuple(_number(section, name, v) for v in value)


@dataclass(frozen=True)
class ParticleConfig:
    kind: Kind
    rho0: float
    u: tuple | None = None
    e_k: tuple | None = None
    omega: float | None = None
    V_P: float | None = None
    C_amp: float = 1.0

    @classmethod
    def parse(cls, data: dict, section: str = "particle") -> "ParticleConfig":
        _reject_unknown(section, data, _PARTICLE_KEYS)
        try:
            kind = Kind(data.get("kind"))
        except ValueError:
            raise ConfigError(f"{section}.kind: expected 'electron' or 'photon', got {data.get('kind')!r}") from None
        if "rho0" not in data:
            raise ConfigError(f"{section}.rho0 is required")
        kw: dict[str, Any] = {"kind": kind, "rho0": _number(section, "rho0", data["rho0"])}
        if kind is Kind.ELECTRON:
            if "u" not in data:
                raise ConfigError(f"{section}.u is required for electrons")
            if "e_k" in data:
                raise ConfigError(f"{section}.e_k is for photons; electrons take u")
            kw["u"] = _vector(section, "u", data["u"])
        else:
            if "e_k" not in data or "omega" not in data:
                raise ConfigError(f"{section}: photons need e_k and omega")
            if "u" in data:
                raise ConfigError(f"{section}.u is for electrons; photons take e_k")
            kw["e_k"] = _vector(section, "e_k", data["e_k"])
        if data.get("omega") is not None:
            kw["omega"] = _number(section, "omega", data["omega"], positive=True)
        if data.get("V_P") is not None:
            kw["V_P"] = _number(section, "V_P", data["V_P"], positive=True)
        if "C_amp" in data:
            kw["C_amp"] = _number(section, "C_amp", data["C_amp"], positive=True)
        return cls(**kw)

    def build(self, constants: Constants) -> ParticleSpec:
        """Construct the spec; an electron ``omega`` detunes the natural frequency."""
        if self.kind is Kind.PHOTON:
            return make_photon(constants, self.rho0, self.e_k, self.omega, self.V_P, self.C_amp)
        spec = make_electron(constants, self.rho0, self.u, self.V_P, self.C_amp)
        if self.omega is not None and self.omega != spec.omega:
            spec = detuned(spec, omega_factor=self.omega / spec.omega)
        return spec


@dataclass(frozen=True)
class GridConfig:
    h: float | None = None
    dt: float | None = None
    dims: tuple = (32, 32, 32, 16)
    origin: tuple = (0.0, 0.0, 0.0)
    t0: float = 0.0
    points_per_wavelength: float = 16.0
    courant: float = 0.25

    @classmethod
    def parse(cls, data: dict) -> "GridConfig":
        _reject_unknown("grid", data, _GRID_KEYS)
        kw: dict[str, Any] = {}
        if "dims" in data:
            d = data["dims"]
            if not (isinstance(d, list) and len(d) == 4 and all(isinstance(n, int) and not isinstance(n, bool) for n in d)):
                raise ConfigError("grid.dims: expected 4 integers")
            kw["dims"] = tuple(d)
        if "origin" in data:
            kw["origin"] = _vector("grid", "origin", data["origin"])
        for name in ("h", "dt", "points_per_wavelength", "courant"):
            if name in data:
                kw[name] = _number("grid", name, data[name], positive=True)
        if "t0" in data:
            kw["t0"] = _number("grid", "t0", data["t0"])
        if ("h" in kw) != ("dt" in kw):
            raise ConfigError("grid: give both h and dt, or neither")
        return cls(**kw)

    def build(self, source) -> GridGeometry:
        if self.h is not None:
            return GridGeometry(self.h, self.dt, self.dims, self.origin, self.t0)
        g = default_geometry(source, self.dims, self.points_per_wavelength, self.courant)
        return GridGeometry(g.h, g.dt, g.dims, self.origin, self.t0)


@dataclass(frozen=True)
class BoostConfig:
    betas: tuple[float, ...]
    single: bool
    density_factor: float | None = None
    rtol: float = 1e-9

    @classmethod
    def parse(cls, data: dict, c0: float) -> "BoostConfig":
        _reject_unknown("boost", data, _BOOST_KEYS)
        given = [k for k in ("beta", "V", "betas") if k in data]
        if len(given) != 1:
            raise ConfigError("boost: give exactly one of beta, V or betas")
        if "betas" in data:
            if not isinstance(data["betas"], list) or not data["betas"]:
                raise ConfigError("boost.betas: expected a non-empty list")
            betas = tuple(_number("boost", "betas", b) for b in data["betas"])
            single = False
        elif "V" in data:
            betas = (_number("boost", "V", data["V"]) / c0,)
            single = True
        else:
            betas = (_number("boost", "beta", data["beta"]),)
            single = True
        for b in betas:
            if not abs(b) < 1:
                raise ConfigError(f"boost: |beta| = {abs(b)!r} must be below 1")
        df = data.get("density_factor")
        df = None if df is None else _number("boost", "density_factor", df, positive=True)
        rtol = _number("boost", "rtol", data.get("rtol", 1e-9), positive=True)
        return cls(betas, single, df, rtol)


@dataclass(frozen=True)
class InteractionConfig:
    rho_el0: float = 1.0
    xdot: float | None = None  # default half of c0
    sigma_el0: float = 1.0
    phi_ext: float = 0.0
    nu: float | None = None  # default omega/(2 pi) of the first component
    A_cross: float = 1.0
    wavelength: float | None = None  # default c0/nu
    alpha_frac: float = 1.0

    @classmethod
    def parse(cls, data: dict) -> "InteractionConfig":
        _reject_unknown("interaction", data, _INTERACTION_KEYS)
        kw = {}
        for name in _INTERACTION_KEYS:
            if name in data:
                kw[name] = _number("interaction", name, data[name],
                                   positive=name not in ("phi_ext", "xdot"))
        return cls(**kw)


@dataclass(frozen=True)
class RunConfig:
    raw: dict = field(repr=False, compare=False)
    constants: Constants
    particles: tuple[ParticleConfig, ...]
    is_packet: bool
    grid: GridConfig
    tolerances: dict
    boost: BoostConfig | None
    interaction: InteractionConfig
    outputs: dict
    seed: int = 0
    order: int = 2
    charge_density: float = 0.0

    def source(self):
        specs = tuple(p.build(self.constants) for p in self.particles)
        return WavePacket(specs) if self.is_packet else specs[0]

    def require_stencil_room(self) -> None:
        """Field identities nest two stencils (crop depth d = order per side); the
        h and h/2 grids then share interior points only when n >= 3d + 1."""
        need = 3 * self.order + 1
        if min(self.grid.dims) < need:
            raise ConfigError(f"grid.dims: order {self.order} needs >= {need} points per axis, "
                              f"got {list(self.grid.dims)}")

    def echo(self) -> dict:
        """Normalised config for the report: the input plus CLI overrides."""
        d = dict(self.raw)
        d["seed"] = self.seed
        d["order"] = self.order
        return d


def parse_config(data: Any, *, seed: int | None = None, order: int | None = None) -> RunConfig:
    _reject_unknown("config", data, _TOP_KEYS)
    if data.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config.version must be {CONFIG_VERSION}, got {data.get('version')!r}")
    try:
        constants = make_constants(data.get("units", "natural"), data.get("constants"))
    except (MatterWaveError, ValueError) as exc:
        raise ConfigError(f"constants: {exc}") from None
    if ("particle" in data) == ("packet" in data):
        raise ConfigError("config: give exactly one of particle or packet")
    if "packet" in data:
        if not isinstance(data["packet"], list) or not data["packet"]:
            raise ConfigError("packet: expected a non-empty list of components")
        particles = tuple(ParticleConfig.parse(p, f"packet[{i}]") for i, p in enumerate(data["packet"]))
    else:
        particles = (ParticleConfig.parse(data["particle"]),)
    tolerances = data.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise ConfigError("tolerances: expected an object")
    known = {i.value for i in SUITE_IDENTITIES} | {"analytic"}
    _reject_unknown("tolerances", tolerances, known)
    tolerances = {k: _number("tolerances", k, v, positive=True) for k, v in tolerances.items()}
    outputs = data.get("outputs", {})
    _reject_unknown("outputs", outputs, _OUTPUT_KEYS)
    for k, v in outputs.items():
        if not isinstance(v, str) or not v:
            raise ConfigError(f"outputs.{k}: expected a file name")
    seed = data.get("seed", 0) if seed is None else seed
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"seed must be a non-negative integer, got {seed!r}")
    order = data.get("order", 2) if order is None else order
    if order not in (2, 4):
        raise ConfigError(f"order must be 2 or 4, got {order!r}")
    grid = GridConfig.parse(data.get("grid", {}))
    cfg = RunConfig(
        raw=data,
        constants=constants,
        particles=particles,
        is_packet="packet" in data,
        grid=grid,
        tolerances=tolerances,
        boost=None if "boost" not in data else BoostConfig.parse(data["boost"], constants.c0),
        interaction=InteractionConfig.parse(data.get("interaction", {})),
        outputs={**DEFAULT_OUTPUTS, **outputs},
        seed=seed,
        order=order,
        charge_density=_number("config", "charge_density", data.get("charge_density", 0.0)),
    )
    try:
        cfg.source()
    except MatterWaveError as exc:
        raise ConfigError(f"particle: {exc}") from None
    return cfg


def load_config(path: str | Path, **overrides) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(data, **overrides)
