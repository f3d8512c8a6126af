"""Closed-form field evaluators for plane-wave particles and wave packets.

All evaluators take positions ``x`` with a trailing axis of length 3 and times
``t`` broadcastable against ``x[..., 0]``. The phase is ``k.x - omega*t``.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO, Union

import numpy as np

from .errors import GridTooSmall, InvalidParameter, UnknownChannel
from .model import ParticleSpec, WavePacket

Source = Union[ParticleSpec, WavePacket]

CSV_COLUMNS = (
    "x", "y", "z", "t", "psi", "rho", "px", "py", "pz", "phi",
    "Ex", "Ey", "Ez", "Bx", "By", "Bz", "Ax", "Ay", "Az",
)
CHANNELS = CSV_COLUMNS[4:]
VECTOR_CHANNELS = {"p": ("px", "py", "pz"), "E": ("Ex", "Ey", "Ez"),
                   "B": ("Bx", "By", "Bz"), "A": ("Ax", "Ay", "Az")}

MIN_DIM = 5


def components(source: Source) -> tuple[ParticleSpec, ...]:
    if isinstance(source, WavePacket):
        return source.components
    return (source,)


def phase(spec: ParticleSpec, x, t):
    x = np.asarray(x, dtype=float)
    return x @ np.asarray(spec.k) - spec.omega * np.asarray(t, dtype=float)


def eval_psi(spec: ParticleSpec, x, t):
    return spec.psi0 * np.sin(phase(spec, x, t))


def eval_rho(spec: ParticleSpec, x, t):
    return spec.rho0 * np.sin(phase(spec, x, t)) ** 2


def eval_p(spec: ParticleSpec, x, t):
    """Longitudinal momentum density rho*u."""
    return eval_rho(spec, x, t)[..., None] * np.asarray(spec.u)


def eval_phi_intrinsic(spec: ParticleSpec, x, t):
    """Periodic intrinsic potential rho0*|u|^2*cos^2(phase)."""
    return spec.phi0 * np.cos(phase(spec, x, t)) ** 2


def eval_phi_total(spec: ParticleSpec, x, t):
    """rho*|u|^2 + phi; constant at rho0*|u|^2 for a valid particle."""
    return eval_rho(spec, x, t) * spec.speed**2 + eval_phi_intrinsic(spec, x, t)


def eval_EB(spec: ParticleSpec, x, t):
    """Transversal electric and magnetic fields (in dynamical units).

    E points along e_t and B along e_k x e_t, both with amplitude
    |u|*sqrt(4*pi*rho0) and a first-power cosine of the phase.
    """
    c = np.cos(phase(spec, x, t))[..., None] * spec.field_amplitude
    return c * np.asarray(spec.e_t), c * np.asarray(spec.e_b)


def eval_EB_intrinsic(spec: ParticleSpec, x, t):
    """Fields defined from p and phi: E = (-grad phi + dp/dt)/sigma_bar, B = -curl(p)/sigma_bar.

    Closed forms for the plane wave: both are proportional to sin(2*phase);
    E is along |u|^2 k - omega u and B along k x u, so both vanish when u is
    parallel to k and omega = |k||u|.
    """
    s2 = np.sin(2.0 * phase(spec, x, t))[..., None]
    k = np.asarray(spec.k)
    u = np.asarray(spec.u)
    scale = spec.rho0 / spec.constants.sigma_bar
    E = s2 * (scale * (spec.speed**2 * k - spec.omega * u))
    B = s2 * (-scale * np.cross(k, u))
    return E, B


def eval_A(spec: ParticleSpec, x, t):
    return -spec.constants.c0 * eval_p(spec, x, t)


@dataclass(frozen=True)
class FieldSample:
    x: np.ndarray
    t: float
    psi: float
    rho: float
    p: np.ndarray
    phi: float
    E: np.ndarray
    B: np.ndarray
    A: np.ndarray


def _channel_arrays(spec: ParticleSpec, x, t, wanted: Iterable[str]) -> dict[str, np.ndarray]:
    wanted = set(wanted)
    th = phase(spec, x, t)
    s = np.sin(th)
    c = np.cos(th)
    out: dict[str, np.ndarray] = {}
    if "psi" in wanted:
        out["psi"] = spec.psi0 * s
    rho = spec.rho0 * s * s
    if "rho" in wanted:
        out["rho"] = rho
    if "phi" in wanted:
        out["phi"] = spec.phi0 * c * c
    amp = spec.field_amplitude * c
    vec = {"p": (rho, spec.u), "E": (amp, spec.e_t), "B": (amp, spec.e_b),
           "A": (rho, tuple(-spec.constants.c0 * ui for ui in spec.u))}
    for name, (scalar, direction) in vec.items():
        for comp, d in zip(VECTOR_CHANNELS[name], direction):
            if comp in wanted:
                out[comp] = scalar * d
    return out


def eval_channels(source: Source, x, t, wanted: Iterable[str] = CHANNELS) -> dict[str, np.ndarray]:
    """Evaluate named scalar channels, summing over packet components."""
    wanted = tuple(wanted)
    unknown = set(wanted) - set(CHANNELS)
    if unknown:
        raise UnknownChannel(", ".join(sorted(unknown)))
    total: dict[str, np.ndarray] | None = None
    for spec in components(source):
        part = _channel_arrays(spec, x, t, wanted)
        if total is None:
            total = part
        else:
            for name in wanted:
                total[name] = total[name] + part[name]
    return total


def eval_sample(source: Source, x, t) -> FieldSample:
    """All fields at a single spacetime point."""
    x = np.asarray(x, dtype=float)
    ch = eval_channels(source, x, t)
    vec = lambda n: np.array([float(ch[c]) for c in VECTOR_CHANNELS[n]])
    return FieldSample(
        x=x, t=float(t), psi=float(ch["psi"]), rho=float(ch["rho"]), p=vec("p"),
        phi=float(ch["phi"]), E=vec("E"), B=vec("B"), A=vec("A"),
    )


def eval_packet(packet: WavePacket, x, t) -> FieldSample:
    """Packet fields: p = sum p_i0 e_k,i sin^2, phi = sum phi_i0 cos^2, others summed."""
    return eval_sample(packet, x, t)


@dataclass(frozen=True)
class GridGeometry:
    """Uniform lattice: ``dims = (nx, ny, nz, nt)`` points from ``origin`` at ``t0``."""

    h: float
    dt: float
    dims: tuple[int, int, int, int]
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)
    t0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        if len(self.dims) != 4 or len(self.origin) != 3:
            raise InvalidParameter("dims must have 4 entries and origin 3")
        if not (self.h > 0 and self.dt > 0):
            raise InvalidParameter("h and dt must be positive")
        if min(self.dims) < MIN_DIM:
            raise GridTooSmall(f"every dimension needs >= {MIN_DIM} points, got {self.dims}")

    @property
    def spacings(self) -> tuple[float, float, float, float]:
        return (self.h, self.h, self.h, self.dt)

    def axes(self) -> list[np.ndarray]:
        return [self.origin[i] + self.h * np.arange(self.dims[i]) for i in range(3)] + [
            self.t0 + self.dt * np.arange(self.dims[3])
        ]

    def refined(self) -> "GridGeometry":
        """Same origin and point counts at half the spacing in space and time."""
        return GridGeometry(self.h / 2, self.dt / 2, self.dims, self.origin, self.t0)

    def translated(self, shift: Sequence[float], dt_shift: float = 0.0) -> "GridGeometry":
        return GridGeometry(self.h, self.dt, self.dims,
                            tuple(o + s for o, s in zip(self.origin, shift)), self.t0 + dt_shift)


def default_geometry(
    source: Source,
    dims: Sequence[int] = (32, 32, 32, 16),
    points_per_wavelength: float = 16.0,
    courant: float = 0.25,
) -> GridGeometry:
    """Lattice resolving the shortest wavelength with ``points_per_wavelength``.

    ``dt = courant*h/|u|max``. Keep ``courant`` well below 1/sqrt(3): at
    ``|u|dt = h`` the second-order space and time truncation errors of the
    wave operator cancel for axis-aligned waves, which hides the h^2 trend.
    """
    comps = components(source)
    kmax = max(c.wavenumber for c in comps)
    umax = max(c.speed for c in comps)
    h = 2 * math.pi / kmax / points_per_wavelength
    return GridGeometry(h=h, dt=courant * h / umax, dims=tuple(dims))


def _serial() -> bool:
    return os.environ.get("MW_NO_PARALLEL", "") not in ("", "0")


@dataclass(frozen=True)
class FieldGrid:
    """Dense field samples on a :class:`GridGeometry`.

    ``channels`` maps names from :data:`CHANNELS` to arrays of shape ``dims``
    indexed ``[ix, iy, iz, it]`` (row-major x, y, z, t).
    """

    geometry: GridGeometry
    channels: dict[str, np.ndarray] = field(repr=False)

    @property
    def origin(self):
        return self.geometry.origin

    @property
    def h(self) -> float:
        return self.geometry.h

    @property
    def dt(self) -> float:
        return self.geometry.dt

    @property
    def dims(self):
        return self.geometry.dims

    def channel(self, name: str) -> np.ndarray:
        try:
            return self.channels[name]
        except KeyError:
            raise UnknownChannel(name) from None

    def vector(self, name: str) -> np.ndarray:
        """Stack the three components of a vector channel, shape (3, *dims)."""
        if name not in VECTOR_CHANNELS:
            raise UnknownChannel(name)
        return np.stack([self.channel(c) for c in VECTOR_CHANNELS[name]])

    def sample(self, index: Sequence[int]) -> FieldSample:
        ix, iy, iz, it = index
        ax = self.geometry.axes()
        get = lambda n: float(self.channels[n][ix, iy, iz, it]) if n in self.channels else math.nan
        vec = lambda n: np.array([get(c) for c in VECTOR_CHANNELS[n]])
        return FieldSample(
            x=np.array([ax[0][ix], ax[1][iy], ax[2][iz]]), t=float(ax[3][it]),
            psi=get("psi"), rho=get("rho"), p=vec("p"), phi=get("phi"),
            E=vec("E"), B=vec("B"), A=vec("A"),
        )

    def coordinate_columns(self) -> list[np.ndarray]:
        mesh = np.meshgrid(*self.geometry.axes(), indexing="ij")
        return [m.ravel() for m in mesh]

    def write_csv(self, out: TextIO) -> None:
        """CSV with the fixed header; floats use shortest round-trip repr."""
        missing = [c for c in CHANNELS if c not in self.channels]
        if missing:
            raise UnknownChannel(", ".join(missing))
        out.write(",".join(CSV_COLUMNS) + "\n")
        cols = self.coordinate_columns() + [self.channels[c].ravel() for c in CHANNELS]
        table = np.column_stack(cols).tolist()
        out.writelines(",".join(map(repr, row)) + "\n" for row in table)

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def read_csv(text: str) -> dict[str, np.ndarray]:
    """Parse a field CSV back into flat column arrays."""
    lines = text.splitlines()
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected header {header!r}")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}


def sample_grid(
    source: Source,
    geometry: GridGeometry,
    channels: Iterable[str] = CHANNELS,
    parallel: bool | None = None,
) -> FieldGrid:
    """Evaluate ``channels`` on every lattice point.

    Time slices are evaluated independently (threaded unless
    ``MW_NO_PARALLEL=1``), so the result does not depend on scheduling.
    """
    channels = tuple(channels)
    xs, ys, zs, ts = geometry.axes()
    X = np.stack(np.meshgrid(xs, ys, zs, indexing="ij"), axis=-1)
    out = {name: np.empty(geometry.dims) for name in channels}

    def fill(it: int) -> None:
        part = eval_channels(source, X, ts[it], channels)
        for name in channels:
            out[name][..., it] = part[name]

    if parallel is None:
        parallel = not _serial()
    if parallel:
        with ThreadPoolExecutor(max_workers=min(8, os.cpu_count() or 1)) as pool:
            list(pool.map(fill, range(len(ts))))
    else:
        for it in range(len(ts)):
            fill(it)
    return FieldGrid(geometry, out)
