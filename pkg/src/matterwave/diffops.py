"""Central finite-difference operators on 4D (x, y, z, t) sample arrays.

Every operator acts on the last four axes and returns values on the interior
only: ``order // 2`` points are dropped from each side of *all four* axes,
whichever axis is differentiated, so results of different operators at the
same nesting depth line up point for point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmall, InvalidParameter, UnknownChannel

# (offset, weight) pairs; derivative = sum(w * f[i + offset]) / spacing**deriv
_STENCILS = {
    (1, 2): ((-1, -0.5), (1, 0.5)),
    (2, 2): ((-1, 1.0), (0, -2.0), (1, 1.0)),
    (1, 4): ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)),
    (2, 4): ((-2, -1 / 12), (-1, 16 / 12), (0, -30 / 12), (1, 16 / 12), (2, -1 / 12)),
}


@dataclass(frozen=True)
class StencilConfig:
    order: int = 2
    h: float = 1.0
    dt: float = 1.0

    def __post_init__(self):
        if self.order not in (2, 4):
            raise InvalidParameter(f"order must be 2 or 4, got {self.order!r}")
        if not (self.h > 0 and self.dt > 0):
            raise InvalidParameter("h and dt must be positive")

    @property
    def halo(self) -> int:
        return self.order // 2

    def spacing(self, axis: int) -> float:
        return self.dt if axis == 3 else self.h

    @classmethod
    def for_grid(cls, grid, order: int = 2) -> "StencilConfig":
        return cls(order=order, h=grid.h, dt=grid.dt)


def _resolve(field, channel):
    if channel is None:
        return np.asarray(field, dtype=float)
    if isinstance(channel, str):
        return field.channel(channel)
    raise UnknownChannel(repr(channel))


def crop(f: np.ndarray, n: int) -> np.ndarray:
    """Drop ``n`` points from both ends of each of the last four axes."""
    if n == 0:
        return f
    idx = (Ellipsis,) + (slice(n, -n),) * 4
    return f[idx]


def _check_size(f: np.ndarray, cfg: StencilConfig) -> None:
    if f.ndim < 4 or min(f.shape[-4:]) < cfg.order + 1:
        raise GridTooSmall(f"need >= {cfg.order + 1} points per axis, got shape {f.shape}")


def _partial(f: np.ndarray, axis: int, deriv: int, cfg: StencilConfig) -> np.ndarray:
    _check_size(f, cfg)
    r = cfg.halo
    ax = f.ndim - 4 + axis
    base = [slice(None)] * (f.ndim - 4) + [slice(r, n - r) for n in f.shape[-4:]]
    out = None
    for offset, weight in _STENCILS[(deriv, cfg.order)]:
        idx = list(base)
        n = f.shape[ax]
        idx[ax] = slice(r + offset, n - r + offset)
        term = weight * f[tuple(idx)]
        out = term if out is None else out + term
    return out / cfg.spacing(axis) ** deriv


def d_dx(f, axis: int, cfg: StencilConfig, channel=None) -> np.ndarray:
    """First derivative along axis 0, 1, 2 (space) or 3 (time)."""
    return _partial(_resolve(f, channel), axis, 1, cfg)


def d_dt(f, cfg: StencilConfig, channel=None) -> np.ndarray:
    return _partial(_resolve(f, channel), 3, 1, cfg)


def d2_dt2(f, cfg: StencilConfig, channel=None) -> np.ndarray:
    return _partial(_resolve(f, channel), 3, 2, cfg)


def laplacian(f, cfg: StencilConfig, channel=None) -> np.ndarray:
    f = _resolve(f, channel)
    return sum(_partial(f, a, 2, cfg) for a in range(3))


def grad(f, cfg: StencilConfig, channel=None) -> np.ndarray:
    """Spatial gradient; the component axis is prepended."""
    f = _resolve(f, channel)
    return np.stack([_partial(f, a, 1, cfg) for a in range(3)])


def div(F: np.ndarray, cfg: StencilConfig) -> np.ndarray:
    """Divergence of a vector field of shape (3, nx, ny, nz, nt)."""
    return sum(_partial(F[a], a, 1, cfg) for a in range(3))


def curl(F: np.ndarray, cfg: StencilConfig) -> np.ndarray:
    d = lambda comp, axis: _partial(F[comp], axis, 1, cfg)
    return np.stack([
        d(2, 1) - d(1, 2),
        d(0, 2) - d(2, 0),
        d(1, 0) - d(0, 1),
    ])


def restrict_to_shared(coarse: np.ndarray, fine: np.ndarray, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Values of two interior arrays at the lattice points both grids share.

    ``coarse`` and ``fine`` are results on grids with equal point counts and
    a common origin, the fine one at half the spacing, each cropped by
    ``depth`` points per side. Coarse index i coincides with fine index 2i.
    """
    ci, fi = [slice(None)] * (coarse.ndim - 4), [slice(None)] * (fine.ndim - 4)
    for n_int in coarse.shape[-4:]:
        n = n_int + 2 * depth
        hi = (n - 1 - depth) // 2
        if hi < depth:
            raise GridTooSmall("no shared interior points between the two grids")
        ci.append(slice(0, hi - depth + 1))
        fi.append(slice(depth, 2 * hi - depth + 1, 2))
    return coarse[tuple(ci)], fine[tuple(fi)]


def observed_order(ratio: float, refinement: float = 2.0) -> float:
    return math.log(ratio) / math.log(refinement)


def ratio_window(order: int, slack: float | None = None) -> tuple[float, float]:
    """Acceptable error ratios for one halving of the spacing.

    Order 2 uses [3.5, 4.5]; order 4 uses 2**(4 +- 0.3).
    """
    if order == 2 and slack is None:
        return (3.5, 4.5)
    slack = 0.3 if slack is None else slack
    return (2.0 ** (order - slack), 2.0 ** (order + slack))
