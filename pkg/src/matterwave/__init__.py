"""Plane-wave matter-wave model: field evaluation, identity checks, energetics and boosts."""

from .errors import MatterWaveError
from .fields import FieldGrid, GridGeometry, default_geometry, sample_grid
from .maxwell_verify import Identity, Method, ResidualReport, run_suite
from .model import (
    Constants,
    Kind,
    ParticleSpec,
    UnitSystem,
    WavePacket,
    make_constants,
    make_electron,
    make_photon,
)

__version__ = "0.1.0"

__all__ = [
    "Constants", "FieldGrid", "GridGeometry", "Identity", "Kind", "MatterWaveError", "Method",
    "ParticleSpec", "ResidualReport", "UnitSystem", "WavePacket", "default_geometry",
    "make_constants", "make_electron", "make_photon", "run_suite", "sample_grid",
]
