import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from matterwave.errors import GridTooSmall, UnknownChannel
from matterwave.fields import (
    CHANNELS,
    CSV_COLUMNS,
    GridGeometry,
    eval_A,
    eval_channels,
    eval_EB,
    eval_p,
    eval_packet,
    eval_phi_intrinsic,
    eval_phi_total,
    eval_psi,
    eval_rho,
    eval_sample,
    read_csv,
    sample_grid,
)
from matterwave.model import WavePacket, make_constants, make_electron, make_photon

from conftest import NATURAL, particles


def _at_phase(spec, theta):
    """A point on the e_k axis where the phase equals theta at t = 0."""
    return np.asarray(spec.e_k) * theta / spec.wavenumber


def test_psi_examples():
    el = make_electron(make_constants("natural", {"m": 2.0}), 1.0, (0.5, 0, 0))  # |k| = 1
    assert eval_psi(el, (0, 0, 0), 0.0) == 0.0
    assert eval_psi(el, (math.pi / 2, 0, 0), 0.0) == pytest.approx(1.0, abs=1e-15)
    ph = make_photon(NATURAL, 1.0, (1, 0, 0), 2.0)
    assert eval_psi(ph, (math.pi / 2, 0, 0), 0.0) == pytest.approx(0.0, abs=1e-15)


def test_rho_and_p_examples():
    c = make_constants("natural", {"c0": 10})
    s = make_electron(c, 2.0, (1, 0, 0), V_P=1.0)
    assert eval_rho(s, _at_phase(s, 0), 0) == 0
    assert eval_rho(s, _at_phase(s, math.pi / 2), 0) == pytest.approx(2.0, rel=1e-15)
    np.testing.assert_allclose(eval_p(s, _at_phase(s, math.pi / 2), 0), [2, 0, 0], rtol=1e-15)
    np.testing.assert_array_equal(eval_p(s, _at_phase(s, 0), 0), [0, 0, 0])


def test_rho_wavelength_average_quadrature(electron):
    # independent oracle: adaptive quadrature of rho along e_k over one wavelength
    lam = electron.wavelength
    e_k = np.asarray(electron.e_k)
    val, _ = integrate.quad(lambda s: float(eval_rho(electron, s * e_k, 0.0)), 0, lam, limit=200)
    assert val / lam == pytest.approx(electron.rho0 / 2, rel=1e-10)


def test_p_bound_random(electron):
    rng = np.random.default_rng(0)
    X = rng.uniform(-20, 20, (10_000, 3))
    t = rng.uniform(-5, 5, 10_000)
    assert np.all(np.linalg.norm(eval_p(electron, X, t), axis=-1) <= electron.rho0 * electron.speed * (1 + 1e-15))


def test_potential_examples(electron):
    amp = electron.rho0 * electron.speed**2
    assert eval_phi_intrinsic(electron, _at_phase(electron, 0), 0) == pytest.approx(amp, rel=1e-15)
    assert eval_phi_intrinsic(electron, _at_phase(electron, math.pi / 2), 0) == pytest.approx(0, abs=1e-15)


def test_transversal_field_examples():
    s = make_photon(NATURAL, 1.0, (1, 0, 0), 1.0)
    E, B = eval_EB(s, (0, 0, 0), 0)
    assert np.linalg.norm(E) == pytest.approx(math.sqrt(4 * math.pi), rel=1e-15)
    assert (E @ E + B @ B) / (8 * math.pi) == pytest.approx(s.phi0, rel=1e-14)
    E, B = eval_EB(s, _at_phase(s, math.pi / 2), 0)
    assert np.linalg.norm(E) < 1e-15 and np.linalg.norm(B) < 1e-15


def test_vector_potential_examples():
    s = make_electron(make_constants("natural", {"c0": 1.0}), 2.0, (0.5, 0, 0))
    A = eval_A(s, _at_phase(s, math.pi / 2), 0)
    np.testing.assert_allclose(A, [-1.0, 0, 0], rtol=1e-15)  # -c0*rho0*u
    np.testing.assert_array_equal(eval_A(s, (0, 0, 0), 0), [0, 0, 0])


@given(particles, st.integers(0, 2**32 - 1))
def test_pointwise_invariants(spec, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-10, 10, (500, 3))
    t = rng.uniform(-10, 10, 500)
    const = spec.rho0 * spec.speed**2
    np.testing.assert_allclose(eval_phi_total(spec, X, t), const, rtol=1e-12)
    assert np.all(eval_rho(spec, X, t) >= 0)
    E, B = eval_EB(spec, X, t)
    e_k = np.asarray(spec.e_k)
    scale = spec.field_amplitude
    assert np.max(np.abs(E @ e_k)) <= 1e-14 * scale
    assert np.max(np.abs(B @ e_k)) <= 1e-14 * scale
    assert np.max(np.abs(np.sum(E * B, axis=-1))) <= 1e-14 * scale**2
    np.testing.assert_allclose(np.linalg.norm(E, axis=-1), np.linalg.norm(B, axis=-1), rtol=1e-14, atol=1e-14 * scale)
    em = (np.sum(E * E, -1) + np.sum(B * B, -1)) / (8 * math.pi)
    np.testing.assert_allclose(em, eval_phi_intrinsic(spec, X, t), rtol=1e-12, atol=1e-12 * const)
    A = eval_A(spec, X, t)
    assert np.all(A @ np.asarray(spec.u) <= 1e-15 * const)


def test_packet_additive_and_degenerate():
    a = make_photon(NATURAL, 1.0, (1, 0, 0), 1.0)
    b = make_photon(NATURAL, 0.5, (0, 1, 1), 2.5)
    rng = np.random.default_rng(1)
    X = rng.uniform(-3, 3, (50, 3))
    t = rng.uniform(0, 2, 50)
    for x, ti in zip(X[:5], t[:5]):
        single = eval_sample(a, x, ti)
        assert eval_packet(WavePacket((a,)), x, ti).rho == single.rho
        two = eval_packet(WavePacket((a, a)), x, ti)
        np.testing.assert_allclose(two.p, 2 * single.p, rtol=1e-13, atol=1e-15)
    ab = eval_channels(WavePacket((a, b)), X, t)
    ca, cb = eval_channels(a, X, t), eval_channels(b, X, t)
    for name in CHANNELS:
        np.testing.assert_allclose(ab[name], ca[name] + cb[name], rtol=1e-13, atol=1e-13)


def test_grid_sampling_deterministic_and_nonnegative(photon, monkeypatch):
    geo = GridGeometry(0.3, 0.1, (8, 8, 8, 8))
    g1 = sample_grid(photon, geo)
    monkeypatch.setenv("MW_NO_PARALLEL", "1")
    g2 = sample_grid(photon, geo)
    for name in CHANNELS:
        np.testing.assert_array_equal(g1.channel(name), g2.channel(name))
    assert g1.channel("rho").size == 4096
    assert np.all(g1.channel("rho") >= 0)
    assert g1.vector("E").shape == (3, 8, 8, 8, 8)
    with pytest.raises(UnknownChannel):
        g1.channel("nope")


def test_grid_too_small():
    with pytest.raises(GridTooSmall):
        GridGeometry(0.1, 0.1, (3, 8, 8, 8))


def test_csv_roundtrip(electron):
    geo = GridGeometry(0.4, 0.2, (5, 5, 6, 5), origin=(1.0, -1.0, 0.5), t0=0.3)
    grid = sample_grid(electron, geo)
    text = grid.to_csv_string()
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert text == sample_grid(electron, geo).to_csv_string()
    cols = read_csv(text)
    assert len(cols["x"]) == 5 * 5 * 6 * 5
    np.testing.assert_array_equal(cols["rho"], grid.channel("rho").ravel())
    # row-major x, y, z, t: t varies fastest
    assert cols["t"][1] == pytest.approx(0.5) and cols["x"][1] == 1.0
    s = grid.sample((1, 2, 3, 4))
    assert s.rho == pytest.approx(float(eval_rho(electron, s.x, s.t)), rel=1e-15, abs=1e-300)
