import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matterwave.errors import SuperluminalBoost, UnsupportedBoostAxis
from matterwave.maxwell_verify import Identity, Method
from matterwave.model import make_constants, make_electron, make_photon
from matterwave.relativity import (
    FrameQuantities,
    boost_frame_quantities,
    boost_matrix,
    boost_sweep,
    boost_wave_equation,
    boosted_particle,
    compose_velocity,
    frame_quantities,
    make_boost,
    restore_frame_quantities,
)

from conftest import NATURAL

betas = st.floats(-0.999, 0.999)


def test_make_boost_examples():
    b = make_boost(NATURAL, 0.6)
    assert b.gamma == pytest.approx(1.25, rel=1e-15)
    z = make_boost(NATURAL, 0.0)
    assert z.gamma == 1.0
    np.testing.assert_array_equal(z.Lambda, np.eye(4))
    for V in (1.0, -1.0, 2.0):
        with pytest.raises(SuperluminalBoost):
            make_boost(NATURAL, V)


@given(betas)
def test_lambda_properties(beta):
    L = boost_matrix(beta)
    assert np.linalg.det(L) == pytest.approx(1.0, abs=1e-12 * L[0, 0] ** 2)
    np.testing.assert_allclose(L @ boost_matrix(-beta), np.eye(4), atol=1e-12 * L[0, 0] ** 2)
    eta = np.diag([1.0, -1, -1, -1])
    np.testing.assert_allclose(L.T @ eta @ L, eta, atol=1e-12 * L[0, 0] ** 2)


def test_compose_velocity_examples():
    assert compose_velocity(0.5, 0.5, 1.0) == 0.0
    assert compose_velocity(0.8, -0.8, 1.0) == pytest.approx(1.6 / 1.64, rel=1e-15)
    assert compose_velocity(1.0, 0.3, 1.0) == pytest.approx(1.0, rel=1e-15)


@given(betas, betas)
def test_compose_velocity_subluminal(u, v):
    assert abs(compose_velocity(u, v, 1.0)) <= 1.0


def test_frame_quantities_example():
    q = boost_frame_quantities(FrameQuantities(1.0, 1.0, 1.0, 0.5), make_boost(NATURAL, 0.6))
    assert q.phi0 == pytest.approx(1.25) and q.V_P == pytest.approx(0.8) and q.E0 == pytest.approx(1.0)
    same = boost_frame_quantities(FrameQuantities(2.0, 3.0, 4.0, 0.5), make_boost(NATURAL, 0.0))
    assert same == FrameQuantities(2.0, 3.0, 4.0, 0.5)


@given(st.floats(0.0, 0.999), st.floats(0.1, 10), st.floats(0.1, 10))
def test_E0_invariance(beta, phi0, V_P):
    q = FrameQuantities(1.0, phi0, V_P, 0.3)
    b = make_boost(NATURAL, beta)
    q2 = boost_frame_quantities(q, b)
    assert abs(q2.E0 - q.E0) <= 1e-12 * q.E0
    assert q2.phi0 / q.phi0 == pytest.approx(b.gamma, rel=1e-15)
    assert q2.V_P / q.V_P == pytest.approx(1 / b.gamma, rel=1e-15)


@given(st.floats(-0.99, 0.99), st.floats(-0.9, 0.9))
def test_restore_inverts_boost(beta, u):
    q = FrameQuantities(1.3, 0.7, 2.0, u)
    b = make_boost(NATURAL, beta)
    back = restore_frame_quantities(boost_frame_quantities(q, b), b)
    for f in ("rho", "phi0", "V_P"):
        assert getattr(back, f) == pytest.approx(getattr(q, f), rel=1e-12)
    assert back.u_x == pytest.approx(u, rel=1e-12, abs=1e-12)


def test_opposite_boost_is_not_the_inverse():
    # densities scale by gamma both ways, so V then -V gives gamma^2
    q = FrameQuantities(1.0, 1.0, 1.0, 0.2)
    b = make_boost(NATURAL, 0.6)
    twice = boost_frame_quantities(boost_frame_quantities(q, b), make_boost(NATURAL, -0.6))
    assert twice.phi0 == pytest.approx(b.gamma**2)
    assert twice.u_x == pytest.approx(0.2, rel=1e-12)
    assert twice.E0 == pytest.approx(q.E0, rel=1e-12)


def test_sweep_all_invariant():
    rows = boost_sweep(frame_quantities(make_electron(NATURAL, 1.0, (0.5, 0, 0))), NATURAL,
                       [i / 10 for i in range(10)] + [0.99])
    assert all(r.invariant(1e-9) for r in rows)
    assert rows[6].to_dict()["gamma"] == pytest.approx(1.25)


def test_boosted_wave_equation_zero_beta_matches_rest_frame():
    s = make_electron(NATURAL, 1.0, (0.9, 0, 0))
    r = boost_wave_equation(s, make_boost(NATURAL, 0.0))
    assert r.identity is Identity.BOOSTED_WAVE_EQ_RHO
    assert r.max_residual < 1e-12 and r.extras["u_x_prime"] == 0.9


def test_boosted_wave_equation_analytic_and_fd():
    s = make_electron(NATURAL, 1.0, (0.9, 0, 0))
    b = make_boost(NATURAL, 0.5)
    a = boost_wave_equation(s, b)
    assert a.max_residual < 1e-12 and a.passed
    assert a.extras["u_x_prime"] == pytest.approx(0.4 / 0.55, rel=1e-15)
    assert a.extras["c_ph_residual"] == pytest.approx(0.0, abs=1e-15)
    assert a.extras["operator_scaling"] == pytest.approx(0.75)
    f = boost_wave_equation(s, b, method=Method.FINITE_DIFFERENCE)
    assert 3.5 <= f.convergence_ratio <= 4.5 and f.passed


def test_boosted_photon_doppler():
    p = make_photon(NATURAL, 1.0, (1, 0, 0), 2.0)
    b = make_boost(NATURAL, 0.6)
    moved = boosted_particle(p, b)
    assert moved.omega == pytest.approx(2.0 * math.sqrt(0.4 / 1.6), rel=1e-14)
    assert moved.speed == 1.0
    assert boost_wave_equation(p, b).passed


def test_density_factor_override():
    s = make_electron(NATURAL, 1.0, (0.9, 0, 0))
    b = make_boost(NATURAL, 0.5)
    assert boosted_particle(s, b, density_factor=1.0).rho0 == 1.0
    assert boosted_particle(s, b).rho0 == pytest.approx(b.gamma)


def test_off_axis_rejected(electron):
    with pytest.raises(UnsupportedBoostAxis):
        boosted_particle(electron, make_boost(NATURAL, 0.5))
