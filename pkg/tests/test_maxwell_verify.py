import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from matterwave import maxwell_verify as mv
from matterwave.errors import ZeroVelocity
from matterwave.fields import GridGeometry, default_geometry
from matterwave.maxwell_verify import Identity, Method
from matterwave.model import WavePacket, detuned, make_constants, make_electron, make_photon

from conftest import NATURAL, particles

x, y, z, t = sp.symbols("x y z t", real=True)
XS = (x, y, z)


def _grad(f):
    return sp.Matrix([sp.diff(f, v) for v in XS])


def _div(F):
    return sum(sp.diff(F[i], XS[i]) for i in range(3))


def _curl(F):
    return sp.Matrix([
        sp.diff(F[2], y) - sp.diff(F[1], z),
        sp.diff(F[0], z) - sp.diff(F[2], x),
        sp.diff(F[1], x) - sp.diff(F[0], y),
    ])


def _lap(f):
    return sum(sp.diff(f, v, 2) for v in XS)


def symbolic_residuals(spec, charge_density=0.0):
    """Residuals built from the field definitions by symbolic differentiation."""
    c = spec.constants
    k = sp.Matrix([sp.Float(v, 30) for v in spec.k])
    u = sp.Matrix([sp.Float(v, 30) for v in spec.u])
    w = sp.Float(spec.omega, 30)
    u2 = sum(v * v for v in u)
    th = k[0] * x + k[1] * y + k[2] * z - w * t
    psi = spec.psi0 * sp.sin(th)
    rho = spec.rho0 * sp.sin(th) ** 2
    p = rho * u
    phi = spec.rho0 * u2 * sp.cos(th) ** 2
    E = (-_grad(phi) + sp.diff(p, t)) / c.sigma_bar
    B = -_curl(p) / c.sigma_bar
    wave = lambda f: _lap(f) - sp.diff(f, t, 2) / u2
    return {
        Identity.WAVE_EQ_PSI: wave(psi),
        Identity.WAVE_EQ_RHO: wave(rho),
        Identity.WAVE_EQ_P: sp.Matrix([wave(pi) for pi in p]),
        Identity.CONTINUITY: _div(p) + sp.diff(rho, t),
        Identity.FARADAY: _curl(E) + sp.diff(B, t),
        Identity.AMPERE_SUBLUMINAL: sp.diff(E, t) / u2 - _curl(B),
        Identity.AMPERE_INHOMOGENEOUS: c.epsilon * sp.diff(E, t) - _curl(B) / c.mu_perm,
        Identity.DIV_B: _div(B),
        Identity.GAUSS_D: _div(c.epsilon * E) - charge_density,
        Identity.LORENTZ_CONDITION: sp.diff(phi, t) / u2 - _div(p),
    }


def _compare_with_oracle(spec, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-3, 3, (12, 3))
    ts = rng.uniform(-2, 2, 12)
    for ident, expr in symbolic_residuals(spec).items():
        f = sp.lambdify((x, y, z, t), expr, "numpy")
        ours = mv.analytic_residual(ident, spec, pts, ts)
        ref = np.array([np.asarray(f(*p, ti), dtype=float).ravel() for p, ti in zip(pts, ts)])
        ours = ours.reshape(len(pts), -1)
        scale = max(1.0, float(np.max(np.abs(ref))))
        np.testing.assert_allclose(ours, ref, atol=1e-11 * scale, err_msg=ident.value)


@pytest.mark.parametrize("spec", [
    make_electron(NATURAL, 1.0, (0.5, 0.2, 0.1)),
    make_photon(NATURAL, 2.0, (1, 1, 0), 1.5),
    make_electron(make_constants("natural", {"c0": 3.0, "sigma_bar": 2.0, "epsilon": 0.5, "mu_perm": 4.0}),
                  0.7, (1.1, -0.4, 0.9)),
], ids=["electron", "photon", "rescaled-constants"])
def test_analytic_residuals_match_symbolic_oracle(spec):
    _compare_with_oracle(spec)


@pytest.mark.parametrize("factor", [(1.1, 1.0), (1.0, 0.9), (0.8, 1.3)])
def test_detuned_residuals_match_symbolic_oracle(factor):
    spec = detuned(make_electron(NATURAL, 1.3, (0.3, 0.4, -0.2)), *factor)
    _compare_with_oracle(spec, seed=1)


@given(particles)
@settings(max_examples=25)
def test_valid_specs_have_zero_analytic_residuals(spec):
    geo = default_geometry(spec, dims=(6, 6, 6, 5))
    for ident in mv.SUITE_IDENTITIES:
        r = mv.check_identity(ident, spec, geo, Method.ANALYTIC)
        assert r.max_residual < 1e-12, ident


def test_detuned_continuity_closed_form():
    spec = make_electron(NATURAL, 1.0, (0.5, 0, 0))
    d = detuned(spec, omega_factor=1.1)
    # residual rho0 (k.u - omega') sin(2 phase); |k.u - 1.1 omega| = 0.1 omega
    r = mv.check_continuity(d, method="analytic")
    assert r.max_residual == pytest.approx(0.1 * spec.rho0 * spec.omega, rel=1e-2)
    assert not r.passed


def test_zero_velocity_rejected(electron):
    import dataclasses
    still = dataclasses.replace(electron, u=(0.0, 0.0, 0.0))
    with pytest.raises(ZeroVelocity):
        mv.analytic_residual(Identity.CONTINUITY, still, np.zeros(3), 0.0)


@pytest.mark.parametrize("kind", ["electron", "photon"])
def test_suite_passes_for_valid_specs(kind, electron, photon):
    spec = electron if kind == "electron" else photon
    reports = mv.run_suite(spec)
    assert len(reports) == 20
    assert {(r.identity, r.method) for r in reports} == {(i, m) for i in mv.SUITE_IDENTITIES for m in Method}
    assert mv.suite_passed(reports), [r.to_dict() for r in reports if not r.passed]
    for r in reports:
        if r.method is Method.FINITE_DIFFERENCE and r.convergence_ratio is not None:
            assert 3.5 <= r.convergence_ratio <= 4.5, r.identity


def test_detuned_selective_failure_pattern(electron):
    reports = {(r.identity, r.method): r for r in mv.run_suite(detuned(electron, omega_factor=1.1))}
    for m in Method:
        assert not reports[Identity.CONTINUITY, m].passed
        assert not reports[Identity.LORENTZ_CONDITION, m].passed
        assert reports[Identity.FARADAY, m].passed
        assert reports[Identity.DIV_B, m].passed


def test_order_four_convergence(electron):
    r = mv.check_wave_equation(electron, method="fd", order=4)
    lo, hi = r.extras["ratio_window"]
    assert lo <= r.convergence_ratio <= hi


def test_suite_is_translation_and_schedule_invariant(photon, monkeypatch):
    geo = default_geometry(photon, dims=(10, 10, 10, 8))
    lam = photon.wavelength
    period = 2 * math.pi / photon.omega
    moved = geo.translated(tuple(2 * lam * np.asarray(photon.e_k)), dt_shift=3 * period)
    a = mv.run_suite(photon, geo, parallel=True)
    b = mv.run_suite(photon, geo, parallel=False)
    c = mv.run_suite(photon, moved, parallel=False)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    assert [r.passed for r in a] == [r.passed for r in c]


def test_packet_suite_passes():
    packet = WavePacket((make_photon(NATURAL, 1.0, (1, 0, 0), 1.0),
                         make_photon(NATURAL, 0.5, (0, 1, 0), 1.7)))
    assert mv.suite_passed(mv.run_suite(packet))


def test_gauss_with_configured_charge(electron):
    geo = default_geometry(electron, dims=(6, 6, 6, 5))
    assert not mv.check_sources(electron, geo, which="GaussD", charge_density=0.3).passed
    assert mv.check_sources(electron, geo, which="DivB").passed


def test_photon_gauge_form_reported(photon):
    r = mv.check_lorentz_condition(photon)
    assert r.extras["gauge_form_max_residual"] < 1e-12


def test_report_schema(electron):
    d = mv.check_faraday(electron).to_dict()
    assert set(d) == {"identity", "method", "max_residual", "l2_residual", "convergence_ratio",
                      "tolerance", "passed", "paper_ref"}
    assert d["paper_ref"] == mv.FORMULAS[Identity.FARADAY]


def test_transversal_fields_consistent_only_at_unit_field_speed():
    # printed cosine fields: exact for c0 = 1 photons, not for electrons
    ph = make_photon(NATURAL, 1.0, (1, 0, 0), 1.0)
    el = make_electron(NATURAL, 1.0, (0.5, 0, 0))
    a_ph = mv.transversal_audit(ph)
    a_el = mv.transversal_audit(el)
    assert a_ph["faraday"] < 1e-12 and a_ph["ampere"] < 1e-12
    assert a_el["faraday"] > 1e-3 and a_el["ampere"] > 1e-3
    assert a_el["energy"] < 1e-12
