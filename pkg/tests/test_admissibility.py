import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagcap.corpus import load_hamiltonian
from lagcap.dynamics.admissibility import (
    FAIL,
    PASS,
    UNVERIFIED,
    Rho,
    check_admissible,
    radial_capacity_lower_bound,
    reparametrize,
)
from lagcap.dynamics.models import RadialProfile, radial_model
from lagcap.errors import AlphaTooLarge, InfeasibleRho, ProfileInvalid

GRID = 17


def test_slow_radial_admissible():
    m = load_hamiltonian("radial-slow")
    rep = check_admissible(m, 0.0, GRID)
    assert rep.admissible is True
    assert rep.m_H == pytest.approx(float(m.info["profile"].h(0.0)))


def test_fast_radial_has_short_chord():
    rep = check_admissible(load_hamiltonian("radial-fast"), 0.0, GRID)
    assert rep.admissible is False
    assert rep.conditions["1 short chords"][0] == FAIL
    assert rep.shortest.return_time == pytest.approx(0.5, abs=1e-6)


def test_extra_critical_value_fails():
    rep = check_admissible(load_hamiltonian("radial-extra-critical"), 0.0, GRID)
    assert rep.conditions["3 critical values"][0] == FAIL
    assert rep.admissible is False


def test_custom_is_unverified():
    rep = check_admissible(load_hamiltonian("custom-bump"), 0.0, 9)
    assert rep.admissible is None
    assert rep.conditions["2 max set is a ball"][0] == UNVERIFIED


def test_product_fails_on_ambient_conditions():
    rep = check_admissible(load_hamiltonian("product"), 0.0, 5)
    assert rep.conditions["4 compact support"][0] == FAIL


@pytest.mark.parametrize("name", ["radial-slow", "radial-test", "weinstein"])
@pytest.mark.parametrize("tau", [1.0, 0.5, 0.1])
def test_scaling_down_preserves_admissibility(name, tau):
    m = load_hamiltonian(name)
    assert check_admissible(m, 0.0, GRID).admissible is True
    rep = check_admissible(m.scaled(tau), 0.0, GRID)
    assert rep.admissible is True
    assert rep.m_H == pytest.approx(tau * check_admissible(m, 0.0, GRID).m_H)


def test_zero_hamiltonian_is_not_admissible():
    with pytest.raises(ProfileInvalid):
        load_hamiltonian("radial-slow").scaled(0.0)
    rep = check_admissible(radial_model(RadialProfile((), 0.1)), 0.0, GRID)
    assert rep.conditions["2 max set is a ball"][0] == FAIL
    assert rep.admissible is False


# -- reparametrization ------------------------------------------------------------------

def test_alpha_equal_to_max_is_identity():
    m = load_hamiltonian("radial-test")
    rep = reparametrize(m, m.m_closed_form, 0.5)
    z = np.random.default_rng(0).uniform(-1, 1, size=(30, 2))
    assert np.array_equal(rep.model.H(z), m.H(z))


def test_reparametrize_errors():
    m = load_hamiltonian("radial-test")
    with pytest.raises(AlphaTooLarge):
        reparametrize(m, 1.5 * m.m_closed_form, 0.5)
    with pytest.raises(AlphaTooLarge):
        reparametrize(m, 0.0, 0.5)
    with pytest.raises(InfeasibleRho):
        reparametrize(m, 0.1, 0.0)


def test_reparametrized_zero_below_cut():
    m = load_hamiltonian("radial-test")
    rep = reparametrize(m, 0.2, 0.5)
    z = np.random.default_rng(1).uniform(-2, 2, size=(400, 2))
    low = m.H(z) <= rep.rho.a
    assert low.any() and not rep.model.H(z[low]).any()
    assert rep.model.H(np.zeros((1, 2)))[0] == pytest.approx(0.2)


rhos = st.builds(lambda a, w, eta: Rho(a, a + w, eta),
                 st.floats(-2, 2), st.floats(0.01, 3), st.floats(0.01, 5))


@settings(max_examples=80, deadline=None)
@given(rhos)
def test_rho_shape(rho):
    s = np.linspace(rho.a - 1, rho.b + 1, 801)
    v = rho(s)
    assert rho(rho.a) == rho.a
    assert np.all(np.diff(v) >= -1e-12)
    assert np.all(rho.d(s) <= 1 + rho.eta)
    above = s >= rho.b
    assert np.allclose(v[above], s[above], atol=1e-9 * max(1, abs(rho.b)))
    assert np.all(v[s <= rho.a] == rho.a)


@settings(max_examples=40, deadline=None)
@given(rhos, st.floats(0, 1))
def test_rho_derivative(rho, u):
    s = rho.a + u * (rho.b - rho.a)
    e = 1e-7 * (rho.b - rho.a)
    fd = (rho(s + e) - rho(s - e)) / (2 * e)
    assert float(fd) == pytest.approx(float(rho.d(s)), abs=1e-4)


# -- capacity bound --------------------------------------------------------------------

def test_capacity_grows_with_fraction():
    lo = radial_capacity_lower_bound(1.0, 0.2, grid=GRID)
    hi = radial_capacity_lower_bound(1.0, 0.9, grid=GRID)
    assert lo.value < hi.value < hi.upper
    assert lo.report.ok and hi.report.ok


def test_capacity_scales_with_area():
    one = radial_capacity_lower_bound(1.0, 0.9, grid=GRID)
    two = radial_capacity_lower_bound(2.0, 0.9, grid=GRID)
    assert two.value == pytest.approx(4 * one.value, rel=1e-9)
    assert two.upper == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("fraction", [0.0, 1.0, 1.5, -0.1])
def test_capacity_fraction_range(fraction):
    with pytest.raises(ValueError):
        radial_capacity_lower_bound(1.0, fraction)


def test_verdict_constants():
    assert {PASS, FAIL, UNVERIFIED} == {"pass", "fail", "unverified"}
