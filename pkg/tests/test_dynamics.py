import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import radial_return_time

from lagcap.corpus import load_hamiltonian
from lagcap.dynamics.admissibility import energy_drift, product_chord_correspondence, weinstein_chords_are_constant
from lagcap.dynamics.expr import compile_expression, parse_expression
from lagcap.dynamics.flow import IntegratorConfig, chord_scan, flow, midpoint_step, shortest_chord
from lagcap.dynamics.models import (
    BetaCutoff,
    RadialProfile,
    circle_beta,
    custom_model,
    fiber_cutoff,
    model_from_dict,
    product_extend,
    radial_model,
    smoothstep,
    smoothstep_d,
    smoothstep_int,
    weinstein_extend,
)
from lagcap.errors import FormatError, ProfileInvalid, StepFailure

SLOW = RadialProfile.single(0.1, 1.0, math.pi / 4, 0.1)


# -- expression grammar ----------------------------------------------------------------

@pytest.mark.parametrize("text, value", [
    ("x1 + 2*y1", 1 + 2 * 2),
    ("x1^2 + pow(y1, 3)", 1 + 8),
    ("exp(-(x1**2))", math.exp(-1)),
    ("-x1/4 + pi", -0.25 + math.pi),
])
def test_expression_values(text, value):
    cf = compile_expression(text, 1)
    assert cf.value(np.array([[1.0, 2.0]]))[0] == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "x1.real", "sin(x1)", "x3", "q", "x1 if y1 else 0",
                                  "lambda: 1", "x1 +", "True", "'a'"])
def test_expression_rejected(text):
    with pytest.raises(FormatError):
        parse_expression(text, 2)


def test_constant_expression_broadcasts():
    cf = compile_expression("0.5", 2)
    z = np.zeros((3, 4))
    assert cf.value(z).tolist() == [0.5] * 3
    assert cf.gradient(z).shape == (3, 4) and not cf.gradient(z).any()


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=4, max_size=4))
def test_expression_gradient_matches_sympy(pt):
    text = "x1*y2 - exp(-(x2^2 + y1^2)) + x1^3/3"
    cf = compile_expression(text, 2)
    syms = sp.symbols("x1 x2 y1 y2", real=True)
    expr = sp.sympify(text.replace("^", "**"), locals=dict(zip(map(str, syms), syms)))
    grad = [float(sp.diff(expr, s).subs(dict(zip(syms, pt)))) for s in syms]
    assert np.allclose(cf.gradient(np.array([pt]))[0], grad, atol=1e-12)


# -- profiles and cutoffs -----------------------------------------------------------------

def test_smoothstep_ends():
    assert smoothstep(0.0) == 0.0 and smoothstep(1.0) == 1.0
    assert smoothstep_d(0.0) == 0.0 and smoothstep_d(1.0) == 0.0
    assert smoothstep_int(1.0) == pytest.approx(0.5)


def test_profile_closed_forms():
    p = SLOW
    assert p.maximum == pytest.approx(math.pi / 4 * 0.8)
    assert p.support == 1.0 and p.plateau == 0.1
    assert p.h(1.0) == pytest.approx(0.0, abs=1e-15) and p.h(5.0) == 0.0
    assert p.dh(0.5) == pytest.approx(-math.pi / 4)
    assert p.critical_levels() == pytest.approx([p.maximum, 0.0])


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 1.2))
def test_profile_derivatives(rho):
    p = RadialProfile((SLOW.segments[0],), 0.1)
    e = 1e-6
    assert (p.h(rho + e) - p.h(rho - e)) / (2 * e) == pytest.approx(float(p.dh(rho)), abs=1e-6)
    assert (p.dh(rho + e) - p.dh(rho - e)) / (2 * e) == pytest.approx(float(p.d2h(rho)), abs=1e-4)


def test_profile_validation():
    with pytest.raises(ProfileInvalid):
        RadialProfile.single(0.1, 0.15, 1.0, 0.1)
    with pytest.raises(ProfileInvalid):
        RadialProfile.single(0.1, 1.0, -1.0, 0.1)
    with pytest.raises(ProfileInvalid):
        RadialProfile.single(0.1, 1.0, 1.0, 0.0)


def test_fiber_cutoff_endpoints():
    phi, _ = fiber_cutoff(0.5, 1.0)
    assert phi(0.5) == 1.0 and phi(1.0) == 0.0
    with pytest.raises(ProfileInvalid):
        fiber_cutoff(1.0, 0.5)


def test_weinstein_extension():
    m = weinstein_extend(SLOW, 0.5, 1.0)
    assert m.m_closed_form == pytest.approx(SLOW.maximum)
    z = np.array([[0.2, 0.3], [0.2, 1.5]])
    assert m.H(z)[0] == pytest.approx(float(SLOW.h(0.04)))
    assert m.H(z)[1] == 0.0
    zero = weinstein_extend(RadialProfile((), 0.1), 0.5, 1.0)
    assert not zero.H(np.random.default_rng(0).normal(size=(20, 2))).any()


def test_product_extension():
    eps = 0.1
    beta = circle_beta(eps)
    m = product_extend(SLOW, eps, beta)
    r = math.sqrt(eps / math.pi)
    on_L = np.array([[r, 0.3, 0.0, 0.0]])
    assert beta.value(r * r) == 1.0
    assert m.H(on_L)[0] == pytest.approx(float(SLOW.h(0.09)))
    far = np.array([[1.0, 0.3, 0.0, 0.0]])
    assert m.H(far)[0] == pytest.approx(SLOW.maximum)
    plain = product_extend(SLOW, eps, None)
    assert plain.H(far)[0] == pytest.approx(float(SLOW.h(0.09)))


def test_product_file_needs_matching_circle():
    obj = load_hamiltonian("product").to_dict()
    obj["lagrangian"]["radius"] = 0.5
    with pytest.raises(FormatError):
        model_from_dict(obj)


@pytest.mark.parametrize("family", ["radial-slow", "weinstein", "product", "custom-bump"])
def test_gradients_match_finite_differences(family):
    m = load_hamiltonian(family)
    rng = np.random.default_rng(1)
    z = rng.uniform(-0.8 * m.extent, 0.8 * m.extent, size=(25, m.dim))
    fd = np.zeros_like(z)
    for k in range(m.dim):
        e = np.zeros(m.dim)
        e[k] = 1e-6
        fd[:, k] = (m.H(z + e) - m.H(z - e)) / 2e-6
    assert np.allclose(fd, m.gradient(z), atol=1e-6)


def test_custom_model_compact_support():
    m = custom_model("1 + x1", 1, 1.0)
    assert m.H(np.array([[1.0, 0.0], [0.0, 1.1]])).tolist() == [0.0, 0.0]
    assert m.H(np.array([[0.5, 0.0]]))[0] == pytest.approx(1.5)


# -- integrator and chords -------------------------------------------------------------

def test_zero_hamiltonian_is_constant():
    m = radial_model(RadialProfile((), 0.1))
    traj = flow(m, [0.3, 0.2], 1.0)
    assert np.all(traj.states == traj.states[0])
    chords = chord_scan(m, 2.0, grid=9)
    assert chords and all(c.constant for c in chords)


def test_critical_point_is_constant():
    m = radial_model(SLOW)
    traj = flow(m, [0.0, 0.0], 1.0)
    assert np.max(np.abs(traj.states)) < 1e-6


def test_rotation_speed_convention():
    """X = (-H_y, H_x): a radial H with h' = -s turns (x, 0) clockwise at angular speed 2s."""
    m = radial_model(SLOW)
    z = np.array([[0.6, 0.0]])
    h = 1e-3
    z1 = midpoint_step(m, z, h, IntegratorConfig())
    angle = math.atan2(z1[0, 1], z1[0, 0])
    assert angle == pytest.approx(-2 * math.pi / 4 * h, rel=1e-6)


def test_step_failure_on_stiff_field():
    m = custom_model("exp(40*x1^2)", 1, 2.0)
    with pytest.raises(StepFailure):
        midpoint_step(m, np.array([[1.4, 0.1]]), 0.5, IntegratorConfig(max_iter=5))


@pytest.mark.parametrize("slope, T", [(math.pi / 4, 2.0), (math.pi, 0.5)])
def test_return_time_closed_form(slope, T):
    m = radial_model(RadialProfile.single(0.1, 1.0, slope, 0.1))
    chords = chord_scan(m, T + 0.2, seeds=np.array([[0.7, 0.0], [-0.8, 0.0]]))
    assert [c.return_time for c in chords] == pytest.approx([T, T], abs=1e-6)
    assert radial_return_time(slope) == pytest.approx(T)


def test_richardson_improves():
    m = radial_model(RadialProfile.single(0.1, 1.0, 1.0, 0.1))
    seed = np.array([[0.7, 0.0]])
    exact = radial_return_time(1.0)
    plain = chord_scan(m, 2.0, seeds=seed, config=IntegratorConfig(richardson=False))[0]
    extr = chord_scan(m, 2.0, seeds=seed)[0]
    assert abs(extr.return_time - exact) < abs(plain.return_time - exact)
    assert abs(extr.return_time - exact) < 1e-8


def test_shortest_chord():
    m = radial_model(RadialProfile.single(0.1, 1.0, math.pi, 0.1))
    short = shortest_chord(chord_scan(m, 1.0, grid=17))
    assert short.return_time == pytest.approx(0.5, abs=1e-6)
    assert shortest_chord([]) is None


@pytest.mark.parametrize("name", ["radial-slow", "radial-test", "weinstein", "product"])
def test_energy_drift(name):
    m = load_hamiltonian(name)
    z0 = np.full(m.dim, 0.25 * m.extent)
    assert energy_drift(m, z0, 1.0) < 1e-8


def test_weinstein_chords_constant():
    ok, n_const = weinstein_chords_are_constant(load_hamiltonian("weinstein"), 1.0, grid=17)
    assert ok and n_const > 0


def test_product_chords_correspond():
    factor = RadialProfile.single(0.05, 0.5, 1.25, 0.05)
    prod = product_extend(factor, 0.1, circle_beta(0.1))
    cc = product_chord_correspondence(prod, radial_model(factor), 1.8, grid=6,
                                      config=IntegratorConfig(step=2e-3))
    assert cc.ok and cc.pairs > 0
