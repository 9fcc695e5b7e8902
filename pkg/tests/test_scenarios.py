import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagcap.chainmaps import FilteredChainMap
from lagcap.corpus import load_model
from lagcap.errors import CollarViolation, PreconditionError
from lagcap.scenarios import (
    SCENARIOS,
    circle_family,
    counterexample_report,
    d1_d2_scenario,
    d_instance,
    identity_continuation,
    negative_base_case,
    negative_inductive_step,
    run_named,
    run_theorem_scenario,
    slicing_partition,
    verify_base_case,
    verify_inductive_step,
)


def test_partition_counts():
    assert len(slicing_partition(2.6, 1.0)) == 7
    assert slicing_partition(0.3, 1.0) == [0.0, 1.0]
    assert slicing_partition(0.9, 1.0) == [0.0, 0.5, 1.0]


def test_partition_rejects_resonance():
    with pytest.raises(PreconditionError):
        slicing_partition(1.0, 1.0)
    with pytest.raises(PreconditionError):
        slicing_partition(2.6, 1.0, steps=3)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 10).filter(lambda m: abs(m - round(m)) > 1e-6), st.integers(0, 4))
def test_partition_properties(m, extra):
    N = int(2 * m) + 1 + extra
    taus = slicing_partition(m, 1.0, N)
    assert taus[0] == 0.0 and taus[-1] == 1.0 and len(taus) == N + 1
    assert all(0 < (b - a) * m < 0.5 for a, b in zip(taus, taus[1:]))
    assert all(abs(t * m - round(t * m)) > 1e-9 for t in taus[1:])


def test_circle_files_match_family():
    fam = circle_family()
    for inst, name in zip(fam.instances, ["circle-tau1", "circle-tau2"]):
        cx = load_model(name)
        assert cx.generators == inst.complex.generators
        assert cx.diff == inst.complex.diff


def test_d1_file_matches_builder():
    assert load_model("d1").diff == d_instance(0.3, "D1").complex.diff


def test_base_case_on_d1():
    step = verify_base_case(d_instance(0.3, "D1"), 0.05)
    assert step.ok


@settings(max_examples=20, deadline=None)
@given(st.floats(0.005, 0.1))
def test_base_case_independent_of_delta(delta):
    assert verify_base_case(d_instance(0.3, "D1"), delta).ok
    assert not verify_base_case(d_instance(0.3, "N", displaced=False), delta).ok


def test_base_case_collar_and_precondition():
    with pytest.raises(CollarViolation):
        verify_base_case(d_instance(0.3, "D1"), 0.8)
    with pytest.raises(PreconditionError):
        verify_base_case(d_instance(0.6, "D2"), 0.05)


def test_instance_rejects_resonant_max():
    with pytest.raises(PreconditionError):
        d_instance(1.0, "bad")


def test_negative_controls_fail():
    assert not negative_base_case().verdict
    rep = negative_inductive_step()
    assert not rep.verdict
    assert any("contradiction" in ln for ln in rep.steps[0].lines)


def test_d1_d2_passes():
    rep = d1_d2_scenario()
    assert rep.verdict and len(rep.steps) == 2


def test_inductive_step_gap_too_large():
    d1, d3 = d_instance(0.3, "D1"), d_instance(0.85, "D3")
    with pytest.raises(PreconditionError):
        verify_inductive_step(d1, d3, identity_continuation(d1, d3), 0.05)


def test_inductive_step_budget_violation():
    d1, d2 = d_instance(0.3, "D1"), d_instance(0.6, "D2")
    greedy = FilteredChainMap(d1.complex, d2.complex, {"x": frozenset({("x", 0)}), "P": frozenset({("P", 0)})},
                              0.1, name="psi")
    assert not verify_inductive_step(d1, d2, greedy, 0.05).ok


def test_circle_replay_steps():
    rep = run_theorem_scenario(circle_family())
    assert rep.verdict
    names = [s.name for s in rep.steps]
    assert names[:3] == ["partition", "validate CQ(circle)", "Chekanov primitive"]
    assert "base case tau1" in names and "inductive step tau1 -> tau2" in names


def test_small_displacement_energy_is_flagged():
    rep = run_theorem_scenario(circle_family(d_L=0.5))
    assert not rep.verdict
    assert any("metadata inconsistency" in ln for s in rep.steps for ln in s.lines)


def test_counterexample_inputs():
    assert counterexample_report([]).artifacts["counterexample.csv"] == [
        ["epsilon", "capacity_lower_bound", "hofer_norm", "displacement_energy", "ratio"]]
    with pytest.raises(PreconditionError):
        counterexample_report([0.1, 0.2], chord_check=False)
    with pytest.raises(PreconditionError):
        counterexample_report([0.0], chord_check=False)


def test_counterexample_ratio_grows():
    rows = counterexample_report([0.1, 0.01], chord_check=False).artifacts["counterexample.csv"][1:]
    ratios = [float(r[4]) for r in rows]
    assert ratios[1] == pytest.approx(10 * ratios[0])
    assert rows[0][1] == rows[1][1] == rows[0][2]


def test_run_named():
    assert [r.name for r in run_named("d1-base")] == ["base-D1"]
    assert "negative-base" not in SCENARIOS
    with pytest.raises(PreconditionError):
        run_named("nope")


def test_artifacts_written(tmp_path):
    rep = d1_d2_scenario()
    rep.write_artifacts(tmp_path)
    assert (tmp_path / "d1-d2.txt").read_text() == rep.text()


@pytest.mark.parametrize("m0", [1.3, 2.6])
def test_family_beyond_bound_fails_cleanly(m0):
    rep = run_theorem_scenario(circle_family(m0))
    assert not rep.verdict
    assert any(ln.startswith("induction stops at") for ln in rep.summary)
    assert not all(s.ok for s in rep.steps if s.name.startswith("instance"))


def test_inductive_step_needs_room_below_bound():
    a, b = d_instance(1.2, "a"), d_instance(1.4, "b")
    with pytest.raises(PreconditionError):
        verify_inductive_step(a, b, identity_continuation(a, b), 0.05)
