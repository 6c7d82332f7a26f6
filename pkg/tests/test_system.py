from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hymem.errors import BadInitial, DimensionMismatch, EmptyFlowSet, NoBracket
from hymem.hybrid_time import HybridArc, InputSignal, validate_domain
from hymem.system import SimConfig, SystemDef, audit_solution, detect_flow_exit, simulate, step_flow
from oracles import delay_closed_form, delay_system, ode_system, run_ode


def _halving(guard: int = 1000) -> SystemDef:
    return SystemDef(
        delta=1.0,
        state_dim=1,
        input_dim=1,
        flow_map=lambda phi, u: [np.zeros(1)],
        jump_map=lambda phi, u: [phi.head() / 2],
        flow_set=lambda phi, u: False,
        jump_set=lambda phi, u: True,
    )


def _timer(limit: float = 1.0) -> SystemDef:
    return SystemDef(
        delta=1.0,
        state_dim=1,
        input_dim=1,
        flow_map=lambda phi, u: [np.ones(1)],
        jump_map=lambda phi, u: [np.zeros(1)],
        flow_set=lambda phi, u: phi.head()[0] <= limit,
        jump_set=lambda phi, u: False,
    )


# simulate


def test_scalar_decay_matches_exponential():
    assert abs(run_ode(1e-3) - math.exp(-1)) <= 1e-6


def test_three_halvings():
    sol = simulate(_halving(), HybridArc.constant([8.0], -1.0, 0.0), None, SimConfig(horizon=(0.0, 3)))
    assert sol.final_state()[0] == 1.0
    assert sol.x.end() == (0.0, 3)
    assert len(sol.jumps()) == 3


def test_delayed_decay_matches_method_of_steps():
    sol = simulate(delay_system(0.5), HybridArc.constant([1.0], -1.0, 0.0), None, SimConfig(h=1e-3, horizon=(1.0, 0)))
    for t, _, x in sol.forward_samples():
        assert abs(x[0] - delay_closed_form(t)) <= 1e-5


def test_timer_exit_ends_in_dead_end():
    sol = simulate(_timer(), HybridArc.constant([0.0], -1.0, 0.0), None, SimConfig(h=0.3, horizon=(5.0, 10), event_tol=1e-9))
    assert sol.termination == "dead-end"
    assert sol.x.end()[0] == pytest.approx(1.0, abs=1e-8)
    kinds = [e.kind for e in sol.events]
    assert "flow-exit" in kinds and kinds[-1] == "dead-end"


def test_bad_initial_and_dimensions():
    sys = _timer()
    with pytest.raises(BadInitial):
        simulate(sys, HybridArc.constant([2.0], -1.0, 0.0), None, SimConfig())
    with pytest.raises(BadInitial):
        simulate(sys, HybridArc.constant([0.0], -0.5, 0.0), None, SimConfig())
    with pytest.raises(DimensionMismatch):
        simulate(sys, HybridArc.constant([0.0, 0.0], -1.0, 0.0), None, SimConfig())
    with pytest.raises(DimensionMismatch):
        simulate(sys, HybridArc.constant([0.0], -1.0, 0.0), InputSignal.zero(2), SimConfig())


def test_zeno_guard_fires():
    sys = SystemDef(1.0, 1, 1, lambda phi, u: [np.zeros(1)], lambda phi, u: [phi.head()], lambda phi, u: True,
                    lambda phi, u: True)
    sol = simulate(sys, HybridArc.constant([1.0], -1.0, 0.0), None, SimConfig(horizon=(1.0, 10**6), zeno_guard=20))
    assert sol.termination == "zeno"
    assert len(sol.jumps()) == 20


def test_priority_flow_first():
    sys = SystemDef(1.0, 1, 1, lambda phi, u: [np.ones(1)], lambda phi, u: [np.zeros(1)],
                    lambda phi, u: phi.head()[0] <= 0.5, lambda phi, u: True)
    arc = HybridArc.constant([0.0], -1.0, 0.0)
    jf = simulate(sys, arc, None, SimConfig(h=0.1, horizon=(1.0, 3), priority="jump-first"))
    ff = simulate(sys, arc, None, SimConfig(h=0.1, horizon=(1.0, 3), priority="flow-first"))
    assert jf.jumps()[0].t == 0.0
    assert ff.jumps()[0].t == pytest.approx(0.5, abs=1e-8)


def test_config_validation():
    for kw in ({"h": 0}, {"event_tol": 0}, {"zeno_guard": 0}, {"priority": "x"}, {"selection": "x"}):
        with pytest.raises(ValueError):
            SimConfig(**kw)


# detect_flow_exit


def test_exit_of_linear_timer():
    assert detect_flow_exit(lambda t: t <= 1.0, (0.5, 1.5), 1e-9) == pytest.approx(1.0, abs=1e-9)


def test_exit_of_exponential():
    t = detect_flow_exit(lambda t: math.exp(-t) >= 0.5, (0.0, 1.0), 1e-9)
    assert t == pytest.approx(math.log(2), abs=1e-9)


def test_exit_without_bracket():
    with pytest.raises(NoBracket):
        detect_flow_exit(lambda t: False, (0.0, 1.0), 1e-9)


# step_flow


def test_step_of_constant_flow():
    sys = SystemDef(1.0, 2, 1, lambda phi, u: [np.zeros(2)], lambda phi, u: [phi.head()], lambda phi, u: True,
                    lambda phi, u: False)
    xn, _ = step_flow(sys, HybridArc.constant([1.5, -2.0], -1.0, 0.0), 0.0, 0, 0.1)
    assert np.array_equal(xn, [1.5, -2.0])


def test_step_of_decay():
    xn, dn = step_flow(ode_system(-1.0), HybridArc.constant([1.0], -1.0, 0.0), 0.0, 0, 0.1)
    assert xn[0] == pytest.approx(math.exp(-0.1), abs=1e-7)
    assert dn[0] == pytest.approx(-xn[0])


def test_step_with_unit_delay():
    h = 0.05
    xn, _ = step_flow(delay_system(1.0, gain=1.0), HybridArc.constant([1.0], -2.0, 0.0), 0.0, 0, h)
    assert xn[0] == pytest.approx(1 + h, abs=1e-15)


def test_step_with_empty_flow_map():
    sys = SystemDef(1.0, 1, 1, lambda phi, u: [], lambda phi, u: [phi.head()], lambda phi, u: True, lambda phi, u: False)
    with pytest.raises(EmptyFlowSet):
        step_flow(sys, HybridArc.constant([1.0], -1.0, 0.0), 0.0, 0, 0.1)


# properties


def _switching(seed_map: float) -> SystemDef:
    return SystemDef(
        delta=1.5,
        state_dim=2,
        input_dim=1,
        flow_map=lambda phi, u: [np.array([-phi.head()[0] + 0.3 * phi.delayed(0.2)[0] + u[0], 1.0]),
                                 np.array([-2 * phi.head()[0], 1.0])],
        jump_map=lambda phi, u: [np.array([seed_map * phi.head()[0], 0.0]), np.array([-phi.head()[0], 0.0])],
        flow_set=lambda phi, u: phi.head()[1] <= 0.25 + 1e-9,
        jump_set=lambda phi, u: phi.head()[1] >= 0.25 - 1e-9,
    )


@settings(max_examples=15, deadline=None)
@given(st.floats(-1, 1), st.integers(0, 2**16), st.sampled_from(["first", "random"]), st.floats(-2, 2))
def test_solution_pair_audit_and_determinism(gain, seed, selection, x0):
    sys = _switching(gain)
    arc = HybridArc.constant([x0, 0.0], -1.5, 0.0)
    u = InputSignal.from_function(lambda t, j: [0.1 * math.sin(3 * t)], 1)
    cfg = SimConfig(h=0.01, horizon=(1.0, 10), selection=selection, seed=seed)
    a = simulate(sys, arc, u, cfg)
    b = simulate(sys, arc, u, cfg)
    assert audit_solution(sys, a).passed
    validate_domain(a.x.domain.as_tuples())
    ta, ja, xa = a.forward_arrays()
    tb, jb, xb = b.forward_arrays()
    assert np.array_equal(ta, tb) and np.array_equal(ja, jb) and np.array_equal(xa, xb)
    assert a.jump_choices == b.jump_choices
    # the input is recorded on the state's forward samples
    assert np.array_equal(a.u.arc.flat().t, ta)


def test_refinement_order():
    errs = [abs(run_ode(h) - math.exp(-1)) for h in (0.1, 0.05, 0.025)]
    orders = [math.log2(e1 / e2) for e1, e2 in zip(errs, errs[1:])]
    assert min(orders) >= 3.5
