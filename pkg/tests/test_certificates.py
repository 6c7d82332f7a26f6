from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hymem.certificates import (
    CertificateSpec,
    check_constants,
    check_iss_envelope,
    check_krasovskii,
    check_razumikhin_envelope,
    check_razumikhin_flow,
    check_razumikhin_jump,
    check_sandwich,
    check_stable_flow_envelope,
    check_stable_jump_envelope,
    check_vbar_monotone,
    run_suite,
)
from hymem.errors import SchemaError
from hymem.hybrid_time import HybridArc, InputSignal, memory_operator
from hymem.report import Tol
from hymem.system import SimConfig, SystemDef, simulate
from hymem.toolkit import ComparisonFunction as CF
from hymem.toolkit import PersistenceSpec, vbar
from oracles import ode_system, run_impulsive

sq = lambda x: float(x[0] ** 2)  # noqa: E731
absx = lambda x: abs(float(x[0]))  # noqa: E731
head_sq = lambda phi: float(phi.head()[0] ** 2)  # noqa: E731


def _ode(rate=-1.0, T=3.0, u=None, x0=1.0, h=1e-3):
    return simulate(ode_system(rate), HybridArc.constant([x0], -1.0, 0.0), u, SimConfig(h=h, horizon=(T, 0)))


@pytest.fixture(scope="module")
def decay():
    return _ode()


def _thmA(**kw):
    base = dict(variant="ThmA", V_state=sq, alpha1=CF.power(2), alpha2=CF.power(2), alpha3=CF.linear(1.0),
                rho=CF.linear(0.5), gamma1=CF.linear(0.5, "K"), gamma2=CF.power(2))
    base.update(kw)
    return CertificateSpec(**base)


def _persist():
    return PersistenceSpec(CF.linear(0.5), 2.0, "jump")


# spec validation


def test_variant_field_schema():
    with pytest.raises(SchemaError):
        CertificateSpec("ThmA", V_state=sq)
    with pytest.raises(SchemaError):
        CertificateSpec("Thm9")
    with pytest.raises(SchemaError):
        _thmA(V_state=None, V_func=head_sq)


def test_variant_constant_signs():
    common = dict(V_state=sq, alpha1=CF.power(2), alpha2=CF.power(2), gamma1=CF.linear(0.5), gamma2=CF.power(2),
                  eps=1.0, N0=1)
    with pytest.raises(SchemaError):
        CertificateSpec("ThmE", lam1=1.0, mu=0.5, **common)
    with pytest.raises(SchemaError):
        CertificateSpec("ThmF", lam1=1.0, mu=1.5, **common)
    kr = dict(V_func=head_sq, alpha1=CF.power(2), alpha2=CF.power(2), rho=CF.zero(), eps=1.0, N0=1)
    with pytest.raises(SchemaError):
        CertificateSpec("ThmH", lam1=1.0, lam2=1.0, mu=2.0, **kr)
    with pytest.raises(SchemaError):
        CertificateSpec("ThmI", lam1=1.0, lam2=0.0, mu=1.0, **kr)
    CertificateSpec("ThmE", lam1=1.0, mu=1.0, **common)


# sandwich


def test_sandwich_equality(decay):
    assert check_sandwich(_thmA(), decay).passed


def test_sandwich_lower_too_large(decay):
    rep = check_sandwich(_thmA(alpha1=CF.power(2, 2.0)), decay)
    assert not rep.passed
    assert {v.cond for v in rep.violations} == {"sandwich-lower"}
    assert len(rep.violations) == len(list(decay.forward_samples()))


# Razumikhin flow


def test_razumikhin_flow_decay(decay):
    rep = check_razumikhin_flow(_thmA(), decay)
    assert rep.passed and rep.trigger_hits > 0


def test_razumikhin_flow_too_strict(decay):
    rep = check_razumikhin_flow(_thmA(alpha3=CF.linear(3.0)), decay)
    assert not rep.passed
    assert len(rep.violations) == rep.trigger_hits


def test_razumikhin_flow_vacuous():
    sol = _ode(u=InputSignal.constant([10.0]))
    rep = check_razumikhin_flow(_thmA(), sol)
    assert rep.passed and rep.trigger_hits == 0 and rep.vacuous


# Razumikhin jump


def test_jump_halving_under_small_gain():
    sol = run_impulsive(0.0, 0.5)
    spec = _thmA(V_state=absx, rho=CF.linear(0.6), alpha1=CF.linear(1), alpha2=CF.linear(1))
    rep = check_razumikhin_jump(spec, sol)
    assert rep.passed and rep.samples_checked == len(sol.jumps()) == 3


def test_jump_doubling_breaks_nonincrease():
    sol = run_impulsive(0.0, 2.0)
    spec = CertificateSpec("PropD", V_state=absx, alpha1=CF.linear(1), alpha2=CF.linear(1), rho=CF.linear(1),
                           gamma1=CF.linear(0.5, "K"), gamma2=CF.linear(1), persistence=_persist())
    rep = check_razumikhin_jump(spec, sol)
    assert rep.trigger_hits == 3 and len(rep.violations) == 3


# Krasovskii


def _kras(variant, **kw):
    base = dict(V_func=kw.pop("V_func", head_sq), alpha1=CF.power(2), alpha2=CF.power(2), rho=CF.zero())
    if variant in ("ThmG", "PropG-flow", "PropG-jump"):
        base["alpha3"] = CF.linear(1.0)
    if variant in ("PropG-flow", "PropG-jump"):
        base["persistence"] = _persist()
    base.update(kw)
    return CertificateSpec(variant, **base)


def test_constant_functional():
    sol = run_impulsive(-1.0, 1.0)
    const = lambda phi: 1.0  # noqa: E731
    flow = check_krasovskii(_kras("PropG-flow", V_func=const), sol)
    assert not any(v.cond == "dini-flow" for v in flow.violations)
    strict = check_krasovskii(_kras("ThmG", V_func=const), sol)
    assert any(v.cond == "dini-flow" for v in strict.violations)


def test_identity_jump_within_growth_factor():
    sol = run_impulsive(-1.0, 1.0)
    spec = _kras("ThmH", lam1=1.0, lam2=0.0, mu=1.5, eps=1.0, N0=1)
    rep = check_krasovskii(spec, sol)
    assert rep.passed
    assert sum(1 for _ in sol.jumps()) == 3


def test_example2_case1_functional_decreases():
    from hymem.case_studies import example2_preset

    pre = example2_preset(1)
    cfg = dataclasses.replace(pre.config, horizon=(2.0, 2))
    sol = simulate(pre.system, pre.initial, pre.input, cfg)
    rep = check_krasovskii(pre.certificate, sol, stride=5)
    assert rep.passed and rep.trigger_hits > 0


# vbar monotone


def test_vbar_monotone_decay(decay):
    assert check_vbar_monotone(sq, decay).passed


def test_vbar_monotone_growth_located():
    sol = _ode(rate=1.0, T=1.0)
    rep = check_vbar_monotone(sq, sol)
    assert not rep.passed
    assert rep.violations[0].t == pytest.approx(sol.x.segment(0).t[np.searchsorted(sol.x.segment(0).t, 0) + 1])


def test_vbar_monotone_constant():
    rep = check_vbar_monotone(sq, _ode(rate=0.0))
    assert rep.passed and rep.worst_margin <= 0


# envelopes


def test_razumikhin_envelope_exact_rate(decay):
    assert check_razumikhin_envelope(decay, sq, 1.0, 2.0, CF.power(2)).passed


def test_razumikhin_envelope_too_fast(decay):
    rep = check_razumikhin_envelope(decay, sq, 1.0, 3.0, CF.power(2))
    assert not rep.passed and rep.violations[0].t > 0


def test_razumikhin_envelope_at_origin_is_sandwich():
    sol = _ode(T=0.0)
    assert len(list(sol.forward_samples())) == 1
    assert check_razumikhin_envelope(sol, sq, 1.0, 2.0, CF.power(2)).passed
    assert not check_razumikhin_envelope(sol, sq, 1.0, 2.0, CF.power(2, 0.5)).passed


def test_razumikhin_envelope_preconditions(decay):
    with pytest.raises(SchemaError):
        check_razumikhin_envelope(decay, sq, 0.5, 2.0, CF.power(2))


def test_stable_flow_envelope(decay):
    assert check_stable_flow_envelope(decay, head_sq, 1.5, 1.0, CF.power(2)).passed
    assert not check_stable_flow_envelope(decay, head_sq, 1.5, 3.0, CF.power(2)).passed
    with pytest.raises(SchemaError):
        check_stable_flow_envelope(decay, head_sq, 1.0, 1.0, CF.power(2))


def test_stable_jump_envelope_unstable_flow():
    sol = _ode(rate=1.0, T=2.0)
    assert not check_stable_jump_envelope(sol, head_sq, 0.5, 1.0, CF.power(2)).passed
    assert check_stable_jump_envelope(sol, head_sq, 0.5, 2.0, CF.power(2)).passed


def test_stable_jump_envelope_with_contracting_jumps():
    sol = run_impulsive(1.0, 0.5)
    # V = x^2 shrinks by 1/4 at each jump and grows like e^{2t} in between
    assert check_stable_jump_envelope(sol, head_sq, 0.25, 2.0, CF.power(2)).passed
    assert not check_stable_jump_envelope(sol, head_sq, 0.2, 2.0, CF.power(2)).passed


def test_iss_envelope_zero_input(decay):
    rep = check_iss_envelope(decay, lambda r, t, j: r * math.exp(-t), CF.zero())
    assert rep.passed and rep.worst_margin == pytest.approx(0, abs=1e-9)


def test_iss_envelope_constant_input():
    sys = SystemDef(1.0, 1, 1, lambda phi, u: [-phi.head() + u], lambda phi, u: [phi.head()],
                    lambda phi, u: True, lambda phi, u: False)
    sol = simulate(sys, HybridArc.constant([0.0], -1.0, 0.0), InputSignal.constant([0.7]),
                   SimConfig(h=1e-2, horizon=(5.0, 0)))
    assert check_iss_envelope(sol, lambda r, t, j: r * math.exp(-t), CF.linear(2.0)).passed


def test_iss_envelope_zero_bounds(decay):
    rep = check_iss_envelope(decay, lambda r, t, j: 0.0, CF.zero())
    assert not rep.passed and rep.violations[0].t == 0.0


# constants


def test_constants_dwell_margin():
    spec = CertificateSpec("ThmE", V_state=sq, alpha1=CF.power(2), alpha2=CF.power(2), gamma1=CF.linear(0.5, "K"),
                           gamma2=CF.power(2), lam1=1.0, mu=2.0, eps=1.0, N0=1)
    from hymem.hybrid_time import validate_domain

    d = validate_domain([(float(k), float(k + 1), k) for k in range(5)])
    assert check_constants(spec, 1.0, d).passed


def test_constants_decay_rate_band():
    spec = _kras("ThmH", lam1=2.0, lam2=1.0, mu=math.exp(0.3), eps=1.0, N0=1, lam=0.4)
    rep = check_constants(spec, 0.0)
    assert rep.passed
    spec = _kras("ThmH", lam1=2.0, lam2=1.0, mu=math.exp(0.3), eps=1.0, N0=1, lam=0.45)
    assert not check_constants(spec, 0.0).passed


def test_constants_small_gain():
    assert not check_constants(_thmA(rho=CF.linear(1.0))).passed


def test_suite_composition(decay):
    names = [r.variant for r in run_suite(_thmA(), decay)]
    assert names == ["ThmA:sandwich", "ThmA:flow-decrease", "ThmA:jump", "ThmA:constants"]


# properties


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-2.0, 0.5))
def test_violation_rows_recompute(k, rate):
    sol = _ode(rate=rate, T=1.0, h=0.01)
    rep = check_sandwich(_thmA(alpha1=CF.power(2, k), alpha2=CF.power(2, k)), sol)
    tol = Tol()
    for v in rep.violations:
        x = sol.x.eval(v.t, v.j)
        V, a = x[0] ** 2, k * x[0] ** 2
        lhs, rhs = (a, V) if v.cond == "sandwich-lower" else (V, a)
        assert lhs > rhs + tol.slack(rhs)
    assert rep.passed == (abs(k - 1.0) * 1.0 <= 1e-6 * 2)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 4.0), st.floats(1e-9, 1e-2), st.floats(1.0, 100.0))
def test_tolerance_monotone(lam1, tol, factor):
    sol = _ode(T=1.0, h=0.01)
    small = check_razumikhin_envelope(sol, sq, 1.0, lam1, CF.power(2), tol=tol)
    big = check_razumikhin_envelope(sol, sq, 1.0, lam1, CF.power(2), tol=tol * factor)
    assert len(big.violations) <= len(small.violations)
    if small.passed:
        assert big.passed


@settings(max_examples=15, deadline=None)
@given(st.floats(-3.0, -0.1))
def test_flow_rate_implies_envelope(rate):
    sol = _ode(rate=rate, T=2.0, h=0.01)
    lam1 = -2 * rate
    spec = CertificateSpec("ThmE", V_state=sq, alpha1=CF.power(2), alpha2=CF.power(2), gamma1=CF.linear(0.5, "K"),
                           gamma2=CF.power(2), lam1=lam1, mu=1.0, eps=1.0, N0=1)
    assert check_razumikhin_flow(spec, sol).passed
    assert check_razumikhin_envelope(sol, sq, 1.0, lam1, CF.power(2)).passed


@settings(max_examples=20, deadline=None)
@given(st.floats(-1.5, 0.5), st.floats(0.2, 1.5))
def test_vbar_monotone_holds_at_jumps(rate, factor):
    sol = run_impulsive(rate, factor, T=4.0, h=0.01)
    rep = check_vbar_monotone(sq, sol)
    if rep.passed:
        vals = [vbar(sq, memory_operator(sol.x, e.t, e.j, sol.delta), sol.delta) for e in sol.jumps()]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
