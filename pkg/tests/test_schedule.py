import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclap.params import ProblemParams, classify, critical_exponents
from fraclap.schedule import (
    CASE1,
    CASE2,
    CASE3,
    ScheduleError,
    build_schedule,
    case_label,
    choose_delta,
    choose_epsilon,
    difference_identity_error,
    g_map,
    schedule_is_sound,
    verify_exponent_step,
)


def affine_recursion(params, eps, start, limit, steps=10_000):
    """The Case 3 recursion written out from the step equality with slack ε."""
    p, t, m, sp = params.p, params.t, params.m, params.sp
    out = [start]
    while t * out[-1] > limit and len(out) < steps:
        # (σ'+1)(p-1) + sp - p + 1 = tσ + m(σ'+1) + ε, solved for σ'
        out.append((t * out[-1] + m + eps - sp) / (p - 1 - m))
    return out


def test_g_map_examples():
    params = ProblemParams(2, 0.5, 2, 1.0, 0.0)
    assert g_map(params, 0.25, 1.0) == pytest.approx(0.25)
    slow = ProblemParams(2, 0.5, 2, 0.5, 0.0)
    eps = 0.25
    fixed = -(slow.sp - slow.m - eps) / (slow.p - 1 - slow.m - slow.t)
    assert g_map(slow, eps, fixed) == pytest.approx(fixed, abs=1e-14)
    a, b = 0.7, -1.3
    assert g_map(slow, eps, a) - g_map(slow, eps, b) == pytest.approx(slow.t * (a - b) / (slow.p - 1 - slow.m))


def test_g_map_rejects_m_at_p_minus_one():
    with pytest.raises(ScheduleError):
        g_map(ProblemParams(3, 0.6, 2, 0.1, 1.0), 0.1, 1.0)


def test_choose_epsilon_example():
    params = ProblemParams(2, 0.25, 2, 0.9, 0.2)
    assert choose_epsilon(params) == pytest.approx(0.075, abs=1e-15)


def test_choose_delta_examples():
    assert choose_delta(ProblemParams(2, 0.5, 2, 1.0, 0.0)) == pytest.approx(0.5)
    assert choose_delta(ProblemParams(2, 0.75, 1.5, 0.0, 0.0)) == 1.0
    # theta_zero = 2.5 and theta_max = 3, so δ = 1 is halved once
    params = ProblemParams(3, 0.5, 2, 0.0, 0.0)
    ex = critical_exponents(params)
    assert choose_delta(params) == 0.5
    assert ex.theta_zero + 0.5 < ex.theta_max


def test_verify_exponent_step_examples():
    assert verify_exponent_step(ProblemParams(2, 0.5, 2, 0, 0), 1.0, 0.5) == pytest.approx(1.5)
    assert verify_exponent_step(ProblemParams(2, 0.5, 2, 10.0, 0), 1.0, 0.5) < 0


def test_case1_example():
    params = ProblemParams(3, 0.6, 2, 0.1, 1.0)
    sch = build_schedule(params, 0.9)
    assert sch.case_label == CASE1
    assert len(sch.sigmas) == 3 and sch.sigmas[1] == critical_exponents(params).theta_zero
    assert all(c > 0 for c in sch.certificates)


def test_case2_example():
    params = ProblemParams(2, 0.5, 2, 0.4, 0.0)
    sch = build_schedule(params, 0.5)
    assert sch.case_label == CASE2
    assert sch.sigmas == (1.5, 1.0, 0.5)
    assert all(c > 0 for c in sch.certificates)


def test_case3_example_against_explicit_recursion():
    params = ProblemParams(2, 0.25, 2, 0.9, 0.0)
    sch = build_schedule(params, 0.75)
    assert sch.case_label == CASE3
    eps = choose_epsilon(params)
    ref = affine_recursion(params, eps, 1.5, params.sp - params.m)
    np.testing.assert_allclose(sch.sigmas[1:1 + len(ref)], ref, rtol=1e-14)
    assert params.t * sch.sigmas[-1] <= params.sp - params.m
    assert all(b < a for a, b in zip(sch.sigmas, sch.sigmas[1:]))
    assert difference_identity_error(params, sch) < 1e-10
    for c in sch.certificates[1:1 + sch.steps]:
        assert c == pytest.approx(eps, abs=1e-12)


def test_target_equal_to_theta_zero_is_not_duplicated():
    params = ProblemParams(2, 0.5, 2, 0.4, 0.0)
    sch = build_schedule(params, 1.0)
    assert sch.sigmas == (1.5, 1.0)


def test_rejections():
    with pytest.raises(ScheduleError, match="out of regime"):
        build_schedule(ProblemParams(3, 0.5, 2, 3.0, 0.0), 0.5)
    with pytest.raises(ScheduleError):
        build_schedule(ProblemParams(2, 0.5, 2, 0.4, 0.0), 1.5)
    with pytest.raises(ScheduleError):
        build_schedule(ProblemParams(2, 0.5, 2, 0.4, 0.0), 0.0)


def test_monotone_dispatch_across_m_boundary():
    base = dict(N=3, s=0.6, p=2.0, t=0.1)
    at = ProblemParams(m=1.0, **base)
    below = ProblemParams(m=1.0 - 1e-9, **base)
    assert case_label(at) == CASE1
    assert case_label(below) in (CASE2, CASE3)
    for params in (at, below):
        assert schedule_is_sound(build_schedule(params, 0.5))


def test_to_dict_and_table():
    sch = build_schedule(ProblemParams(2, 0.25, 2, 0.9, 0.0), 0.75)
    d = sch.to_dict()
    assert d["case_label"] == CASE3 and d["epsilon"] == sch.epsilon
    rows = sch.table()
    assert rows[0][2] is None and len(rows) == len(sch.sigmas)


@st.composite
def in_regime_params(draw):
    N = draw(st.integers(2, 6))
    s = draw(st.floats(0.05, 0.95))
    p = draw(st.floats(1.1, 4.0))
    m = (p - 1) if draw(st.booleans()) and draw(st.booleans()) else draw(st.floats(0.0, p - 1))
    t = draw(st.floats(0.0, 3.0))
    params = ProblemParams(N, s, p, t, m)
    if not classify(params).in_regime:
        params = ProblemParams(N, s, p, 0.0, 0.0)
    return params


@settings(max_examples=400, deadline=None)
@given(in_regime_params())
def test_schedule_properties(params):
    if not classify(params).in_regime:
        return
    theta_zero = critical_exponents(params).theta_zero
    sch = build_schedule(params, theta_zero / 2)
    assert schedule_is_sound(sch)
    if sch.case_label == CASE3:
        assert 0 < sch.epsilon < params.sp - params.m
        assert sch.sigmas[2] < sch.sigmas[1]
        assert difference_identity_error(params, sch) < 1e-10


def test_choose_delta_with_subnormal_t_terminates():
    params = ProblemParams(2, 0.5, 2, 5e-324, 0.0)
    ex = critical_exponents(params)
    delta = choose_delta(params)
    assert 0.0 < delta and ex.theta_zero + delta < ex.theta_max


def test_choose_delta_when_denominator_underflows():
    params = ProblemParams(2, 0.5, 1.1, 5e-324, 0.0)
    delta = choose_delta(params)
    assert 0.0 < delta < critical_exponents(params).theta_max
