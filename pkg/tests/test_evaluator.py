import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from fraclap.evaluator import (
    INSIDE_PLATEAU,
    REGIONS,
    TOLERANCE_NOT_MET,
    InadmissibleProfile,
    NegativePower,
    Power,
    QuadratureConfig,
    TruncatedPower,
    eval_flap,
    eval_gradient_norm,
    power_moment,
    profile_from_dict,
)
from fraclap.oracle import power_flap_p2
from fraclap.params import ProblemParams, critical_exponents

CFG = QuadratureConfig()


def test_constant_profile_is_exactly_zero():
    res = eval_flap(Power(0.0), ProblemParams(3, 0.4, 2.5), 1.0)
    assert res.value == 0.0 and res.error_estimate == 0.0


@pytest.mark.parametrize("N, s, theta", [
    (2, 0.5, 0.5), (2, 0.5, -0.5), (2, 0.3, 1.2), (3, 0.25, 0.75), (3, 0.75, 1.95), (4, 0.6, 2.5), (3, 0.5, -0.8),
])
def test_p2_matches_gamma_closed_form(N, s, theta):
    res = eval_flap(Power(theta), ProblemParams(N, s, 2.0), 1.0)
    assert res.tolerance_met
    assert res.value == pytest.approx(power_flap_p2(N, s, theta), rel=10 * CFG.rel_tol)


def test_value_at_theta_zero_vanishes():
    params = ProblemParams(2, 0.5, 3)
    tz = critical_exponents(params).theta_zero
    at_zero = eval_flap(Power(tz), params, 1.0).value
    neighbours = max(abs(eval_flap(Power(th), params, 1.0).value) for th in (0.5 * tz, 1.5 * tz))
    assert abs(at_zero) <= 1e-3 * neighbours


def test_gradient_norm_examples():
    assert eval_gradient_norm(Power(1.0), 2.0) == pytest.approx(0.25)
    assert eval_gradient_norm(TruncatedPower(1.0, 0.5), 0.25) == 0.0
    assert eval_gradient_norm(NegativePower(0.1, 0.5), 4.0) == pytest.approx(0.025)


@pytest.mark.parametrize("params, theta", [
    (ProblemParams(2, 0.5, 3.0), 0.4),
    (ProblemParams(3, 0.6, 1.5), 2.0),
    (ProblemParams(3, 0.3, 4.0), -0.2),
    (ProblemParams(5, 0.9, 1.2), 10.0),
])
def test_scaling_law(params, theta):
    power = theta * (params.p - 1) + params.sp
    scaled = np.array([r ** power * eval_flap(Power(theta), params, r).value for r in (0.5, 1, 2, 4, 8)])
    spread = np.max(np.abs(scaled - scaled.mean())) / abs(scaled.mean())
    assert spread < 10 * CFG.rel_tol


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_negative_power_oddness_and_homogeneity(p):
    params = ProblemParams(2, 0.75, p)
    tb = 0.4 * min(params.sp / (p - 1), 1.0)
    base = eval_flap(NegativePower(1.0, tb), params, 2.0)
    scaled = eval_flap(NegativePower(0.3, tb), params, 2.0)
    mirror = eval_flap(Power(-tb), params, 2.0)
    assert scaled.value == pytest.approx(0.3 ** (p - 1) * base.value, rel=1e-9)
    assert base.value == pytest.approx(-mirror.value, rel=1e-12)


ROBUST_CASES = [
    (ProblemParams(2, 0.5, 2), Power(0.5), 1.0),
    (ProblemParams(3, 0.6, 1.5), Power(1.5), 2.0),
    (ProblemParams(3, 0.3, 4), TruncatedPower(0.5, 0.5), 1.5),
    (ProblemParams(2, 0.75, 1.5), NegativePower(1.0, 0.5), 3.0),
    (ProblemParams(2, 0.9, 1.5), Power(-1.0), 1.0),
]


@pytest.mark.parametrize("params, profile, r", ROBUST_CASES)
def test_window_and_tail_robustness(params, profile, r):
    base = eval_flap(profile, params, r)
    half = eval_flap(profile, params, r, QuadratureConfig(delta_diag=0.05))
    longer = eval_flap(profile, params, r, QuadratureConfig(lambda_tail=2e3))
    assert abs(half.value - base.value) < base.error_estimate
    assert abs(longer.value - base.value) < base.error_estimate


@pytest.mark.parametrize("params, profile, r", ROBUST_CASES)
def test_breakdown_sums_to_value(params, profile, r):
    res = eval_flap(profile, params, r)
    assert set(res.breakdown) == set(REGIONS)
    assert abs(math.fsum(res.breakdown.values()) - res.value) <= 1e-12 * max(1.0, abs(res.value))
    assert res.error_estimate >= 0.0 and math.isfinite(res.value)


def test_truncated_power_matches_power_far_out_when_eps0_small():
    # the plateau only removes mass near the origin; its effect decays like r^-(N+sp)
    params = ProblemParams(3, 0.5, 2.0)
    full = eval_flap(Power(0.8), params, 50.0).value
    trunc = eval_flap(TruncatedPower(0.8, 1e-3), params, 50.0).value
    assert trunc == pytest.approx(full, rel=1e-6)


def test_inside_plateau_is_flagged():
    from fraclap.oracle import grid_flap

    params = ProblemParams(2, 0.5, 2)
    res = eval_flap(TruncatedPower(1.0, 0.5), params, 0.25)
    assert INSIDE_PLATEAU in res.flags
    # the plateau is the global maximum, so every difference u(x) - u(y) is >= 0
    assert res.value > 0.0
    ref = grid_flap(TruncatedPower(1.0, 0.5), params, 0.25, nodes_per_dim=1024)
    assert abs(res.value - ref.value) <= 3 * (ref.stderr + res.error_estimate)


def test_inadmissible_profiles_rejected():
    params = ProblemParams(3, 0.25, 2.0)
    with pytest.raises(InadmissibleProfile):
        eval_flap(Power(3.25), params, 1.0)
    with pytest.raises(InadmissibleProfile):
        eval_flap(Power(-0.6), params, 1.0)
    with pytest.raises(InadmissibleProfile):
        eval_flap(NegativePower(1.0, 0.6), params, 1.0)
    with pytest.raises(InadmissibleProfile):
        TruncatedPower(1.0, 0.75)


def test_tolerance_not_met_is_flagged():
    cfg = QuadratureConfig(rel_tol=1e-15, max_panels=16)
    res = eval_flap(Power(0.7), ProblemParams(3, 0.5, 1.5), 1.0, cfg)
    assert not res.tolerance_met
    assert TOLERANCE_NOT_MET in res.flags
    assert math.isfinite(res.value)


def test_config_validation_and_round_trip():
    for bad in (dict(delta_diag=1.0), dict(lambda_tail=5.0), dict(rel_tol=0.0), dict(angular_nodes=8)):
        with pytest.raises(ValueError):
            QuadratureConfig(**bad)
    cfg = QuadratureConfig(rel_tol=1e-8, delta_diag=0.2)
    assert QuadratureConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ValueError):
        QuadratureConfig.from_dict({"rel_tl": 1})


def test_profile_round_trip():
    for prof in (Power(0.3), TruncatedPower(1.2, 0.25), NegativePower(0.5, 0.2)):
        assert profile_from_dict(prof.to_dict()) == prof
    with pytest.raises(ValueError):
        profile_from_dict({"kind": "gaussian"})


def test_power_moment_against_direct_integration():
    from scipy import integrate

    alpha, beta, p = -0.7, 1.3, 2.5
    f = lambda u: abs(1 - u ** alpha) ** (p - 2) * (1 - u ** alpha) * u ** (beta - 1)
    ref, _ = integrate.quad(f, 0.0, 0.4, limit=200)
    assert power_moment(alpha, beta, p, 0.0, 0.4) == pytest.approx(ref, rel=1e-9)


def test_results_independent_of_threading():
    params = ProblemParams(3, 0.45, 2.7)
    radii = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    serial = [eval_flap(Power(0.9), params, r).value for r in radii]
    with ThreadPoolExecutor(4) as pool:
        threaded = list(pool.map(lambda r: eval_flap(Power(0.9), params, r).value, radii))
    assert serial == threaded
