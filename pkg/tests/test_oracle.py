import math

import numpy as np
import pytest

import fraclap.oracle as oracle
from fraclap.evaluator import NegativePower, Power, TruncatedPower, eval_flap
from fraclap.oracle import (
    EstimatorUnstable,
    fractional_laplacian_constant,
    grid_flap,
    mc_flap,
    mc_window_sensitivity,
    power_flap_p2,
    power_symbol_p2,
)
from fraclap.params import ProblemParams


def test_gamma_symbol_known_zero_and_values():
    # λ vanishes at θ = N - 2s, where |x|^-θ is the fundamental solution
    for N, s in [(2, 0.5), (3, 0.25), (3, 0.75)]:
        assert power_symbol_p2(N, s, N - 2 * s) == 0.0
        assert power_symbol_p2(N, s, 0.0) == 0.0
    # s = 1/2, N = 3, θ = 1/2: 2 Γ(3/4)Γ(5/4)/(Γ(1/4)Γ(3/4)) = 2 Γ(5/4)/Γ(1/4) = 1/2
    assert power_symbol_p2(3, 0.5, 0.5) == pytest.approx(0.5, rel=1e-14)


def test_fourier_constant():
    # C_{N,s} for N = 1, s = 1/2 is 1/π
    assert fractional_laplacian_constant(1, 0.5) == pytest.approx(1 / math.pi, rel=1e-14)
    assert fractional_laplacian_constant(3, 0.5) == pytest.approx(1 / math.pi ** 2, rel=1e-14)


def test_constant_profile_gives_zero():
    params = ProblemParams(2, 0.5, 2)
    est = mc_flap(Power(0.0), params, 1.0, samples=10_000)
    assert est.value == 0.0 and est.stderr == 0.0
    g = grid_flap(Power(0.0), params, 1.0)
    assert g.value == 0.0 and g.stderr == 0.0


def test_mc_brackets_closed_form():
    params = ProblemParams(2, 0.5, 2)
    est = mc_flap(Power(0.5), params, 1.0, samples=400_000, seed=11)
    assert abs(est.value - power_flap_p2(2, 0.5, 0.5)) <= 3 * est.stderr


def test_seed_determinism():
    params = ProblemParams(3, 0.5, 1.5)
    a = mc_flap(NegativePower(1.0, 0.3), params, 2.0, samples=50_000, seed=2 ** 63 + 5)
    b = mc_flap(NegativePower(1.0, 0.3), params, 2.0, samples=50_000, seed=2 ** 63 + 5)
    assert a == b
    c = mc_flap(NegativePower(1.0, 0.3), params, 2.0, samples=50_000, seed=6)
    assert c.value != a.value


@pytest.mark.parametrize("profile, params", [
    (Power(0.5), ProblemParams(2, 0.5, 2)),
    (TruncatedPower(0.6, 0.5), ProblemParams(3, 0.5, 3)),
    (NegativePower(1.0, 0.25), ProblemParams(2, 0.5, 2)),
])
def test_stderr_scales_like_inverse_sqrt_samples(profile, params):
    # averaged over seeds so the batch-means noise of a single run does not dominate
    small = [mc_flap(profile, params, 1.3, samples=20_000, seed=k).stderr for k in range(8)]
    large = [mc_flap(profile, params, 1.3, samples=200_000, seed=k).stderr for k in range(8)]
    ratio = math.sqrt(np.mean(np.square(small)) / np.mean(np.square(large)))
    assert ratio == pytest.approx(math.sqrt(10.0), rel=0.2)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_sign_oddness(p):
    params = ProblemParams(2, 0.75, p)
    tb = 0.25 * min(params.sp / (p - 1), 1.0)
    eps = 0.4
    neg = mc_flap(NegativePower(eps, tb), params, 1.5, samples=200_000, seed=1)
    pos = mc_flap(Power(-tb), params, 1.5, samples=200_000, seed=2)
    scale = eps ** (p - 1)
    assert abs(neg.value + scale * pos.value) <= 3 * (neg.stderr + scale * pos.stderr)


def test_window_sensitivity_consistent():
    params = ProblemParams(3, 0.5, 2)
    a, b = mc_window_sensitivity(Power(0.8), params, 1.5, samples=200_000, seed=4)
    assert abs(a.value - b.value) <= 3 * (a.stderr + b.stderr)


def test_small_window_still_unbiased():
    params = ProblemParams(2, 0.5, 2)
    est = mc_flap(Power(0.5), params, 1.0, samples=400_000, seed=3, h=1e-3)
    assert abs(est.value - power_flap_p2(2, 0.5, 0.5)) <= 4 * est.stderr


@pytest.mark.parametrize("delta", [1e-7, 1e-3, 0.1])
def test_paired_difference_accuracy(delta):
    # perpendicular offset: u(x) - u(x ± z) = r^-θ - (r² + δ²)^(-θ/2), written stably
    theta, r = 0.7, 1.3
    exact = -(r ** -theta) * math.expm1(-0.5 * theta * math.log1p((delta / r) ** 2))
    z = np.array([[0.0, delta]])
    got = oracle._paired(Power(theta), 2.0, r, z)[0]
    assert got == pytest.approx(exact, rel=1e-9)


def test_unstable_estimator_reported(monkeypatch):
    monkeypatch.setattr(oracle, "_paired", lambda *a: np.full(a[-1].shape[0], np.inf))
    with pytest.raises(EstimatorUnstable, match="estimator unstable"):
        mc_flap(Power(0.5), ProblemParams(2, 0.5, 2), 1.0, samples=10_000)


def test_argument_validation():
    params = ProblemParams(2, 0.5, 2)
    with pytest.raises(ValueError):
        mc_flap(Power(0.5), params, 1.0, batches=10)
    with pytest.raises(ValueError):
        mc_flap(Power(0.5), ProblemParams(4, 0.5, 2), 1.0)
    with pytest.raises(ValueError):
        grid_flap(Power(0.5), ProblemParams(3, 0.5, 2), 1.0)
    with pytest.raises(ValueError):
        grid_flap(Power(0.5), params, 1.0, nodes_per_dim=8192)


def test_grid_bracket_shrinks_under_refinement():
    params = ProblemParams(2, 0.5, 1.5)
    widths = [grid_flap(Power(1.0), params, 1.0, nodes_per_dim=n).stderr for n in (128, 256, 512, 1024)]
    assert widths[0] > widths[1] > widths[2] > widths[3]


@pytest.mark.parametrize("profile, params, r", [
    (Power(0.5), ProblemParams(2, 0.5, 2), 1.0),
    (Power(0.1), ProblemParams(2, 0.5, 3), 1.0),
    (TruncatedPower(0.6, 0.5), ProblemParams(2, 0.5, 2), 1.3),
    (NegativePower(1.0, 0.2), ProblemParams(2, 0.5, 3), 1.0),
])
def test_grid_matches_evaluator(profile, params, r):
    ev = eval_flap(profile, params, r)
    g = grid_flap(profile, params, r, nodes_per_dim=1024)
    assert abs(ev.value - g.value) <= 3 * (g.stderr + ev.error_estimate)


def test_grid_matches_mc():
    params = ProblemParams(2, 0.5, 2)
    g = grid_flap(NegativePower(1.0, 0.3), params, 1.0, nodes_per_dim=1024)
    mc = mc_flap(NegativePower(1.0, 0.3), params, 1.0, samples=200_000, seed=9)
    assert abs(g.value - mc.value) <= 3 * (g.stderr + mc.stderr)


def test_oracle_shares_no_code_with_evaluator():
    import inspect

    source = inspect.getsource(oracle)
    for name in ("radial", "quadrature", "scipy", "eval_flap"):
        assert f"import {name}" not in source and f".{name} import" not in source
