"""Exponent-improvement schedule: decreasing exponents σ₀ > σ₁ > … with certificates.

Each consecutive pair (σ_prev, σ_next) must satisfy the step inequality

    (σ_next + 1) m + t σ_prev < σ_next (p - 1) + sp,

whose slack is reported for every step. All arithmetic is plain binary
floating point; slacks are macroscopic by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .params import ProblemParams, classify, critical_exponents, subcritical_slack

CASE1 = "Case1"
CASE2 = "Case2"
CASE3 = "Case3"

MAX_STEPS = 1_000_000


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class ImprovementSchedule:
    sigmas: tuple[float, ...]
    case_label: str
    delta: float
    theta_target: float
    certificates: tuple[float, ...]
    epsilon: float | None = None
    steps: int = field(default=0)

    def to_dict(self) -> dict:
        return {
            "sigmas": list(self.sigmas),
            "case_label": self.case_label,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "theta_target": self.theta_target,
            "certificates": list(self.certificates),
            "steps": self.steps,
        }

    def table(self) -> list[tuple[int, float, float | None, str]]:
        """Rows (i, sigma_i, slack of the step into sigma_i, case)."""
        rows = []
        for i, sigma in enumerate(self.sigmas):
            slack = self.certificates[i - 1] if i > 0 else None
            rows.append((i, sigma, slack, self.case_label))
        return rows


def verify_exponent_step(params: ProblemParams, sigma_prev: float, sigma_next: float) -> float:
    """Slack σ_next(p-1) + sp - (σ_next+1)m - tσ_prev; positive means the step holds."""
    p, t, m = params.p, params.t, params.m
    return sigma_next * (p - 1.0) + params.sp - (sigma_next + 1.0) * m - t * sigma_prev


def g_map(params: ProblemParams, epsilon: float, ell: float) -> float:
    """The affine map ℓ ↦ (tℓ - sp + p - 1 + ε)/(p - 1 - m) - 1."""
    p, t, m = params.p, params.t, params.m
    if not m < p - 1.0:
        raise ScheduleError(f"g_map needs m < p-1, got m={m}, p={p}")
    return (t * ell - params.sp + p - 1.0 + epsilon) / (p - 1.0 - m) - 1.0


def case_label(params: ProblemParams) -> str:
    p, t, m = params.p, params.t, params.m
    if m == p - 1.0:
        return CASE1
    if m > p - 1.0:
        raise ScheduleError(f"no schedule case for m > p-1 (m={m}, p={p})")
    if t * critical_exponents(params).theta_zero <= params.sp - m:
        return CASE2
    return CASE3


def _regime_slack(params: ProblemParams) -> float:
    # N(p-1) - t(N-sp) - m(N-sp+p-1); the same quantity as the subcriticality slack
    return subcritical_slack(params)


def choose_epsilon(params: ProblemParams) -> float:
    """Half of the room left by both constraints on ε."""
    slack3 = _regime_slack(params)
    if not slack3 > 0.0:
        raise ScheduleError("Case 3 infeasible: non-positive subcriticality slack")
    gap = params.sp - params.m
    if not gap > 0.0:
        raise ScheduleError("Case 3 infeasible: sp - m must be positive")
    return min(0.5 * gap, slack3 / (2.0 * (params.p - 1.0)))


def choose_delta(params: ProblemParams) -> float:
    """δ with N(p-1) > m(N-(sp-p+1)) + t(N-sp) + δt(p-1), kept below theta_max - theta_zero."""
    _require_regime(params)
    t, p = params.t, params.p
    ex = critical_exponents(params)
    try:
        delta = 1.0 if t == 0.0 else _regime_slack(params) / (2.0 * t * (p - 1.0))
    except (OverflowError, ZeroDivisionError):
        delta = math.inf
    if not math.isfinite(delta):
        # a subnormal t overflows the ratio or underflows the denominator;
        # halving from the gap gives the same kind of bound
        delta = ex.theta_max - ex.theta_zero
    while not ex.theta_zero + delta < ex.theta_max:
        delta *= 0.5
    return delta


def _require_regime(params):
    report = classify(params)
    if not report.in_regime:
        raise ScheduleError(f"parameters out of regime: {', '.join(report.failed_conditions)}")


def build_schedule(params: ProblemParams, theta_target: float) -> ImprovementSchedule:
    """Run the improvement iteration from theta_zero + δ down to ``theta_target``.

    In Case 3 the exponents follow σ_{i+1} = g(σ_i) from σ₁ = theta_zero until
    tσ_n <= sp - m. The target is appended only when it lies strictly below the
    last exponent, so the list stays strictly decreasing.
    """
    _require_regime(params)
    theta_zero = critical_exponents(params).theta_zero
    if not 0.0 < theta_target <= theta_zero:
        raise ScheduleError(f"theta_target must lie in (0, {theta_zero}], got {theta_target}")
    label = case_label(params)
    delta = choose_delta(params)
    sigmas = [theta_zero + delta, theta_zero]
    epsilon = None
    steps = 0
    if label == CASE3:
        epsilon = choose_epsilon(params)
        limit = params.sp - params.m
        while params.t * sigmas[-1] > limit:
            if steps >= MAX_STEPS:
                raise ScheduleError(f"Case 3 recursion did not terminate within {MAX_STEPS} steps")
            nxt = g_map(params, epsilon, sigmas[-1])
            if not nxt < sigmas[-1]:
                raise ScheduleError(f"Case 3 recursion stalled at sigma={sigmas[-1]}")
            sigmas.append(nxt)
            steps += 1
    if theta_target < sigmas[-1]:
        sigmas.append(theta_target)
    certificates = tuple(verify_exponent_step(params, a, b) for a, b in zip(sigmas, sigmas[1:]))
    return ImprovementSchedule(
        sigmas=tuple(sigmas),
        case_label=label,
        delta=delta,
        theta_target=theta_target,
        certificates=certificates,
        epsilon=epsilon,
        steps=steps,
    )


def schedule_is_sound(schedule: ImprovementSchedule) -> bool:
    s = schedule.sigmas
    decreasing = all(b < a for a, b in zip(s, s[1:]))
    return decreasing and s[-1] <= schedule.theta_target and all(c > 0.0 for c in schedule.certificates)


def difference_identity_error(params: ProblemParams, schedule: ImprovementSchedule) -> float:
    """Largest relative deviation from σ_{i+1}-σ_i = (t/(p-1-m))^(i-1)(σ₂-σ₁) over the Case 3 chain."""
    if schedule.case_label != CASE3:
        return 0.0
    chain = schedule.sigmas[1:1 + schedule.steps + 1]  # σ₁ … σ_n
    if len(chain) < 2:
        return 0.0
    ratio = params.t / (params.p - 1.0 - params.m)
    first = chain[1] - chain[0]
    worst = 0.0
    for i in range(1, len(chain)):
        actual = chain[i] - chain[i - 1]
        predicted = ratio ** (i - 1) * first
        scale = max(abs(predicted), math.ulp(1.0))
        worst = max(worst, abs(actual - predicted) / scale)
    return worst
