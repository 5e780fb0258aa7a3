"""Homogeneity constant C(θ), its sign pattern, and barrier inequality checks.

For |x|^-θ the operator image is C(θ)|x|^(-θ(p-1)-sp). The checks here compare
operator images of explicit barriers against right-hand sides of the form
κ r^(-tσ) |∇φ|^m on logarithmic radius grids.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .evaluator import (
    NegativePower,
    Power,
    QuadratureConfig,
    RadialProfile,
    TruncatedPower,
    eval_flap,
    eval_gradient_norm,
)
from .params import ProblemParams, admissible_theta_range, classify, critical_exponents

POSITIVE = "positive"
NEGATIVE = "negative"
INDETERMINATE = "indeterminate-near-zero"

CTHETA_RADII = (0.5, 1.0, 2.0, 4.0, 8.0)
STEP_GRID = (1.0, 1e4, 33)
# Both sides of the final comparison are pure powers, so the crossover radius
# (C/κ)^(1/gap) can be large when the exponent gap is small.
FINAL_GRID = (1.0, 1e12, 49)
EPS0_GRID = (1.0, 1e3, 13)
EPS0_LADDER = tuple(2.0 ** -k for k in range(1, 21))
# Numerical floor of the sign verdict in units of rel_tol * scale.
VERDICT_TOL_FACTOR = 10.0


def log_grid(lo: float, hi: float, count: int) -> list[float]:
    if count < 1:
        raise ValueError("grid count must be positive")
    if count == 1:
        return [float(lo)]
    return [float(x) for x in np.geomspace(lo, hi, count)]


def _map(fun, items, workers):
    # Results come back in input order whatever the scheduling.
    if workers <= 1:
        return [fun(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fun, items))


# -- C(θ) ---------------------------------------------------------------------


@dataclass(frozen=True)
class CthetaEstimate:
    theta: float
    value: float
    spread: float
    r_samples: tuple[float, ...]
    error: float = 0.0
    scale: float = 0.0
    rel_tol: float = 0.0
    low_confidence: bool = False

    @property
    def threshold(self) -> float:
        """Magnitude below which no sign is declared."""
        return 3.0 * self.spread + 3.0 * self.error + VERDICT_TOL_FACTOR * self.rel_tol * self.scale

    @property
    def verdict(self) -> str:
        if abs(self.value) > self.threshold:
            return POSITIVE if self.value > 0.0 else NEGATIVE
        return INDETERMINATE

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "value": self.value,
            "spread": self.spread,
            "r_samples": list(self.r_samples),
            "error": self.error,
            "scale": self.scale,
            "low_confidence": self.low_confidence,
            "verdict": self.verdict,
        }


def estimate_ctheta(params: ProblemParams, theta: float, cfg: QuadratureConfig | None = None,
                    radii=CTHETA_RADII, workers: int = 1) -> CthetaEstimate:
    """Average r^(θ(p-1)+sp) (-Δ_p)^s |x|^-θ over the sample radii."""
    cfg = cfg or QuadratureConfig()
    if math.isclose(params.N, params.sp, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError("estimate_ctheta requires N != sp")
    lo, hi = admissible_theta_range(params)
    if not lo < theta < hi:
        raise ValueError(f"theta={theta} outside admissible range ({lo}, {hi})")
    radii = tuple(float(r) for r in radii)
    if theta == 0.0:
        return CthetaEstimate(0.0, 0.0, 0.0, radii, rel_tol=cfg.rel_tol)
    power = theta * (params.p - 1.0) + params.sp
    profile = Power(theta)
    results = _map(lambda r: eval_flap(profile, params, r, cfg), radii, workers)
    factors = [r ** power for r in radii]
    scaled = np.array([f * res.value for f, res in zip(factors, results)])
    value = float(math.fsum(scaled) / len(scaled))
    return CthetaEstimate(
        theta=float(theta),
        value=value,
        spread=float(np.max(np.abs(scaled - value))),
        r_samples=radii,
        error=max(f * res.error_estimate for f, res in zip(factors, results)),
        scale=max(f * res.scale for f, res in zip(factors, results)),
        rel_tol=cfg.rel_tol,
        low_confidence=not all(res.tolerance_met for res in results),
    )


def scan_sign_trichotomy(params: ProblemParams, theta_grid, cfg: QuadratureConfig | None = None,
                         workers: int = 1) -> list[tuple[float, str, CthetaEstimate]]:
    """(θ, verdict, estimate) for each grid exponent, in grid order."""
    lo, hi = admissible_theta_range(params)
    grid = [float(th) for th in theta_grid]
    bad = [th for th in grid if not lo < th < hi]
    if bad:
        raise ValueError(f"theta grid leaves admissible range ({lo}, {hi}): {bad[:3]}")
    rows = []
    for th in grid:
        est = estimate_ctheta(params, th, cfg, workers=workers)
        rows.append((th, est.verdict, est))
    return rows


# -- barrier reports --------------------------------------------------------------------


@dataclass
class BarrierReport:
    profile: RadialProfile
    rhs_exponent: float
    rhs_constant: float
    r_grid: list[float]
    margins: list[float]
    lhs: list[float] = field(default_factory=list)
    rhs: list[float] = field(default_factory=list)
    empirical_threshold: float | None = None
    lhs_constant: float = 0.0
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.margins) != len(self.r_grid):
            raise ValueError("margins and r_grid differ in length")
        if self.empirical_threshold is not None and self.empirical_threshold not in self.r_grid:
            raise ValueError("empirical_threshold must be a grid radius")

    def rows(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.r_grid, self.lhs, self.rhs, self.margins))

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_dict(),
            "rhs_exponent": self.rhs_exponent,
            "rhs_constant": self.rhs_constant,
            "r_grid": list(self.r_grid),
            "lhs": list(self.lhs),
            "rhs": list(self.rhs),
            "margins": list(self.margins),
            "empirical_threshold": self.empirical_threshold,
            "lhs_constant": self.lhs_constant,
            "notes": list(self.notes),
        }


def empirical_threshold(r_grid, margins) -> float | None:
    """Smallest grid radius from which every later margin is positive."""
    threshold = None
    for r, margin in zip(reversed(r_grid), reversed(margins)):
        if margin > 0.0:
            threshold = r
        else:
            break
    return threshold


def _barrier_report(params, profile, r_grid, rhs_of, rhs_exponent, rhs_constant, lhs_decay, cfg, workers):
    lhs = [res.value for res in _map(lambda r: eval_flap(profile, params, r, cfg), r_grid, workers)]
    rhs = [rhs_of(r) for r in r_grid]
    margins = [b - a for a, b in zip(lhs, rhs)]
    # empirical constant of the lhs bound C r^(-decay) over the grid
    lhs_constant = max(abs(v) * r ** lhs_decay for v, r in zip(lhs, r_grid))
    return BarrierReport(
        profile=profile,
        rhs_exponent=rhs_exponent,
        rhs_constant=rhs_constant,
        r_grid=list(r_grid),
        margins=margins,
        lhs=lhs,
        rhs=rhs,
        empirical_threshold=empirical_threshold(r_grid, margins),
        lhs_constant=lhs_constant,
    )


def verify_step(params: ProblemParams, sigma_prev: float, sigma_next: float, rhs_constant: float = 1.0,
                cfg: QuadratureConfig | None = None, r_grid=None, workers: int = 1) -> BarrierReport:
    """Compare (-Δ_p)^s of the truncated power σ_next with rhs_constant r^(-tσ_prev) |∇φ|^m."""
    cfg = cfg or QuadratureConfig()
    if not 0.0 < sigma_next < sigma_prev:
        raise ValueError(f"need 0 < sigma_next < sigma_prev, got ({sigma_prev}, {sigma_next})")
    if not rhs_constant > 0.0:
        raise ValueError("rhs_constant must be positive")
    r_grid = log_grid(*STEP_GRID) if r_grid is None else [float(r) for r in r_grid]
    profile = TruncatedPower(sigma_next, 0.5)
    t, m = params.t, params.m

    def rhs_of(r):
        return rhs_constant * r ** (-t * sigma_prev) * eval_gradient_norm(profile, r) ** m

    decay = sigma_next * (params.p - 1.0) + params.sp
    return _barrier_report(params, profile, r_grid, rhs_of, -t * sigma_prev, rhs_constant, decay, cfg, workers)


def final_exponent_condition(params: ProblemParams, theta: float, theta_bar: float) -> float:
    """(θ̄-1)(p-1-m) + p-1-sp + tθ; negative when the final barrier can work."""
    p, m, t = params.p, params.m, params.t
    return (theta_bar - 1.0) * (p - 1.0 - m) + p - 1.0 - params.sp + t * theta


def verify_final_barrier(params: ProblemParams, theta: float, theta_bar: float, kappa: float = 1.0,
                         cfg: QuadratureConfig | None = None, r_grid=None, eps: float = 1.0,
                         workers: int = 1) -> BarrierReport:
    """Compare (-Δ_p)^s(-eps|x|^θ̄) with κ r^(-tθ) |∇φ|^m on a log grid."""
    cfg = cfg or QuadratureConfig()
    p, sp = params.p, params.sp
    if not 0.0 < theta_bar < min(sp / (p - 1.0), 1.0):
        raise ValueError(f"theta_bar must lie in (0, min(sp/(p-1), 1)), got {theta_bar}")
    if not kappa > 0.0:
        raise ValueError("kappa must be positive")
    condition = final_exponent_condition(params, theta, theta_bar)
    if not condition < 0.0:
        raise ValueError(f"final exponent condition fails: value {condition} is not negative")
    r_grid = log_grid(*FINAL_GRID) if r_grid is None else [float(r) for r in r_grid]
    profile = NegativePower(eps, theta_bar)
    t, m = params.t, params.m

    def rhs_of(r):
        return kappa * r ** (-t * theta) * eval_gradient_norm(profile, r) ** m

    decay = sp - theta_bar * (p - 1.0)
    report = _barrier_report(params, profile, r_grid, rhs_of, -t * theta, kappa, decay, cfg, workers)
    report.notes.append(f"exponent condition value {condition}")
    if m <= p - 1.0:
        report.notes.append(
            "m <= p-1: the lhs scales like eps^(p-1) and the rhs like eps^m, "
            "so the check at eps=1 covers every eps in (0, 1)"
        )
    return report


# -- choices --------------------------------------------------------------------------


class Eps0SelectionError(RuntimeError):
    def __init__(self, message, margins):
        super().__init__(message)
        self.margins = margins


def select_eps0(params: ProblemParams, theta: float, cfg: QuadratureConfig | None = None,
                r_grid=None, ladder=EPS0_LADDER, workers: int = 1) -> float:
    """Largest ladder value ε₀ making the truncated power's image negative on the grid."""
    cfg = cfg or QuadratureConfig()
    ex = critical_exponents(params)
    if not ex.theta_zero < theta < ex.theta_max:
        raise ValueError(f"theta must lie in ({ex.theta_zero}, {ex.theta_max}), got {theta}")
    r_grid = log_grid(*EPS0_GRID) if r_grid is None else [float(r) for r in r_grid]
    tried = {}
    for eps0 in ladder:
        profile = TruncatedPower(theta, eps0)
        values = [res.value for res in _map(lambda r: eval_flap(profile, params, r, cfg), r_grid, workers)]
        tried[eps0] = values
        if all(v < 0.0 for v in values):
            return eps0
    raise Eps0SelectionError("eps0 selection failed", tried)


def select_theta_bar(params: ProblemParams) -> tuple[float, float]:
    """A pair (θ, θ̄) meeting the final exponent condition with half of the available room."""
    report = classify(params)
    if not report.in_regime:
        raise ValueError(f"parameters out of regime: {', '.join(report.failed_conditions)}")
    p, sp, t, m = params.p, params.sp, params.t, params.m
    if math.isclose(sp, p - 1.0, rel_tol=1e-12, abs_tol=1e-12):
        theta_bar = 0.5
        room = (1.0 - theta_bar) * (p - 1.0 - m)
    elif sp > p - 1.0:
        theta_bar = 0.5 * min(sp / (p - 1.0), 1.0)
        room = sp - p + 1.0
    else:
        theta_bar = 0.5 * (sp - m) / (p - 1.0 - m)
        room = (sp - m) - theta_bar * (p - 1.0 - m)
    theta = 1.0 if t == 0.0 else min(0.5 * room / t, 1.0)
    if not final_exponent_condition(params, theta, theta_bar) < 0.0:
        raise ValueError("no admissible (theta, theta_bar) found")
    return theta, theta_bar
