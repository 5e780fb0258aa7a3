"""Parameter tuple, hypothesis checks and critical exponents."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# Labels used in RegimeReport.failed_conditions.
DIMENSION = "dimension"
N_GT_SP = "N>sp"
M_CONDITION = "m-condition"
SUBCRITICALITY = "subcriticality"

ZERO_POINT = "zero-point"
POSITIVE = "positive-C"
NEGATIVE = "negative-C"
OUTSIDE = "outside"

_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class ProblemParams:
    """Parameters (N, s, p, t, m) of ``(-Δ_p)^s u >= u^t |∇u|^m`` in R^N."""

    N: int
    s: float
    p: float
    t: float = 0.0
    m: float = 0.0

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise ValueError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        for name in ("s", "p", "t", "m"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.N < 2:
            raise ValueError(f"N must be >= 2, got {self.N}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")
        if not self.p > 1.0:
            raise ValueError(f"p must be > 1, got {self.p}")
        if self.t < 0.0:
            raise ValueError(f"t must be >= 0, got {self.t}")
        if self.m < 0.0:
            raise ValueError(f"m must be >= 0, got {self.m}")

    @property
    def sp(self) -> float:
        return self.s * self.p

    def to_dict(self) -> dict:
        return {"N": self.N, "s": self.s, "p": self.p, "t": self.t, "m": self.m}

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemParams":
        unknown = set(data) - {"N", "s", "p", "t", "m"}
        if unknown:
            raise ValueError(f"unknown parameter field(s): {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class CriticalExponents:
    theta_zero: float
    theta_max: float
    theta_grad: float
    hamilton_shift: float

    def to_dict(self) -> dict:
        return {
            "theta_zero": self.theta_zero,
            "theta_max": self.theta_max,
            "theta_grad": self.theta_grad,
            "hamilton_shift": self.hamilton_shift,
        }


@dataclass(frozen=True)
class RegimeReport:
    in_regime: bool
    failed_conditions: tuple[str, ...] = field(default_factory=tuple)
    slack: float = 0.0

    def to_dict(self) -> dict:
        return {
            "in_regime": self.in_regime,
            "failed_conditions": list(self.failed_conditions),
            "slack": self.slack,
        }


def critical_exponents(params: ProblemParams) -> CriticalExponents:
    N, p, sp = params.N, params.p, params.sp
    return CriticalExponents(
        theta_zero=(N - sp) / (p - 1.0),
        theta_max=N / (p - 1.0),
        theta_grad=sp / (p - 1.0),
        hamilton_shift=sp - p + 1.0,
    )


def subcritical_slack(params: ProblemParams) -> float:
    """``N(p-1) - t(N-sp) - m(N-(sp-p+1))``; positive inside the regime."""
    N, p, t, m, sp = params.N, params.p, params.t, params.m, params.sp
    return N * (p - 1.0) - t * (N - sp) - m * (N - (sp - p + 1.0))


def m_condition_holds(params: ProblemParams) -> bool:
    # Strict ">1" selects the m <= p-1 branch; equality falls to m < sp.
    if params.sp / (params.p - 1.0) > 1.0:
        return params.m <= params.p - 1.0
    return params.m < params.sp


def classify(params: ProblemParams) -> RegimeReport:
    """Check the Liouville hypotheses and report which ones fail.

    The dimension check is kept in the label set for completeness; it cannot
    fail for a constructed ``ProblemParams``.
    """
    failed = []
    if params.N < 2:
        failed.append(DIMENSION)
    if not params.N > params.sp:
        failed.append(N_GT_SP)
    if not m_condition_holds(params):
        failed.append(M_CONDITION)
    slack = subcritical_slack(params)
    if not slack > 0.0:
        failed.append(SUBCRITICALITY)
    return RegimeReport(in_regime=not failed, failed_conditions=tuple(failed), slack=slack)


def admissible_theta_range(params: ProblemParams) -> tuple[float, float]:
    """Open interval of exponents theta for which |x|^-theta has a finite image."""
    return -params.sp / (params.p - 1.0), params.N / (params.p - 1.0)


def classify_theta(params: ProblemParams, theta: float) -> str:
    """Label theta by the sign of C(theta) for ``|x|^-theta``.

    Returns one of ``ZERO_POINT``, ``POSITIVE``, ``NEGATIVE`` or ``OUTSIDE``.
    """
    if math.isclose(params.N, params.sp, rel_tol=0.0, abs_tol=_EDGE_TOL):
        raise ValueError("classify_theta requires N != sp")
    lo, hi = admissible_theta_range(params)
    if not lo < theta < hi:
        return OUTSIDE
    theta_zero = critical_exponents(params).theta_zero
    if abs(theta) <= _EDGE_TOL or abs(theta - theta_zero) <= _EDGE_TOL * max(1.0, abs(theta_zero)):
        return ZERO_POINT
    if min(0.0, theta_zero) < theta < max(0.0, theta_zero):
        return POSITIVE
    return NEGATIVE
