"""Evaluation of (-Δ_p)^s f(|x|) at one radius for power-type barriers.

With ρ = r u the operator at radius r is r^-sp ∫_0^∞ J_p(f(r) - f(ru)) K(u) du,
K(u) = u^(N-1) A(1, u). The u-axis is cut into five regions:

* origin ``[0, η]``: the power-law part of f is integrated against the
  limiting kernel |S^(N-1)| u^(N-1) in closed form (an incomplete beta
  function); only the kernel excess A(1, u) - |S^(N-1)| = O(u²) is left to
  quadrature.
* bulk below ``[η, 1-δ]`` and bulk above ``[1+δ, Λ]``: adaptive G7-K15 in log u.
* diagonal ``[1-δ, 1+δ]``: the points 1-h and 1+h are paired so the odd
  leading singularity cancels; the paired integrand is O(h^(p-1-sp)).
* tail ``[Λ, ∞)``: same split as the origin, with v = 1/u.

Working in u makes the discretization independent of r, so the homogeneity
r^(θ(p-1)+sp) (-Δ_p)^s |x|^-θ = const holds to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .params import ProblemParams, admissible_theta_range
from .quadrature import QuadResult, ZERO, adaptive_gk_log, integrate_to_zero
from .radial import get_kernel

REGIONS = ("origin", "bulk_below", "diagonal", "bulk_above", "tail")

TOLERANCE_NOT_MET = "tolerance not met"
INSIDE_PLATEAU = "inside plateau"
WINDOW_SHRUNK = "diagonal window shrunk"


class InadmissibleProfile(ValueError):
    pass


# -- profiles -------------------------------------------------------------------


class RadialProfile:
    """Base class of the radial barrier profiles."""

    kind = ""

    def value(self, rho):
        raise NotImplementedError

    def gradient_norm(self, r: float) -> float:
        raise NotImplementedError

    def check(self, params: ProblemParams) -> None:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Power(RadialProfile):
    """f(ρ) = ρ^-θ."""

    theta: float
    kind = "power"

    def value(self, rho):
        return np.asarray(rho, dtype=float) ** (-self.theta)

    def gradient_norm(self, r):
        return abs(self.theta) * r ** (-self.theta - 1.0)

    def check(self, params):
        lo, hi = admissible_theta_range(params)
        if not lo < self.theta < hi:
            raise InadmissibleProfile(
                f"Power exponent {self.theta} outside admissible range ({lo}, {hi})"
            )

    def to_dict(self):
        return {"kind": self.kind, "theta": self.theta}


@dataclass(frozen=True)
class TruncatedPower(RadialProfile):
    """f(ρ) = ρ^-θ for ρ >= eps0 and eps0^-θ below."""

    theta: float
    eps0: float = 0.5
    kind = "truncated_power"

    def __post_init__(self):
        if not self.theta > 0.0:
            raise InadmissibleProfile(f"TruncatedPower needs theta > 0, got {self.theta}")
        if not 0.0 < self.eps0 <= 0.5:
            raise InadmissibleProfile(f"eps0 must lie in (0, 1/2], got {self.eps0}")

    def value(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.maximum(rho, self.eps0) ** (-self.theta)

    def gradient_norm(self, r):
        if r <= self.eps0:
            return 0.0
        return self.theta * r ** (-self.theta - 1.0)

    def check(self, params):
        if not self.theta * (params.p - 1.0) < params.N:
            raise InadmissibleProfile(
                f"TruncatedPower exponent {self.theta} must satisfy theta(p-1) < N"
            )

    def to_dict(self):
        return {"kind": self.kind, "theta": self.theta, "eps0": self.eps0}


@dataclass(frozen=True)
class NegativePower(RadialProfile):
    """f(ρ) = -eps ρ^theta_bar."""

    eps: float
    theta_bar: float
    kind = "negative_power"

    def __post_init__(self):
        if not self.eps > 0.0:
            raise InadmissibleProfile(f"eps must be positive, got {self.eps}")
        if not 0.0 < self.theta_bar < 1.0:
            raise InadmissibleProfile(f"theta_bar must lie in (0, 1), got {self.theta_bar}")

    def value(self, rho):
        return -self.eps * np.asarray(rho, dtype=float) ** self.theta_bar

    def gradient_norm(self, r):
        return self.eps * self.theta_bar * r ** (self.theta_bar - 1.0)

    def check(self, params):
        if not self.theta_bar * (params.p - 1.0) < params.sp:
            raise InadmissibleProfile(
                f"NegativePower exponent {self.theta_bar} must satisfy theta_bar(p-1) < sp"
            )

    def to_dict(self):
        return {"kind": self.kind, "eps": self.eps, "theta_bar": self.theta_bar}


_KINDS = {"power": Power, "truncated_power": TruncatedPower, "negative_power": NegativePower}


def profile_from_dict(data: dict) -> RadialProfile:
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in _KINDS:
        raise ValueError(f"unknown profile kind {kind!r}; expected one of {sorted(_KINDS)}")
    return _KINDS[kind](**data)


def eval_gradient_norm(profile: RadialProfile, r: float) -> float:
    if not r > 0.0:
        raise ValueError("r must be positive")
    return float(profile.gradient_norm(r))


# -- configuration and results ------------------------------------------------------


@dataclass(frozen=True)
class QuadratureConfig:
    delta_diag: float = 0.1
    lambda_tail: float = 1e3
    rel_tol: float = 1e-6
    max_panels: int = 4000
    angular_nodes: int = 16

    def __post_init__(self):
        if not 0.0 < self.delta_diag < 1.0:
            raise ValueError(f"delta_diag must lie in (0, 1), got {self.delta_diag}")
        if not self.lambda_tail > 10.0:
            raise ValueError(f"lambda_tail must exceed 10, got {self.lambda_tail}")
        if not self.rel_tol > 0.0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_panels < 16:
            raise ValueError(f"max_panels must be >= 16, got {self.max_panels}")
        if self.angular_nodes < 16:
            raise ValueError(f"angular_nodes must be >= 16, got {self.angular_nodes}")

    def to_dict(self) -> dict:
        return {
            "delta_diag": self.delta_diag,
            "lambda_tail": self.lambda_tail,
            "rel_tol": self.rel_tol,
            "max_panels": self.max_panels,
            "angular_nodes": self.angular_nodes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown quadrature field(s): {sorted(unknown)}")
        return cls(**data)


@dataclass
class EvalResult:
    value: float
    error_estimate: float
    breakdown: dict
    scale: float = 0.0
    tolerance_met: bool = True
    flags: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "breakdown": dict(self.breakdown),
            "scale": self.scale,
            "tolerance_met": self.tolerance_met,
            "flags": list(self.flags),
        }


# -- closed-form pieces -------------------------------------------------------------


def jp(w, p):
    """J_p(w) = |w|^(p-2) w, with J_p(0) = 0."""
    w = np.asarray(w, dtype=float)
    return np.sign(w) * np.abs(w) ** (p - 1.0)


def _beta_piece(a, b, lo, hi):
    """∫_lo^hi z^(a-1) (1-z)^(b-1) dz for 0 <= lo <= hi <= 1."""
    if hi <= lo:
        return 0.0
    scale = math.exp(special.betaln(a, b))
    if lo > 0.5:
        return scale * float(special.betaincc(a, b, lo) - special.betaincc(a, b, hi))
    return scale * float(special.betainc(a, b, hi) - special.betainc(a, b, lo))


def power_moment(alpha: float, beta: float, p: float, a: float, b: float) -> float:
    """∫_a^b J_p(1 - u^alpha) u^(beta-1) du over an interval not containing 1.

    Substituting w = u^alpha gives incomplete beta functions; ``a`` may be 0
    and ``b`` may be infinite when the integral converges there.
    """
    if alpha == 0.0:
        return 0.0
    with np.errstate(divide="ignore", over="ignore"):
        wa = float(np.float64(a) ** alpha)
        wb = float(np.float64(b) ** alpha)
    lo, hi = min(wa, wb), max(wa, wb)
    k = beta / alpha
    if hi <= 1.0:
        if not k > 0.0:
            raise ValueError("power moment diverges at w = 0")
        return _beta_piece(k, p, lo, hi) / abs(alpha)
    if lo >= 1.0:
        a_prime = 1.0 - p - k
        if not a_prime > 0.0:
            raise ValueError("power moment diverges at w = infinity")
        z_lo = 0.0 if math.isinf(hi) else 1.0 / hi
        return -_beta_piece(a_prime, p, z_lo, 1.0 / lo) / abs(alpha)
    raise ValueError("power moment interval straddles u = 1")


# -- the evaluator -------------------------------------------------------------------


def _profile_shape(profile: RadialProfile, r: float):
    """Return (F0, alpha, e, plateau) with f(ru) = F0 u^alpha for u >= e."""
    if isinstance(profile, Power):
        return r ** (-profile.theta), -profile.theta, 0.0, None
    if isinstance(profile, TruncatedPower):
        return r ** (-profile.theta), -profile.theta, profile.eps0 / r, profile.eps0 ** (-profile.theta)
    if isinstance(profile, NegativePower):
        return -profile.eps * r ** profile.theta_bar, profile.theta_bar, 0.0, None
    raise TypeError(f"unsupported profile {profile!r}")


def eval_flap(profile: RadialProfile, params: ProblemParams, r: float,
              cfg: QuadratureConfig | None = None) -> EvalResult:
    """(-Δ_p)^s f(|x|) at |x| = r with an a-posteriori error estimate."""
    cfg = cfg or QuadratureConfig()
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError(f"r must be positive and finite, got {r}")
    profile.check(params)
    if isinstance(profile, Power) and profile.theta == 0.0:
        return EvalResult(0.0, 0.0, {name: 0.0 for name in REGIONS}, 0.0, True, ())

    N, p, sp = params.N, params.p, params.sp
    kernel = get_kernel(N, sp, cfg.angular_nodes)
    S = kernel.limit
    F0, alpha, e, plateau = _profile_shape(profile, r)
    flags = []

    if plateau is not None and abs(r - profile.eps0) <= 1e-9 * r:
        raise InadmissibleProfile("radius coincides with the plateau edge eps0")
    inside = plateau is not None and e > 1.0
    f_r = plateau if inside else F0

    def f_of(u):
        fu = F0 * u ** alpha
        if plateau is not None:
            fu = np.where(u < e, plateau, fu)
        return fu

    def integrand(u):
        return jp(f_r - f_of(u), p) * kernel.reduced(u)

    sub_tol = 0.1 * cfg.rel_tol
    scale0 = S * abs(float(jp(F0, p))) * (1.0 / N + 1.0 / sp)
    abs_tol = 1e-3 * cfg.rel_tol * scale0
    budget = cfg.max_panels
    lam = cfg.lambda_tail
    gamma0 = N + min(alpha, 0.0) * (p - 1.0)
    gamma_inf = sp - max(alpha, 0.0) * (p - 1.0)
    J0 = float(jp(F0, p))

    def lead(beta, a, b):
        value = S * J0 * power_moment(alpha, beta, p, a, b)
        return QuadResult(value, 1e-14 * abs(value), abs(value), True, 0, 0)

    parts = {name: ZERO for name in REGIONS}

    if inside:
        flags.append(INSIDE_PLATEAU)
        lam = lam * e
        parts["bulk_above"] = adaptive_gk_log(integrand, e, lam, sub_tol, abs_tol, budget)
    else:
        delta = cfg.delta_diag
        if plateau is not None and e > 1.0 - delta:
            delta = 0.5 * (1.0 - e)
            flags.append(WINDOW_SHRUNK)
        eta = 0.5 * (1.0 - delta)

        def origin_excess(u):
            return jp(F0 * (1.0 - u ** alpha), p) * u ** (N - 1) * kernel.a1_excess(u)

        if plateau is None:
            parts["origin"] = lead(N, 0.0, eta) + integrate_to_zero(
                origin_excess, eta, gamma0 + 2.0, sub_tol, abs_tol, budget)
            below_start = eta
        else:
            c = float(jp(F0 - plateau, p))
            moment = integrate_to_zero(
                lambda u: u ** (N - 1) * kernel.a1_excess(u), e, N + 2.0, sub_tol, abs_tol, budget)
            ball = S * e ** N / N
            origin = QuadResult(
                c * (ball + moment.value),
                abs(c) * (moment.error + 1e-15 * ball),
                abs(c) * (ball + moment.abs_value),
                moment.converged,
                moment.panels,
                moment.evaluations,
            )
            if e < eta:
                origin = origin + lead(N, e, eta) + adaptive_gk_log(
                    origin_excess, e, eta, sub_tol, abs_tol, budget)
            parts["origin"] = origin
            below_start = max(e, eta)

        parts["bulk_below"] = adaptive_gk_log(integrand, below_start, 1.0 - delta, sub_tol, abs_tol, budget)

        def paired(h):
            lower, upper = kernel.reduced_pair(h)
            d_minus = -F0 * np.expm1(alpha * np.log1p(-h))
            d_plus = -F0 * np.expm1(alpha * np.log1p(h))
            return jp(d_minus, p) * lower + jp(d_plus, p) * upper

        parts["diagonal"] = integrate_to_zero(paired, delta, p - sp, sub_tol, abs_tol, budget, floor=1e-13,
                                              chunk=16.0)
        parts["bulk_above"] = adaptive_gk_log(integrand, 1.0 + delta, lam, sub_tol, abs_tol, budget)

    def tail_excess(v):
        return jp(F0 * (1.0 - v ** (-alpha)), p) * v ** (sp - 1.0) * kernel.a1_excess(v)

    if inside:
        parts["tail"] = integrate_to_zero(
            lambda v: integrand(1.0 / v) / v ** 2, 1.0 / lam, sp, sub_tol, abs_tol, budget)
    else:
        parts["tail"] = lead(-sp, lam, math.inf) + integrate_to_zero(
            tail_excess, 1.0 / lam, gamma_inf + 2.0, sub_tol, abs_tol, budget)

    factor = r ** (-sp)
    breakdown = {name: factor * parts[name].value for name in REGIONS}
    error = factor * sum(part.error for part in parts.values())
    scale = factor * sum(part.abs_value for part in parts.values())
    value = math.fsum(breakdown.values())
    converged = all(part.converged for part in parts.values())
    met = converged and error <= cfg.rel_tol * max(scale, 1e-300)
    if not met:
        flags.append(TOLERANCE_NOT_MET)
    return EvalResult(value, error, breakdown, scale, met, tuple(flags))
