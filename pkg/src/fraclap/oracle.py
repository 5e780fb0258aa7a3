"""Independent full-dimensional estimators used to cross-check the evaluator.

Nothing here imports the radial kernel, the quadrature module or scipy: the
point is a second route to the same numbers.

Both estimators write y = x + z and symmetrize z <-> -z, which realizes the
principal value:

    (-Δ_p)^s u(x) = ∫ ½[J_p(u(x) - u(x+z)) + J_p(u(x) - u(x-z))] |z|^(-N-sp) dz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evaluator import NegativePower, Power, RadialProfile, TruncatedPower
from .params import ProblemParams

MIN_BATCHES = 30
# Default window as a fraction of |x|. The near-stratum density already absorbs
# the O(ρ^p) size of the paired difference, so the window can be wide; a small
# one leaves only a fraction (h/|x|)^sp of far samples at the scale where the
# integral lives, and the batch-means error then understates the true error.
DEFAULT_WINDOW = 0.5


class EstimatorUnstable(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    stderr: float
    samples: int
    seed: int

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


def _odd_power(w, p):
    return np.copysign(np.abs(w) ** (p - 1.0), w)


def _is_constant(profile):
    return isinstance(profile, Power) and profile.theta == 0.0


def _growth(profile, p):
    """Exponent g with |J_p(u(x) - u(y))| = O(|y|^g) at infinity."""
    if isinstance(profile, NegativePower):
        return profile.theta_bar * (p - 1.0)
    if isinstance(profile, Power) and profile.theta < 0.0:
        return -profile.theta * (p - 1.0)
    return 0.0


def _unit_sphere_measure(N):
    if N == 2:
        return 2.0 * math.pi
    if N == 3:
        return 4.0 * math.pi
    raise ValueError(f"oracle supports N in {{2, 3}}, got {N}")


def _power_form(profile):
    """(c, alpha) with f(ρ) = c ρ^alpha on the non-constant part of the profile."""
    if isinstance(profile, NegativePower):
        return -profile.eps, profile.theta_bar
    return 1.0, -profile.theta


def _taylor_coefficients(profile, r):
    """f'(r) and f''(r) of the radial profile."""
    if isinstance(profile, TruncatedPower) and r < profile.eps0:
        return 0.0, 0.0
    c, alpha = _power_form(profile)
    return c * alpha * r ** (alpha - 1.0), c * alpha * (alpha - 1.0) * r ** (alpha - 2.0)


def _differences(profile, x_radius, z, sign):
    """u(x) - u(x + sign z), via log1p/expm1 so small offsets keep full precision."""
    c, alpha = _power_form(profile)
    r = x_radius
    z1 = sign * z[:, 0]
    rho2 = np.sum(z ** 2, axis=1)
    log_ratio = 0.5 * np.log1p((2.0 * r * z1 + rho2) / r ** 2)
    ur = c * r ** alpha
    diff = -ur * np.expm1(alpha * log_ratio)
    if isinstance(profile, TruncatedPower):
        inside = log_ratio < math.log(profile.eps0 / r)
        plateau = profile.eps0 ** (-profile.theta)
        u_x = plateau if r < profile.eps0 else ur
        diff = np.where(inside, u_x - plateau, diff)
        if r < profile.eps0:
            diff = np.where(inside, 0.0, u_x - np.exp(alpha * np.log(r) + alpha * log_ratio))
    return diff


TAYLOR_RADIUS = 1e-5


def _paired(profile, p, x_radius, z):
    """½[J_p(u(x)-u(x+z)) + J_p(u(x)-u(x-z))] for x = x_radius e_1, z of shape (n, N).

    For |z| below TAYLOR_RADIUS x_radius the second-order expansion
    u(x) - u(x±z) = ∓a - b is used (a = ∇u·z, b = ½ zᵀD²u z); its relative
    error is O(|z|²/|x|²) while direct differencing would lose everything to
    cancellation.
    """
    rho = np.sqrt(np.sum(z ** 2, axis=1))
    out = np.empty(z.shape[0])
    small = rho < TAYLOR_RADIUS * x_radius
    if np.any(small):
        zs = z[small]
        d1, d2 = _taylor_coefficients(profile, x_radius)
        a = d1 * zs[:, 0]
        b = 0.5 * (d2 * zs[:, 0] ** 2 + (d1 / x_radius) * (rho[small] ** 2 - zs[:, 0] ** 2))
        out[small] = 0.5 * (_odd_power(-a - b, p) + _odd_power(a - b, p))
    big = ~small
    if np.any(big):
        zb = z[big]
        out[big] = 0.5 * (_odd_power(_differences(profile, x_radius, zb, 1.0), p)
                          + _odd_power(_differences(profile, x_radius, zb, -1.0), p))
    return out


def mc_flap(profile: RadialProfile, params: ProblemParams, x_radius: float, samples: int = 200_000,
            seed: int = 0, h: float | None = None, batches: int = 40) -> OracleEstimate:
    """Importance-sampled Monte Carlo estimate of (-Δ_p)^s f(|x|) at |x| = x_radius.

    Outside |z| < h the radius is drawn from the Pareto density ∝ ρ^(-1-sp),
    which absorbs the kernel exactly; inside, from the density ∝ ρ^(p-sp-1),
    which absorbs the O(ρ^p) size of the symmetrized difference. Half of the
    samples go to each stratum. The standard error comes from batch means.
    """
    profile.check(params)
    N, p, sp = params.N, params.p, params.sp
    area = _unit_sphere_measure(N)
    if batches < MIN_BATCHES:
        raise ValueError(f"need at least {MIN_BATCHES} batches, got {batches}")
    per_batch = max(1, samples // (2 * batches))
    total = 2 * per_batch * batches
    if _is_constant(profile):
        return OracleEstimate(0.0, 0.0, total, int(seed))
    h = DEFAULT_WINDOW * x_radius if h is None else float(h)
    if not h > 0.0:
        raise ValueError(f"window h must be positive, got {h}")
    kappa = p - sp
    rng = np.random.default_rng(seed)
    means = np.empty(batches)
    for b in range(batches):
        dirs = rng.standard_normal((2 * per_batch, N))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        u_far = 1.0 - rng.random(per_batch)  # in (0, 1]
        u_near = 1.0 - rng.random(per_batch)
        rho_far = h * u_far ** (-1.0 / sp)
        rho_near = h * u_near ** (1.0 / kappa)
        far = _paired(profile, p, x_radius, dirs[:per_batch] * rho_far[:, None])
        near = _paired(profile, p, x_radius, dirs[per_batch:] * rho_near[:, None])
        far_w = far * (area * h ** (-sp) / sp)
        near_w = near * (area * h ** kappa / kappa) * rho_near ** (-sp - kappa)
        means[b] = far_w.mean() + near_w.mean()
    with np.errstate(invalid="ignore", over="ignore"):
        value = float(means.mean())
        stderr = float(means.std(ddof=1) / math.sqrt(batches))
    if not (math.isfinite(value) and math.isfinite(stderr)):
        raise EstimatorUnstable("estimator unstable: non-finite variance estimate")
    return OracleEstimate(value, stderr, total, int(seed))


def mc_window_sensitivity(profile: RadialProfile, params: ProblemParams, x_radius: float,
                          samples: int = 200_000, seed: int = 0, h: float | None = None):
    """Estimates at window h and h/2 with the same seed; both are unbiased."""
    h = DEFAULT_WINDOW * x_radius if h is None else float(h)
    return (mc_flap(profile, params, x_radius, samples, seed, h),
            mc_flap(profile, params, x_radius, samples, seed, 0.5 * h))


MAX_GRID_NODES = 4096


def _grid_sum(profile, params, x_radius, n, scale, k):
    p, sp = params.p, params.sp
    tau = (np.arange(n) + 0.5) / n
    ratio = tau / (1.0 - tau)
    rho = scale * ratio ** k
    drho = scale * k * ratio ** (k - 1.0) / (1.0 - tau) ** 2 / n
    psi = (np.arange(n) + 0.5) * (math.pi / n)
    dpsi = math.pi / n
    direction = np.stack([np.cos(psi), np.sin(psi)], axis=1)
    total = 0.0
    rows = max(1, 2_000_000 // n)
    for start in range(0, n, rows):
        r_blk = rho[start:start + rows]
        z = (r_blk[:, None, None] * direction[None, :, :]).reshape(-1, 2)
        vals = _paired(profile, p, x_radius, z).reshape(r_blk.size, n)
        # ψ in [0, π) with the pairing covers the full circle
        weight = 2.0 * dpsi * drho[start:start + rows] * r_blk ** (-1.0 - sp)
        total += float(np.sum(vals.sum(axis=1) * weight))
    return total


def grid_flap(profile: RadialProfile, params: ProblemParams, x_radius: float, nodes_per_dim: int = 512,
              window: float | None = None) -> OracleEstimate:
    """Deterministic polar tensor-grid estimate for N = 2.

    The radius is mapped as ρ = window (τ/(1-τ))^k with k chosen so both
    endpoint singularities become integrable at second order; the midpoint
    rule is applied in (τ, ψ). The bracket width is the larger of the
    differences between the full, half and quarter resolution grids.
    """
    if params.N != 2:
        raise ValueError("grid_flap supports N = 2 only")
    if not 2 <= nodes_per_dim <= MAX_GRID_NODES:
        raise ValueError(f"nodes_per_dim must lie in [2, {MAX_GRID_NODES}], got {nodes_per_dim}")
    profile.check(params)
    n = nodes_per_dim + nodes_per_dim % 2
    if _is_constant(profile):
        return OracleEstimate(0.0, 0.0, n * n, 0)
    p, sp = params.p, params.sp
    scale = x_radius if window is None else float(window)
    k = max(1.0, 2.0 / (p - sp), 2.0 / (sp - _growth(profile, p)))
    fine = _grid_sum(profile, params, x_radius, n, scale, k)
    half = n // 2 + (n // 2) % 2
    coarse = _grid_sum(profile, params, x_radius, half, scale, k)
    bracket = abs(fine - coarse)
    if half >= 4:
        # profiles with a kink converge erratically, so one difference can undershoot
        quarter = half // 2 + (half // 2) % 2
        bracket = max(bracket, abs(coarse - _grid_sum(profile, params, x_radius, quarter, scale, k)))
    return OracleEstimate(fine, bracket, n * n, 0)


def fractional_laplacian_constant(N: int, s: float) -> float:
    """C_{N,s} = s 4^s Γ(N/2 + s) / (π^(N/2) Γ(1 - s)), the Fourier normalization."""
    return s * 4.0 ** s * math.gamma(N / 2.0 + s) / (math.pi ** (N / 2.0) * math.gamma(1.0 - s))


def _rgamma(x):
    if x <= 0.0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def power_symbol_p2(N: int, s: float, theta: float) -> float:
    """λ(θ) with (-Δ)^s |x|^-θ = λ(θ) |x|^(-θ-2s) for the Fourier-normalized Laplacian."""
    return (4.0 ** s * math.gamma((theta + 2.0 * s) / 2.0) * math.gamma((N - theta) / 2.0)
            * _rgamma(theta / 2.0) * _rgamma((N - theta - 2.0 * s) / 2.0))


def power_flap_p2(N: int, s: float, theta: float) -> float:
    """C(θ) at p = 2 for the unnormalized integral: λ(θ) / C_{N,s}."""
    return power_symbol_p2(N, s, theta) / fractional_laplacian_constant(N, s)
