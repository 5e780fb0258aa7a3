"""Radial reduction of the kernel |x - y|^-(N+sp).

For radial u(x) = f(|x|) the N-dimensional principal value integral becomes

    (-Δ_p)^s u(r e) = PV ∫_0^∞ J_p(f(r) - f(ρ)) ρ^(N-1) A(r, ρ) dρ,
    A(r, ρ) = |S^(N-2)| ∫_0^π sin^(N-2)φ (r² + ρ² - 2rρ cos φ)^(-(N+sp)/2) dφ.

A is symmetric and homogeneous of degree -(N+sp), so everything is computed
from A(1, u) with u = ρ/r <= 1. The polar-angle integrand peaks at φ = 0 with
width about |1-u|/sqrt(u); the angle is mapped through φ = w·expm1(τ) so that
uniform panels in τ become geometrically graded panels in φ.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

DIAGONAL_THRESHOLD = 1e-12
_PANEL_WIDTH = 1.0
_CACHE_LIMIT = 2_000_000


def sphere_area(k: int) -> float:
    """Surface measure of the unit sphere S^k in R^(k+1); |S^0| = 2."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


@dataclass(frozen=True)
class AngularKernelSpec:
    N: int
    sp: float
    angular_nodes: int = 16

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        if not self.sp > 0.0:
            raise ValueError(f"sp must be positive, got {self.sp}")
        if self.angular_nodes < 16:
            raise ValueError(f"angular_nodes must be >= 16, got {self.angular_nodes}")

    @property
    def order(self) -> float:
        return self.N + self.sp


class DiagonalError(ValueError):
    pass


class AngularKernel:
    """Evaluator of A(1, u) and the reduced kernel K(u) = u^(N-1) A(1, u).

    Values are cached by abscissa; the cache is guarded by a lock so one
    instance may be shared between threads.
    """

    def __init__(self, spec: AngularKernelSpec):
        self.spec = spec
        self.N = spec.N
        self.sp = spec.sp
        self.q = 0.5 * spec.order
        self.sphere = sphere_area(spec.N - 2)
        # A(1, 0) = |S^(N-1)|, the limit used for origin and far-field asymptotics
        self.limit = sphere_area(spec.N - 1)
        self._nodes, self._weights = np.polynomial.legendre.leggauss(spec.angular_nodes)
        low = max(8, spec.angular_nodes // 2)
        self._nodes_low, self._weights_low = np.polynomial.legendre.leggauss(low)
        self._cache: dict = {}
        self._lock = threading.Lock()

    # -- core angular integral ------------------------------------------------

    def _integrate(self, u, gap, nodes, weights):
        w = gap / np.sqrt(u)
        T = np.log1p(math.pi / w)
        panels = np.maximum(1, np.ceil(T / _PANEL_WIDTH)).astype(int)
        out = np.empty_like(u)
        for count in np.unique(panels):
            sel = panels == count
            ws, Ts, us, gs = w[sel], T[sel], u[sel], gap[sel]
            width = Ts / count
            starts = np.arange(count)[None, :] * width[:, None]
            tau = (starts[:, :, None] + 0.5 * width[:, None, None] * (nodes[None, None, :] + 1.0))
            tau = tau.reshape(ws.size, -1)
            phi = ws[:, None] * np.expm1(tau)
            jac = ws[:, None] * np.exp(tau)
            base = gs[:, None] ** 2 + 4.0 * us[:, None] * np.sin(0.5 * phi) ** 2
            f = base ** (-self.q) * jac
            if self.N > 2:
                f = f * np.sin(phi) ** (self.N - 2)
            wt = np.tile(weights, count)
            out[sel] = 0.5 * width * (f @ wt)
        return self.sphere * out

    def a1(self, u, gap=None, with_error=False):
        """A(1, u) for 0 < u < 1; ``gap`` = 1 - u may be passed exactly."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        gap = 1.0 - u if gap is None else np.atleast_1d(np.asarray(gap, dtype=float))
        if np.any(gap < DIAGONAL_THRESHOLD):
            raise DiagonalError("kernel evaluated on diagonal")
        if np.any(u <= 0.0) or np.any(u > 1.0):
            raise ValueError("a1 expects 0 < u < 1")
        value = self._integrate(u, gap, self._nodes, self._weights)
        if not with_error:
            return value
        coarse = self._integrate(u, gap, self._nodes_low, self._weights_low)
        return value, np.abs(value - coarse)

    def _cached(self, kind, x, compute):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        keys = x.tolist()
        with self._lock:
            found = [self._cache.get((kind, k)) for k in keys]
        missing = [i for i, v in enumerate(found) if v is None]
        if missing:
            idx = np.array(missing)
            fresh = compute(x[idx])
            with self._lock:
                if len(self._cache) > _CACHE_LIMIT:
                    self._cache.clear()
                for i, v in zip(missing, fresh.tolist()):
                    self._cache[(kind, keys[i])] = v
                    found[i] = v
        return np.array(found, dtype=float)

    # -- reduced kernels --------------------------------------------------------

    def reduced(self, u):
        """K(u) = u^(N-1) A(1, u) for u > 0, u != 1."""
        return self._cached("K", u, self._reduced)

    def _reduced(self, u):
        out = np.empty_like(u)
        below = u < 1.0
        ub = u[below]
        out[below] = ub ** (self.N - 1) * self.a1(ub)
        ua = u[~below]
        # A(1, u) = u^-(N+sp) A(1, 1/u) for u > 1
        inv = 1.0 / ua
        out[~below] = ua ** (-1.0 - self.sp) * self.a1(inv, (ua - 1.0) / ua)
        return out

    def reduced_pair(self, h):
        """(K(1-h), K(1+h)) computed from the exact offset h in (0, 1)."""
        lower = self._cached("K-", h, self._reduced_lower)
        upper = self._cached("K+", h, self._reduced_upper)
        return lower, upper

    def _reduced_lower(self, h):
        u = 1.0 - h
        return u ** (self.N - 1) * self.a1(u, h)

    def _reduced_upper(self, h):
        v = 1.0 + h
        return v ** (-1.0 - self.sp) * self.a1(1.0 / v, h / v)

    def a1_excess(self, v):
        """A(1, v) - |S^(N-1)| for 0 < v < 1 (vanishes like v² at 0)."""
        return self._cached("E", v, lambda x: self.a1(x) - self.limit)


_KERNELS: dict = {}
_KERNELS_LOCK = threading.Lock()


def get_kernel(N: int, sp: float, angular_nodes: int = 16) -> AngularKernel:
    key = (int(N), float(sp), int(angular_nodes))
    with _KERNELS_LOCK:
        kernel = _KERNELS.get(key)
        if kernel is None:
            kernel = AngularKernel(AngularKernelSpec(*key))
            _KERNELS[key] = kernel
        return kernel


def angular_kernel(spec: AngularKernelSpec, r: float, rho: float) -> float:
    """A(r, ρ) for r, ρ > 0 off the diagonal."""
    if r <= 0.0 or rho <= 0.0:
        raise ValueError("angular_kernel needs r > 0 and rho > 0")
    big, small = max(r, rho), min(r, rho)
    gap = (big - small) / big
    if gap < DIAGONAL_THRESHOLD:
        raise DiagonalError("kernel evaluated on diagonal")
    kernel = get_kernel(spec.N, spec.sp, spec.angular_nodes)
    return float(big ** (-spec.order) * kernel.a1(small / big, gap)[0])


def diagonal_constant(spec: AngularKernelSpec) -> float:
    """c with A(1, 1 ± h) ~ c h^(-1-sp) as h -> 0."""
    N, sp = spec.N, spec.sp
    return math.pi ** ((N - 1) / 2.0) * math.gamma((1.0 + sp) / 2.0) / math.gamma((N + sp) / 2.0)


def diagonal_asymptote(spec: AngularKernelSpec, r: float, h: float) -> float:
    """Leading-order model c r^(1-N) h^(-1-sp) of A(r, r ± h) for 0 < h << r."""
    if not 0.0 < h:
        raise ValueError("h must be positive")
    return diagonal_constant(spec) * r ** (1.0 - spec.N) * h ** (-1.0 - spec.sp)
