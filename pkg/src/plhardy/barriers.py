"""Closed-form comparison barriers and a strong-form residual evaluator.

Origin side: w0(r) = r^(-gamma1) (1 + delta r^eps) is a subsolution of
the mass-m homogeneous Hardy equation on a small ball once delta and eps
are chosen from the auxiliary scalar functions

    k(t) = (p-1) t^2 - (N-p) t,
    h(t) = |gamma1 - (gamma1-eps) t|^(p-2) [k(gamma1-eps) t - k(gamma1)]
           - mu |1-t|^(p-2) (1-t),

through the source h_tilde(r) = h(-delta r^eps) / ((1+delta r^eps)^(p-1) r^p).
The bracket reads "k evaluated at gamma1-eps, then multiplied by t"; this
parse is pinned by the closed form

    h'(0) = (p-1) gamma1^(p-2) (-p gamma1 + N - p + eps) eps,

which the finite-difference tests reproduce for all p.

Infinity side: w1(r) = exp(-alpha r) with alpha = ((m-eps)/(p-1))^(1/p)
satisfies the reduced-mass equation with source (N-1) alpha^(p-1) / r
exactly, and the profiles

    v_gamma(r) = r^(-a) exp(-beta r) (1 - gamma r^(-delta)),
    a = (N-1)/(p(p-1)),  beta = (m/(p-1))^(1/p),

satisfy the mass-m equation with source Q(r) built from
A(r) = -v'/v = beta + a/r - delta*gamma*r^(-delta-1)/(1 - gamma r^(-delta)).
Q(r) r^(delta+1) -> Q0 = (m/(p-1))^((p-1)/p) p (p-1) delta gamma, so
gamma=-1 gives an eventual subsolution (Q <= 0) and gamma=+1 with
delta < p-1 an eventual supersolution against the 2 mu / r^p source.

All barrier derivatives here are analytic; finite differences live only in
the independent residual oracle path of ``residual_radial``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from functools import lru_cache

from .errors import DomainError, InvalidParams
from .exponents import ProblemParams, solve_exponents

__all__ = [
    "OriginBarrier",
    "InfinityBarrier",
    "k_func",
    "h_func",
    "h_prime_zero",
    "origin_source",
    "choose_origin_params",
    "exp_profile",
    "A_func",
    "Q_func",
    "Q_leading_coeff",
    "residual_radial",
]


def k_func(t: float, params: ProblemParams) -> float:
    """(p-1) t^2 - (N-p) t."""
    return (params.p - 1.0) * t * t - (params.N - params.p) * t


class NoValidDelta(RuntimeError):
    """The two-sided bound could not be satisfied on the sampled grid."""


@lru_cache(maxsize=256)
def _gamma1_cached(params: ProblemParams) -> float:
    return solve_exponents(params).gamma1


def _gamma1(params: ProblemParams) -> float:
    if params.mu <= 0.0:
        raise InvalidParams(
            "origin barrier machinery needs mu > 0 (mu = 0 makes gamma1 = 0 "
            "and the h'(0) factor degenerate)"
        )
    return _gamma1_cached(params)


def h_func(t: float, params: ProblemParams, eps: float) -> float:
    """Barrier source profile; h(0) = 0 and h'(0) > 0 for 0 < eps."""
    p = params.p
    g1 = _gamma1(params)
    lead = abs(g1 - (g1 - eps) * t) ** (p - 2.0)
    one_mt = 1.0 - t
    return lead * (k_func(g1 - eps, params) * t - k_func(g1, params)) - params.mu * abs(
        one_mt
    ) ** (p - 2.0) * one_mt


def h_prime_zero(params: ProblemParams, eps: float) -> float:
    """Closed form (p-1) gamma1^(p-2) (-p gamma1 + N - p + eps) eps."""
    p = params.p
    g1 = _gamma1(params)
    return (p - 1.0) * g1 ** (p - 2.0) * (-p * g1 + params.N - p + eps) * eps


@dataclass(frozen=True)
class OriginBarrier:
    """w0(r) = r^(-gamma1) (1 + delta r^eps) with 0 < delta < 1, 0 < eps < p."""

    delta: float
    eps: float
    gamma1: float
    params: ProblemParams = field(repr=False)

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise InvalidParams(f"delta must be in (0,1), got {self.delta}")
        if not (0.0 < self.eps < self.params.p):
            raise InvalidParams(f"eps must be in (0,p), got {self.eps}")
        if self.params.mu <= 0.0:
            raise InvalidParams("origin barrier needs mu > 0")

    @classmethod
    def make(cls, params: ProblemParams, delta: float, eps: float) -> "OriginBarrier":
        return cls(delta=delta, eps=eps, gamma1=_gamma1(params), params=params)

    def value(self, r: float) -> float:
        return r ** (-self.gamma1) * (1.0 + self.delta * r**self.eps)

    def d1(self, r: float) -> float:
        g, d, e = self.gamma1, self.delta, self.eps
        return -g * r ** (-g - 1.0) + d * (e - g) * r ** (e - g - 1.0)

    def d2(self, r: float) -> float:
        g, d, e = self.gamma1, self.delta, self.eps
        return g * (g + 1.0) * r ** (-g - 2.0) + d * (e - g) * (e - g - 1.0) * r ** (
            e - g - 2.0
        )


def origin_source(b: OriginBarrier, r: float, params: ProblemParams) -> float:
    """h_tilde(r) = h(-delta r^eps) / ((1 + delta r^eps)^(p-1) r^p)."""
    if r <= 0.0:
        raise InvalidParams(f"r must be positive, got {r}")
    t = -b.delta * r**b.eps
    return h_func(t, params, b.eps) / ((1.0 - t) ** (params.p - 1.0) * r**params.p)


def choose_origin_params(
    params: ProblemParams,
    m: float | None = None,
    t_samples: int = 64,
    r_samples: int = 400,
):
    """Pick (delta_h, eps, r2) for the origin barrier.

    delta_h is the largest delta on the geometric grid {2^-j} such that
    2 h'(0) t <= h(t) <= h'(0) t / 2 holds at every sampled t in
    [-delta_h, 0); eps defaults to p/2; r2 is the largest radius on a
    log-spaced sample with h_tilde(r) <= -m throughout (0, r2].
    """
    if m is None:
        m = params.m
    eps = params.p / 2.0
    hp0 = h_prime_zero(params, eps)
    if hp0 <= 0.0:
        raise InvalidParams(f"h'(0)={hp0} not positive; invalid parameters")

    delta_h = None
    for j in range(1, 52):
        cand = 2.0**-j
        ts = -cand * (np.arange(1, t_samples + 1) / t_samples)
        ok = True
        for t in ts:
            ht = h_func(float(t), params, eps)
            if not (2.0 * hp0 * t <= ht <= 0.5 * hp0 * t):
                ok = False
                break
        if ok:
            delta_h = cand
            break
    if delta_h is None:
        raise NoValidDelta(
            "two-sided linearization bound failed at every sampled delta"
        )

    barrier = OriginBarrier.make(params, delta_h, eps)
    radii = np.geomspace(1e-8, 1.0, r_samples)
    good = [origin_source(barrier, float(r), params) <= -m for r in radii]
    r2 = 0.0
    for r, g in zip(radii, good):
        if not g:
            break
        r2 = float(r)
    if r2 == 0.0:
        raise NoValidDelta(f"h_tilde never dips below -m={-m} on the sampled radii")
    return delta_h, eps, r2


def exp_profile(r: float, alpha: float, params: ProblemParams):
    """Pure exponential e^(-alpha r) and its exact source term.

    With mass m - eps = alpha^p (p-1), the profile satisfies the radial
    equation with source (N-1) alpha^(p-1) / r times the profile's
    (p-1)-power; the returned pair is (value, source coefficient).
    """
    if r <= 0.0 or alpha <= 0.0:
        raise InvalidParams("need r > 0 and alpha > 0")
    return math.exp(-alpha * r), (params.N - 1.0) * alpha ** (params.p - 1.0) / r


@dataclass(frozen=True)
class InfinityBarrier:
    """v_gamma(r) = r^(-a) e^(-beta r) (1 - gamma r^(-delta)).

    delta must sit in (0, 1/2); the subsolution use additionally requires
    delta < p-1, enforced by callers that need it.  gamma is +-1 in the
    comparison arguments but any real is accepted.
    """

    gamma: float
    delta: float
    params: ProblemParams = field(repr=False)
    alpha_decay: float = field(init=False)
    beta: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.delta < 0.5):
            raise InvalidParams(f"delta must be in (0, 1/2), got {self.delta}")
        self.params.require_positive_mass()
        p = self.params.p
        object.__setattr__(self, "alpha_decay", (self.params.N - 1.0) / (p * (p - 1.0)))
        object.__setattr__(self, "beta", (self.params.m / (p - 1.0)) ** (1.0 / p))

    def _bracket(self, r: float) -> float:
        b = 1.0 - self.gamma * r**-self.delta
        if b <= 0.0:
            raise DomainError(
                f"1 - gamma r^-delta = {b} <= 0 at r={r}; profile pole"
            )
        return b

    def value(self, r: float) -> float:
        return r**-self.alpha_decay * math.exp(-self.beta * r) * self._bracket(r)

    def d1(self, r: float) -> float:
        A, _ = A_func(self, r)
        return -A * self.value(r)

    def d2(self, r: float) -> float:
        A, dA = A_func(self, r)
        return (A * A - dA) * self.value(r)


def A_func(b: InfinityBarrier, r: float):
    """(A, dA) with A = -v'/v for the decaying profile.

    A(r) = beta + a/r - delta*gamma*r^(-delta-1) / (1 - gamma r^(-delta)).
    The last sign makes the profile with gamma > 0 decay slower than its
    envelope (its bracket grows toward 1), which is what pins
    Q0 = phi_inf * p (p-1) delta gamma below.
    """
    if r <= 0.0:
        raise InvalidParams(f"r must be positive, got {r}")
    g, d = b.gamma, b.delta
    denom = b._bracket(r)
    A = b.beta + b.alpha_decay / r - d * g * r ** (-d - 1.0) / denom
    # exact quotient-rule derivative of the last term
    num_d = -(d + 1.0) * r ** (-d - 2.0) * denom - d * g * r ** (-2.0 * d - 2.0)
    dA = -b.alpha_decay / r**2 - d * g * num_d / (denom * denom)
    return A, dA


def Q_func(b: InfinityBarrier, r: float, params: ProblemParams) -> float:
    """Exact source of the mass-m equation for the profile v_gamma.

    Q = m + (p-1) A^(p-2) dA - (p-1) A^p + (N-1)/r A^(p-1), all analytic.
    """
    A, dA = A_func(b, r)
    p = params.p
    return (
        params.m
        + (p - 1.0) * A ** (p - 2.0) * dA
        - (p - 1.0) * A**p
        + (params.N - 1.0) / r * A ** (p - 1.0)
    )


def Q_leading_coeff(b: InfinityBarrier, params: ProblemParams) -> float:
    """Limit of Q(r) r^(delta+1): phi_inf * p * (p-1) * delta * gamma."""
    p = params.p
    phi_inf = (params.m / (p - 1.0)) ** ((p - 1.0) / p)
    return phi_inf * p * (p - 1.0) * b.delta * b.gamma


def _tabulated_derivs(r_grid, u_grid, r, du_grid=None):
    r_grid = np.asarray(r_grid, dtype=float)
    u_grid = np.asarray(u_grid, dtype=float)
    idx = int(np.argmin(np.abs(r_grid - r)))
    if idx == 0 or idx == len(r_grid) - 1:
        raise DomainError(
            f"insufficient stencil at grid edge (r={r}); need an interior point"
        )
    x0, x1, x2 = r_grid[idx - 1 : idx + 2]
    y0, y1, y2 = u_grid[idx - 1 : idx + 2]
    h1, h2 = x1 - x0, x2 - x1
    # three-point formulas valid on nonuniform grids
    d1 = (y2 * h1**2 - y0 * h2**2 + y1 * (h2**2 - h1**2)) / (h1 * h2 * (h1 + h2))
    d2 = 2.0 * (y0 * h2 + y2 * h1 - y1 * (h1 + h2)) / (h1 * h2 * (h1 + h2))
    if du_grid is not None:
        d1 = float(np.interp(r, r_grid, np.asarray(du_grid, dtype=float)))
    return float(u_grid[idx]), float(d1), float(d2), float(r_grid[idx])


def residual_radial(
    uf,
    r: float,
    params: ProblemParams,
    f=None,
    mass: float | None = None,
    include_hardy: bool = True,
) -> float:
    """Strong-form residual of the radial equation at radius r.

    residual = -(p-1)|u'|^(p-2) u'' - (N-1)/r |u'|^(p-2) u'
               - mu/r^p |u|^(p-2) u + mass |u|^(p-2) u - f(u)

    so a function solving the equation with the given mass and Hardy term
    produces zero.  ``uf`` is either a triple of callables (u, u', u''),
    an object with value/d1/d2 methods, or a tabulated pair
    (r_grid, u_grid) whose derivatives are taken by centered differences
    (the independent oracle route; raises at grid edges).
    """
    if mass is None:
        mass = params.m
    if f is None:
        fval = lambda u: 0.0
    elif callable(f):
        fval = f
    else:
        fval = f  # Nonlinearity instances are callable

    if hasattr(uf, "value"):
        u, du, d2u = uf.value(r), uf.d1(r), uf.d2(r)
    elif isinstance(uf, tuple) and len(uf) == 3 and all(callable(g) for g in uf):
        u, du, d2u = uf[0](r), uf[1](r), uf[2](r)
    elif isinstance(uf, tuple) and len(uf) in (2, 3):
        grids = uf if len(uf) == 3 else (*uf, None)
        u, du, d2u, r = _tabulated_derivs(grids[0], grids[1], r, du_grid=grids[2])
    else:
        raise InvalidParams("uf must be callables, a value/d1/d2 object, or grids")

    p = params.p
    adu = abs(du)
    if p == 2.0:
        grad_factor = 1.0
    elif adu > 0.0:
        grad_factor = adu ** (p - 2.0)
    else:
        grad_factor = 0.0 if p > 2.0 else math.inf
    au = abs(u)
    u_pow = au ** (p - 2.0) * u if au > 0.0 else 0.0
    res = (
        -(p - 1.0) * grad_factor * d2u
        - (params.N - 1.0) / r * grad_factor * du
        + mass * u_pow
        - fval(u)
    )
    if include_hardy:
        res -= params.mu / r**p * u_pow
    return res
