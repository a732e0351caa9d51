"""Critical decay exponents of the Hardy p-Laplace problem.

The indicial function

    gamma_mu(g) = g^(p-1) * [(p-1)*g - (N-p)] + mu

controls which power laws r^(-g) are admissible for positive radial
solutions near the origin.  For 1 < p < N and 0 <= mu < mu_bar it has
exactly two nonnegative roots,

    0 <= gamma1 < (N-p)/p < gamma2 <= (N-p)/(p-1),

and gamma1 is the actual singularity strength of finite-energy solutions.
This module houses the parameter record, the indicial function and the
root solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BracketingError, InvalidParams, NoConvergence

__all__ = [
    "ProblemParams",
    "Exponents",
    "mu_bar",
    "gamma_mu",
    "gamma_mu_prime",
    "solve_exponents",
]


@dataclass(frozen=True)
class ProblemParams:
    """Ambient data of the equation: dimension N, exponent p, Hardy strength
    mu and mass coefficient m.

    m may be any real for origin-side work; operations that address the
    behavior at infinity must call :meth:`require_positive_mass`.
    """

    N: float
    p: float
    mu: float = 0.0
    m: float = 1.0

    def __post_init__(self):
        if not (1.0 < self.p < self.N):
            raise InvalidParams(f"need 1 < p < N, got p={self.p}, N={self.N}")
        mb = ((self.N - self.p) / self.p) ** self.p
        if not (0.0 <= self.mu < mb):
            raise InvalidParams(
                f"need 0 <= mu < mu_bar={mb:.9g}, got mu={self.mu}"
            )
        for name in ("N", "p", "mu", "m"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParams(f"{name} must be finite")

    @property
    def p_star(self) -> float:
        """Critical Sobolev exponent N*p/(N-p)."""
        return self.N * self.p / (self.N - self.p)

    def require_positive_mass(self):
        if self.m <= 0.0:
            raise InvalidParams(
                f"this operation concerns the behavior at infinity and needs m > 0, got m={self.m}"
            )


@dataclass(frozen=True)
class Exponents:
    """The two nonnegative roots of the indicial function plus the critical
    Hardy constant they were computed against."""

    gamma1: float
    gamma2: float
    mu_bar: float


def mu_bar(params: ProblemParams) -> float:
    """Best constant ((N-p)/p)^p of the Hardy inequality."""
    return ((params.N - params.p) / params.p) ** params.p


def gamma_mu(gamma: float, params: ProblemParams) -> float:
    """Indicial function gamma^(p-1)*[(p-1)*gamma - (N-p)] + mu, gamma >= 0."""
    if gamma < 0.0:
        raise InvalidParams(f"gamma must be nonnegative, got {gamma}")
    p = params.p
    return gamma ** (p - 1.0) * ((p - 1.0) * gamma - (params.N - p)) + params.mu


def gamma_mu_prime(gamma: float, params: ProblemParams) -> float:
    """Derivative (p-1)*gamma^(p-2)*(p*gamma - (N-p)) of the indicial function.

    Unbounded at gamma=0 when p < 2; callers must safeguard.
    """
    p = params.p
    if gamma == 0.0:
        if p > 2.0:
            return 0.0
        if p == 2.0:
            return -(params.N - p)
        return -math.inf
    return (p - 1.0) * gamma ** (p - 2.0) * (p * gamma - (params.N - p))


def _bisect(fn, lo, hi, tol, max_iter=400):
    flo = fn(lo)
    fhi = fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketingError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid == lo or mid == hi:
            return mid
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    raise NoConvergence(f"bisection budget exhausted on [{lo}, {hi}]")


def _polish_newton(fn, dfn, x, lo, hi, rounds=5):
    # Safeguarded polish: keep iterates inside [lo, hi] and only accept
    # steps that reduce |fn|.
    fx = fn(x)
    for _ in range(rounds):
        d = dfn(x)
        if not math.isfinite(d) or d == 0.0:
            return x
        x_new = x - fx / d
        if not (lo <= x_new <= hi):
            return x
        f_new = fn(x_new)
        if abs(f_new) >= abs(fx):
            return x
        x, fx = x_new, f_new
    return x


def solve_exponents(params: ProblemParams, tol: float = 1e-12) -> Exponents:
    """Solve gamma_mu(gamma) = 0 for the two nonnegative roots.

    Bisection on the sign-definite brackets [0, (N-p)/p] and
    [(N-p)/p, (N-p)/(p-1)], polished by a few safeguarded Newton steps.
    mu = 0 short-circuits to the exact pair (0, (N-p)/(p-1)).
    """
    if tol <= 0.0:
        raise InvalidParams(f"tol must be positive, got {tol}")
    mb = mu_bar(params)
    x_c = (params.N - params.p) / params.p
    x_hi = (params.N - params.p) / (params.p - 1.0)
    if params.mu == 0.0:
        return Exponents(gamma1=0.0, gamma2=x_hi, mu_bar=mb)

    fn = lambda g: gamma_mu(g, params)
    dfn = lambda g: gamma_mu_prime(g, params)
    g1 = _bisect(fn, 0.0, x_c, tol)
    g1 = _polish_newton(fn, dfn, g1, 0.0, x_c)
    g2 = _bisect(fn, x_c, x_hi, tol)
    g2 = _polish_newton(fn, dfn, g2, x_c, x_hi)
    return Exponents(gamma1=g1, gamma2=g2, mu_bar=mb)
