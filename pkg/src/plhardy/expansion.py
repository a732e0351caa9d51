"""Asymptotic expansion of (-u'/u)^(p-1) at infinity.

For a positive decaying radial solution with m > 0 the quantity
phi = (-u'/u)^(p-1) tends to phi_inf = (m/(p-1))^((p-1)/p) and admits the
polynomial-in-1/r expansion

    phi(r) = sum_{i=0..k} c_i / r^i  +  hardy_coeff / r^p  +  O(1/r^(k+1)),

where k is the integer with k <= p < k+1, c0 = phi_inf,
c1 = (N-1)/p * (m/(p-1))^((p-2)/p), and each later c_i solves the linear
relation

    (N-i) c_{i-1} - alpha0 c_i = sum_{n=2..i} F_n(0)/n! * [x^i] S(x)^n,

with alpha0 = p * phi_inf^(1/(p-1)), S(x) = sum_{j>=1} c_j x^j, and F_n(0)
the n-th derivative at 0 of F(t) = (p-1)(c0 + t)^(p/(p-1)).  The Hardy
potential contributes the separate correction hardy_coeff = -mu/alpha0 on
the r^(-p) scale.

The inner composition sums are evaluated as coefficients of truncated
power-series powers (convolution dynamic programming), never by
enumerating compositions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, InvalidParams
from .exponents import ProblemParams

__all__ = [
    "ExpansionSeries",
    "default_order",
    "f_taylor_deriv",
    "build_series",
    "eval_series",
    "log_derivative_prediction",
]


@dataclass(frozen=True)
class ExpansionSeries:
    """Coefficients c_0..c_k plus the Hardy correction on the r^(-p) scale.

    ``extrapolated`` flags orders beyond the justified k <= p < k+1 range;
    such series are still computable (the recursion closes at every order)
    but the placement of the r^(-p) term relative to the tail is then
    heuristic.
    """

    k: int
    c: tuple[float, ...]
    hardy_coeff: float
    alpha0: float
    phi_inf: float
    params: ProblemParams = field(repr=False)
    extrapolated: bool = False


def default_order(p: float) -> int:
    """The unique integer k with k <= p < k+1."""
    return int(math.floor(p))


def f_taylor_deriv(n: int, c0: float, p: float) -> float:
    """n-th derivative at 0 of F(t) = (p-1)*(c0+t)^(p/(p-1)).

    Equals (p-1) * prod_{j=0..n-1} (p/(p-1) - j) * c0^(p/(p-1) - n); the
    empty product is 1, so n=0 returns F(0).
    """
    if n < 0:
        raise InvalidParams(f"n must be >= 0, got {n}")
    if c0 <= 0.0:
        raise InvalidParams(f"c0 must be positive, got {c0}")
    if p <= 1.0:
        raise InvalidParams(f"p must exceed 1, got {p}")
    expo = p / (p - 1.0)
    prod = 1.0
    for j in range(n):
        prod *= expo - j
    return (p - 1.0) * prod * c0 ** (expo - n)


def _conv_trunc(a: list[float], b: list[float], k: int) -> list[float]:
    out = [0.0] * (k + 1)
    for i, ai in enumerate(a):
        if ai == 0.0:
            continue
        top = min(k - i, len(b) - 1)
        for j in range(top + 1):
            out[i + j] += ai * b[j]
    return out


def build_series(params: ProblemParams, k: int | None = None) -> ExpansionSeries:
    """Build the expansion up to order k (default: the integer part of p)."""
    params.require_positive_mass()
    if k is None:
        k = default_order(params.p)
    if k < 0:
        raise InvalidParams(f"k must be >= 0, got {k}")
    N, p, m = params.N, params.p, params.m

    base = m / (p - 1.0)
    phi_inf = base ** ((p - 1.0) / p)
    alpha0 = p * base ** (1.0 / p)
    c = [phi_inf]
    if k >= 1:
        c.append((N - 1.0) / p * base ** ((p - 2.0) / p))
    for i in range(2, k + 1):
        # tail series S(x) = c1*x + ... + c_{i-1}*x^{i-1}; compositions of i
        # into n >= 2 positive parts only touch indices below i.
        tail = [0.0] + c[1:]
        power = tail
        rhs = 0.0
        for n in range(2, i + 1):
            power = _conv_trunc(power, tail, i)
            rhs += f_taylor_deriv(n, phi_inf, p) / math.factorial(n) * power[i]
        c.append(((N - i) * c[i - 1] - rhs) / alpha0)

    return ExpansionSeries(
        k=k,
        c=tuple(c),
        hardy_coeff=-params.mu / alpha0,
        alpha0=alpha0,
        phi_inf=phi_inf,
        params=params,
        extrapolated=k > default_order(p),
    )


def eval_series(series: ExpansionSeries, r: float) -> float:
    """Predicted (-u'/u)^(p-1) at radius r: sum c_i r^-i + hardy_coeff r^-p."""
    if r <= 0.0:
        raise InvalidParams(f"r must be positive, got {r}")
    x = 1.0 / r
    total = 0.0
    for ci in reversed(series.c):
        total = total * x + ci
    return total + series.hardy_coeff * r ** (-series.params.p)


def log_derivative_prediction(series: ExpansionSeries, r: float) -> float:
    """Predicted u'/u at radius r, i.e. -(eval_series)^(1/(p-1)).

    Only defined for radii where the series value is positive.
    """
    val = eval_series(series, r)
    if val <= 0.0:
        raise DomainError(
            f"series value {val} at r={r} is not positive; r too small for this order"
        )
    return -(val ** (1.0 / (series.params.p - 1.0)))
