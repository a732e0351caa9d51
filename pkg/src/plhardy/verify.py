"""Numerical pass/fail diagnostics on computed radial solutions.

Every check here turns a limit or bound claim into something measurable
on a trajectory: a compensated quantity probed at log-spaced radii, a
log-log slope fit, a two-sided envelope constant, a grid-level ordering,
or a quadrature ratio.  Reports serialize to JSON with keys matching the
dataclass field names.  These are consistency tests at desk scale, not
proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .errors import DomainError, InvalidParams, OutOfGrid
from .exponents import Exponents, ProblemParams, mu_bar
from .expansion import ExpansionSeries, eval_series
from .radial_ode import INFINITY_PHI, ORIGIN_W, RadialSolution

__all__ = [
    "LimitReport",
    "RateReport",
    "BoundsReport",
    "W_MINUS_LIMIT",
    "PHI1",
    "probe_radii",
    "origin_limit",
    "infinity_limit",
    "rate_fit",
    "default_origin_rate_bound",
    "expansion_check",
    "bounds_check",
    "comparison_check",
    "hardy_ratio",
]

W_MINUS_LIMIT = "W_MINUS_LIMIT"
PHI1 = "PHI1"


@dataclass
class LimitReport:
    """Convergence of a compensated quantity to a finite positive constant.

    cauchy_variation is the max relative spread of the quantity over the
    probe window; C_estimate is its value at the window end nearest the
    limit point (smallest radius for ORIGIN, largest for INFINITY).
    """

    target: str
    C_estimate: float
    cauchy_variation: float
    window: tuple[float, float]
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RateReport:
    """A fitted vanishing rate against a claimed bound.

    fitted_exponent is the rate at which the quantity vanishes toward the
    window's limit point: the log-log slope itself on origin windows
    (r -> 0) and its negative on infinity windows (r -> oo), so that
    "faster vanishing" is always a larger number and
    passed <=> fitted_exponent >= claimed_bound - fit tolerance.
    """

    fitted_exponent: float
    fit_residual: float
    claimed_bound: float
    passed: bool
    coefficient: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BoundsReport:
    """Envelope constants for the two-sided origin/infinity estimates."""

    origin_upper: float
    origin_lower: float
    infinity_upper: float
    infinity_lower: float
    origin_limit_C: float
    infinity_limit_C: float
    tau0: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def probe_radii(window, per_decade: int = 20) -> np.ndarray:
    """Log-spaced probe radii across a window, at least 8 points."""
    lo, hi = window
    if not (0.0 < lo < hi):
        raise InvalidParams(f"bad window {window}")
    n = max(8, int(math.ceil(per_decade * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, n)


def _spread_report(target, comp_log, window, threshold):
    q = np.exp(comp_log - comp_log[0])  # relative to the reference probe
    c_ref = math.exp(comp_log[0])
    variation = float(q.max() - q.min())
    return LimitReport(
        target=target,
        C_estimate=c_ref,
        cauchy_variation=variation,
        window=(float(window[0]), float(window[1])),
        passed=bool(variation <= threshold and c_ref > 0.0),
    )


def origin_limit(
    sol: RadialSolution,
    gamma1: float,
    window,
    per_decade: int = 20,
    threshold: float = 1e-2,
) -> LimitReport:
    """Probe u(r) r^gamma1 on the window; it should hold a constant."""
    if sol.chart != ORIGIN_W:
        raise InvalidParams("origin_limit expects an ORIGIN_W solution")
    radii = probe_radii(window, per_decade)
    comp = sol.sample_logu(radii) + gamma1 * np.log(radii)
    return _spread_report("ORIGIN", comp, window, threshold)


def infinity_limit(
    sol: RadialSolution,
    params: ProblemParams,
    window,
    per_decade: int = 20,
    threshold: float = 1e-2,
) -> LimitReport:
    """Probe u(r) r^((N-1)/(p(p-1))) e^(beta r) on the window."""
    if sol.chart != INFINITY_PHI:
        raise InvalidParams("infinity_limit expects an INFINITY_PHI solution")
    params.require_positive_mass()
    p = params.p
    a = (params.N - 1.0) / (p * (p - 1.0))
    beta = (params.m / (p - 1.0)) ** (1.0 / p)
    radii = probe_radii(window, per_decade)
    comp = sol.sample_logu(radii) + a * np.log(radii) + beta * radii
    # reference at the largest radius, nearest the limit point
    comp = comp[::-1]
    rep = _spread_report("INFINITY", comp, window, threshold)
    return rep


def _loglog_slope(radii, values):
    mask = values > 0.0
    if mask.sum() < 3:
        raise DomainError("quantity vanishes or oscillates through zero on window")
    x = np.log(radii[mask])
    y = np.log(values[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), resid


def default_origin_rate_bound(params: ProblemParams, gamma1: float) -> float:
    """Claimed lower bound for the vanishing rate of w - gamma1^(p-1) at 0.

    One tenth of d0 = p - (p* - p)(gamma1 + e0) with e0 placed halfway to
    the admissible limit (N-p)/p, so d0 > 0 always.
    """
    gap = (params.N - params.p) / params.p - gamma1
    e0 = 0.5 * gap
    d0 = params.p - (params.p_star - params.p) * (gamma1 + e0)
    return 0.1 * d0


def rate_fit(
    sol: RadialSolution,
    quantity: str,
    window,
    claimed_bound: float | None = None,
    per_decade: int = 20,
    fit_tol: float = 0.15,
    gamma1: float | None = None,
) -> RateReport:
    """Least-squares vanishing-rate fit for a chart quantity.

    W_MINUS_LIMIT fits |w - gamma1^(p-1)| versus r on an origin window
    (positive rate = vanishes at 0); PHI1 fits |phi - phi_inf| on an
    infinity window and additionally reports the linear-in-1/r coefficient
    (which should reproduce the first expansion coefficient).
    """
    radii = probe_radii(window, per_decade)
    p = sol.params.p
    if quantity == W_MINUS_LIMIT:
        if sol.chart != ORIGIN_W:
            raise InvalidParams("W_MINUS_LIMIT lives on the origin chart")
        if gamma1 is None:
            gamma1 = sol.gamma1
        if gamma1 is None:
            raise InvalidParams("gamma1 required for W_MINUS_LIMIT")
        y = np.abs(sol.sample_v(radii) - gamma1 ** (p - 1.0))
        slope, resid = _loglog_slope(radii, y)
        fitted = slope  # vanishing rate as r -> 0
        coeff = None
        if claimed_bound is None:
            claimed_bound = default_origin_rate_bound(sol.params, gamma1)
    elif quantity == PHI1:
        if sol.chart != INFINITY_PHI:
            raise InvalidParams("PHI1 lives on the infinity chart")
        sol.params.require_positive_mass()
        phi_inf = (sol.params.m / (p - 1.0)) ** ((p - 1.0) / p)
        phi1 = sol.sample_v(radii) - phi_inf
        y = np.abs(phi1)
        slope, resid = _loglog_slope(radii, y)
        fitted = -slope  # vanishing rate as r -> oo
        inv_r = 1.0 / radii
        coeff = float(np.dot(phi1, inv_r) / np.dot(inv_r, inv_r))
        if claimed_bound is None:
            claimed_bound = 1.0
    else:
        raise InvalidParams(f"unknown quantity {quantity!r}")
    return RateReport(
        fitted_exponent=fitted,
        fit_residual=resid,
        claimed_bound=float(claimed_bound),
        passed=bool(fitted >= claimed_bound - fit_tol),
        coefficient=coeff,
    )


def expansion_check(
    sol: RadialSolution,
    series: ExpansionSeries,
    window,
    per_decade: int = 20,
    fit_tol: float = 0.15,
) -> RateReport:
    """Fit the decay rate of |phi - predicted series| on an infinity window.

    phi is exactly (-u'/u)^(p-1) on the decreasing branch, which is the
    quantity the series expands, so the mismatch is compared directly.
    Windows where phi <= 0 are refused (u' has turned there and the
    identification fails).
    """
    if sol.chart != INFINITY_PHI:
        raise InvalidParams("expansion_check expects an INFINITY_PHI solution")
    if series.params.p != sol.params.p or series.params.m != sol.params.m:
        raise InvalidParams("series was built for different parameters")
    radii = probe_radii(window, per_decade)
    phi = sol.sample_v(radii)
    if np.any(phi <= 0.0):
        raise DomainError("phi <= 0 inside the window; u' not decreasing there")
    mism = np.abs(phi - np.array([eval_series(series, float(r)) for r in radii]))
    slope, resid = _loglog_slope(radii, mism)
    decay = -slope
    bound = series.k + 1.0
    return RateReport(
        fitted_exponent=decay,
        fit_residual=resid,
        claimed_bound=bound,
        passed=bool(decay >= bound - fit_tol),
    )


def bounds_check(
    origin_sol: RadialSolution,
    infinity_sol: RadialSolution,
    params: ProblemParams,
    exps: Exponents,
    origin_window,
    infinity_window,
    per_decade: int = 20,
) -> BoundsReport:
    """Fit the smallest two-sided envelope constants on both windows.

    Origin side against r^(-gamma1), infinity side against
    r^(-(N-1)/(p(p-1))) e^(-beta r); both pairs must be finite and bracket
    the corresponding limit constants.  Also reports the diagnostic
    exponent offset tau0 from the fitted origin growth (never asserted
    against a reference value; none exists).
    """
    g1 = exps.gamma1
    radii_o = probe_radii(origin_window, per_decade)
    comp_o = np.exp(origin_sol.sample_logu(radii_o) + g1 * np.log(radii_o))
    radii_i = probe_radii(infinity_window, per_decade)
    p = params.p
    a = (params.N - 1.0) / (p * (p - 1.0))
    beta = (params.m / (p - 1.0)) ** (1.0 / p)
    comp_i = np.exp(
        infinity_sol.sample_logu(radii_i) + a * np.log(radii_i) + beta * radii_i
    )
    slope_o, _ = _loglog_slope(radii_o, np.exp(origin_sol.sample_logu(radii_o)))
    tau0 = slope_o + (params.N - params.p) / params.p

    o_up, o_lo = float(comp_o.max()), float(comp_o.min())
    i_up, i_lo = float(comp_i.max()), float(comp_i.min())
    c_o = float(comp_o[0])
    c_i = float(comp_i[-1])
    finite = all(map(math.isfinite, (o_up, o_lo, i_up, i_lo)))
    passed = (
        finite
        and o_lo > 0.0
        and i_lo > 0.0
        and o_lo <= c_o <= o_up
        and i_lo <= c_i <= i_up
    )
    return BoundsReport(
        origin_upper=o_up,
        origin_lower=o_lo,
        infinity_upper=i_up,
        infinity_lower=i_lo,
        origin_limit_C=c_o,
        infinity_limit_C=c_i,
        tau0=float(tau0),
        passed=bool(passed),
    )


def comparison_check(r, u_vals, v_vals, annulus, tol: float = 0.0) -> bool:
    """Grid-level ordering test: does v <= u propagate from the annulus rim?

    Both functions must be tabulated on the same radii spanning the
    annulus, with v <= u already holding at the two boundary radii (that
    is the hypothesis, checked here).  Returns True iff v <= u + tol at
    every interior grid point.  A consistency test, not a proof.
    """
    r = np.asarray(r, dtype=float)
    u_vals = np.asarray(u_vals, dtype=float)
    v_vals = np.asarray(v_vals, dtype=float)
    if r.shape != u_vals.shape or r.shape != v_vals.shape:
        raise InvalidParams("grid mismatch between r, u and v")
    lo, hi = annulus
    mask = (r >= lo) & (r <= hi)
    if mask.sum() < 3:
        raise InvalidParams("annulus contains fewer than 3 grid points")
    idx = np.where(mask)[0]
    first, last = idx[0], idx[-1]
    scale = max(abs(u_vals[first]), abs(u_vals[last]), 1.0)
    if v_vals[first] > u_vals[first] + 1e-12 * scale or v_vals[last] > u_vals[last] + 1e-12 * scale:
        raise InvalidParams("v <= u fails at the annulus boundary; hypothesis violated")
    interior = idx[1:-1]
    return bool(np.all(v_vals[interior] <= u_vals[interior] + tol))


def hardy_ratio(
    phi,
    dphi,
    support,
    params: ProblemParams,
    quadrature_n: int = 2000,
) -> float:
    """Rayleigh-type quotient of the Hardy inequality for a radial test function.

    Returns  int |phi'|^p r^(N-1) dr / int |phi|^p r^(N-1-p) dr,
    computed by composite Simpson quadrature in log radius with
    quadrature_n panels over the support.  Must be >= mu_bar up to
    quadrature error for any admissible test function.
    """
    r_lo, r_hi = support
    if not (0.0 < r_lo < r_hi):
        raise InvalidParams(f"bad support {support}")
    if quadrature_n < 4:
        raise InvalidParams("quadrature_n too small")
    scale = max(abs(phi(0.5 * (r_lo + r_hi))), 1e-300)
    if abs(phi(r_lo)) > 1e-8 * scale or abs(phi(r_hi)) > 1e-8 * scale:
        raise InvalidParams("test function must vanish at both support ends")
    n = quadrature_n + (quadrature_n % 2)  # Simpson needs an even panel count
    s = np.linspace(math.log(r_lo), math.log(r_hi), n + 1)
    r = np.exp(s)
    p = params.p
    phiv = np.array([phi(float(x)) for x in r])
    dphiv = np.array([dphi(float(x)) for x in r])
    # dr = r ds absorbs one power of r into the weight
    num_int = np.abs(dphiv) ** p * r ** (params.N - 1.0) * r
    den_int = np.abs(phiv) ** p * r ** (params.N - 1.0 - p) * r
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (s[-1] - s[0]) / n
    num = h / 3.0 * float(np.dot(w, num_int))
    den = h / 3.0 * float(np.dot(w, den_int))
    if den <= 0.0:
        raise DomainError("denominator integral vanished")
    return num / den
