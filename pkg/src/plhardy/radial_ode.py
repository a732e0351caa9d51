"""Radial dynamics in desingularized charts, and amplitude shooting.

The radial equation

    -(r^(N-1) |u'|^(p-2) u')' = r^(N-1) (mu/r^p u^(p-1) - m u^(p-1) + f(u))

is integrated in two charts that keep the state bounded where (u, u')
degenerates:

ORIGIN_W      state (w, log u) with w = -r^(p-1) |u'|^(p-2) u' / u^(p-1).
              Near r=0 a positive solution has w -> gamma1^(p-1) while u'
              itself blows up like r^(-gamma1-1) when mu > 0.
              w' = (1/r) * [(p-1)|w|^(p/(p-1)) - (N-p) w + mu]
                   + r^(p-1) * (-m + f(u)/u^(p-1)),
              (log u)' = -psi(w)/r,  psi(x) = sign(x)|x|^(1/(p-1)).
              The |w| power is the odd-extension reading of the indicial
              function evaluated at psi(w); for w >= 0 it is exactly
              gamma_mu(w^(1/(p-1))) and it remains the true dynamics when
              u' changes sign.

INFINITY_PHI  state (phi, log u) with phi = -|u'|^(p-2) u' / u^(p-1).
              For a decaying solution phi -> (m/(p-1))^((p-1)/p).
              phi' = (p-1)|phi|^(p/(p-1)) - (N-1)/r phi + mu/r^p - m
                     + f(u)/u^(p-1),
              (log u)' = -psi(phi).

Both right-hand sides are pure float functions (the state has just two
components, so plain floats beat array machinery by a wide margin).  The
integrator is an adaptive embedded Cash-Karp 5(4) pair; the origin chart
is stepped internally in log r, which removes the 1/r scale separation at
r0 ~ 1e-6.  Accepted steps form the stored grid.

Ground states are located by bisecting the amplitude C of the origin
ansatz u ~ C r^(-gamma1): too-large amplitudes drive u toward a zero
crossing (w -> +infinity), too-small ones make u' turn positive
(w < 0), and the classifier watches w alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BracketingError,
    DomainError,
    InvalidParams,
    NoConvergence,
    OutOfGrid,
)
from .exponents import ProblemParams, solve_exponents

__all__ = [
    "ORIGIN_W",
    "INFINITY_PHI",
    "Nonlinearity",
    "Caps",
    "default_caps",
    "RadialSolution",
    "rhs_origin",
    "rhs_infinity",
    "integrate",
    "ShootResult",
    "shoot_ground_state",
    "handoff",
    "BLOWUP",
    "TURNUP",
    "UNDECIDED",
]

ORIGIN_W = "ORIGIN_W"
INFINITY_PHI = "INFINITY_PHI"

# trajectory classifications used by the shooting dichotomy
BLOWUP = "TYPE_BLOWUP"
TURNUP = "TYPE_TURNUP"
UNDECIDED = "UNDECIDED"

_TINY_BASE = 1e-300
_EXP_CLAMP = 690.0


def signed_pow(x: float, expo: float) -> float:
    """sign(x) * |x|^expo with a guard for denormal bases."""
    ax = abs(x)
    if ax <= _TINY_BASE:
        return 0.0
    return math.copysign(ax**expo, x)


@dataclass(frozen=True)
class Nonlinearity:
    """f(u) = sum a_j |u|^(e_j - 2) u, with declared growth data.

    q is the subcritical growth exponent at 0 (min of the e_j) and A the
    growth constant; both exist so that callers can state the smallness of
    f(u)/u^(p-1) without re-deriving it from the terms.
    """

    terms: tuple[tuple[float, float], ...]
    q: float
    A: float

    @classmethod
    def powers(cls, terms, params: ProblemParams) -> "Nonlinearity":
        """Build from (coefficient, exponent) pairs, checking p < e <= p*."""
        terms = tuple((float(a), float(e)) for a, e in terms)
        p, p_star = params.p, params.p_star
        for a, e in terms:
            if not (p < e <= p_star + 1e-12):
                raise InvalidParams(
                    f"exponent {e} outside (p, p*] = ({p}, {p_star:.9g}]"
                )
        if terms:
            q = min(e for _, e in terms)
            A = sum(abs(a) for a, _ in terms)
        else:
            q, A = p + 1.0, 0.0
        return cls(terms=terms, q=q, A=A)

    @classmethod
    def zero(cls, params: ProblemParams) -> "Nonlinearity":
        return cls.powers((), params)

    def __call__(self, u: float) -> float:
        au = abs(u)
        if au <= _TINY_BASE:
            return 0.0
        return sum(a * au ** (e - 2.0) * u for a, e in self.terms)

    def ratio(self, logu: float, p: float) -> float:
        """f(u)/u^(p-1) evaluated from log u (u > 0), with overflow clamp."""
        total = 0.0
        for a, e in self.terms:
            arg = (e - p) * logu
            if arg > _EXP_CLAMP:
                arg = _EXP_CLAMP
            total += a * math.exp(arg)
        return total


@dataclass(frozen=True)
class Caps:
    """Termination guards for a single integration run."""

    v_max: float
    v_min: float = 0.0
    logu_max: float = 250.0
    logu_min: float = -740.0
    max_steps: int = 400_000
    min_step: float = 1e-13


def default_caps(params: ProblemParams, chart: str = ORIGIN_W) -> Caps:
    """Chart-appropriate caps.

    The w cap is 10x the larger of the two natural scales: the upper
    indicial root gamma2^(p-1) and the decay slope scale
    ((m+1)/(p-1))^(p-1).  In the w chart a healthy decaying solution grows
    roughly like (beta*r)^(p-1), so the cap is generous near the origin and
    doubles as the zero-crossing detector at large radius.
    """
    p, m = params.p, params.m
    exps = solve_exponents(params)
    slope_scale = ((abs(m) + 1.0) / (p - 1.0)) ** (p - 1.0)
    w_scale = max(exps.gamma2 ** (p - 1.0), slope_scale)
    if chart == ORIGIN_W:
        return Caps(v_max=10.0 * w_scale)
    return Caps(v_max=10.0 * max(1.0, slope_scale))


@dataclass
class RadialSolution:
    """One integrated trajectory: grid radii, log u, and the chart variable.

    v holds w on ORIGIN_W and phi on INFINITY_PHI.  u stays positive by
    construction (it lives in log coordinates), and u' is recoverable as
    u' = -u * psi(v)/r  (origin chart)  or  u' = -u * psi(v)  (infinity
    chart).
    """

    chart: str
    r: np.ndarray
    logu: np.ndarray
    v: np.ndarray
    params: ProblemParams
    f: Nonlinearity
    amplitude: float | None = None
    gamma1: float | None = None
    termination: str = "reached_r_end"
    stop_state: tuple[float, float, float] | None = None

    def u(self) -> np.ndarray:
        return np.exp(self.logu)

    def uprime(self) -> np.ndarray:
        pm1 = self.params.p - 1.0
        psi = np.sign(self.v) * np.abs(self.v) ** (1.0 / pm1)
        if self.chart == ORIGIN_W:
            return -np.exp(self.logu) * psi / self.r
        return -np.exp(self.logu) * psi

    def _check_cover(self, r_pts):
        r_pts = np.asarray(r_pts, dtype=float)
        if r_pts.min() < self.r[0] * (1 - 1e-12) or r_pts.max() > self.r[-1] * (1 + 1e-12):
            raise OutOfGrid(
                f"requested radii [{r_pts.min():g}, {r_pts.max():g}] outside grid "
                f"[{self.r[0]:g}, {self.r[-1]:g}]"
            )
        return r_pts

    def sample_state(self, r_pts, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
        """Dense output by local re-integration.

        Each requested radius is reached by a short accurate hop of the
        chart dynamics from the nearest stored node, so off-grid values
        inherit integrator accuracy instead of interpolation error (the
        accepted steps can be wide where the dynamics is tame, and plain
        interpolation would dominate fine asymptotic mismatches).
        """
        r_pts = self._check_cover(r_pts)
        v_out = np.empty(r_pts.shape)
        l_out = np.empty(r_pts.shape)
        for idx_out, rp in enumerate(r_pts.ravel()):
            i = int(np.searchsorted(self.r, rp))
            i = min(max(i, 1), len(self.r) - 1)
            if abs(self.r[i - 1] - rp) <= abs(self.r[i] - rp):
                i -= 1
            v, lu = _hop(
                self.chart,
                float(self.r[i]),
                float(self.v[i]),
                float(self.logu[i]),
                float(rp),
                self.params,
                self.f,
                tol,
            )
            v_out.ravel()[idx_out] = v
            l_out.ravel()[idx_out] = lu
        return v_out, l_out

    def sample_logu(self, r_pts) -> np.ndarray:
        return self.sample_state(r_pts)[1]

    def sample_v(self, r_pts) -> np.ndarray:
        return self.sample_state(r_pts)[0]


def rhs_origin(r, w, logu, params: ProblemParams, f: Nonlinearity):
    """(dw/dr, dlogu/dr) for the origin chart."""
    p = params.p
    pm1 = p - 1.0
    aw = abs(w)
    even_pow = 0.0 if aw <= _TINY_BASE else aw ** (p / pm1)
    indicial = pm1 * even_pow - (params.N - p) * w + params.mu
    dw = indicial / r + r**pm1 * (-params.m + f.ratio(logu, p))
    dlogu = -signed_pow(w, 1.0 / pm1) / r
    return dw, dlogu


def rhs_infinity(r, phi, logu, params: ProblemParams, f: Nonlinearity):
    """(dphi/dr, dlogu/dr) for the infinity chart."""
    p = params.p
    pm1 = p - 1.0
    aphi = abs(phi)
    even_pow = 0.0 if aphi <= _TINY_BASE else aphi ** (p / pm1)
    dphi = (
        pm1 * even_pow
        - (params.N - 1.0) / r * phi
        + params.mu / r**p
        - params.m
        + f.ratio(logu, p)
    )
    dlogu = -signed_pow(phi, 1.0 / pm1)
    return dphi, dlogu


# Cash-Karp 5(4) embedded pair.  The 5th order solution is propagated and
# the difference to the embedded 4th order one estimates the local error.
_CK_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (3 / 10, -9 / 10, 6 / 5),
    (-11 / 54, 5 / 2, -70 / 27, 35 / 27),
    (1631 / 55296, 175 / 512, 575 / 13824, 44275 / 110592, 253 / 4096),
)
_CK_B5 = (37 / 378, 0.0, 250 / 621, 125 / 594, 0.0, 512 / 1771)
_CK_B4 = (2825 / 27648, 0.0, 18575 / 48384, 13525 / 55296, 277 / 14336, 1 / 4)
_CK_E = tuple(b5 - b4 for b5, b4 in zip(_CK_B5, _CK_B4))
_CK_C = (0.0, 1 / 5, 3 / 10, 3 / 5, 1.0, 7 / 8)


def _ck_step(deriv, t, y0, y1, h):
    """One Cash-Karp step on a 2-component system.

    Returns (y0_new, y1_new, err0, err1).  deriv(t, y0, y1) -> (d0, d1).
    """
    k0 = deriv(t, y0, y1)
    ks = [k0]
    for i in range(1, 6):
        a = _CK_A[i]
        s0 = 0.0
        s1 = 0.0
        for j, aij in enumerate(a):
            s0 += aij * ks[j][0]
            s1 += aij * ks[j][1]
        ks.append(deriv(t + _CK_C[i] * h, y0 + h * s0, y1 + h * s1))
    acc0 = acc1 = err0 = err1 = 0.0
    for b, e, k in zip(_CK_B5, _CK_E, ks):
        acc0 += b * k[0]
        acc1 += b * k[1]
        err0 += e * k[0]
        err1 += e * k[1]
    return y0 + h * acc0, y1 + h * acc1, h * err0, h * err1


def _march(deriv, t0, t_end, y0, y1, tol, caps: Caps, cap_check):
    """Adaptive march from t0 to t_end (either direction).

    cap_check(v, logu) returns a termination reason or None; it sees every
    candidate accepted state before it is committed to the grid, so the
    stored trajectory never contains a cap-violating point.
    Returns (ts, v_list, logu_list, termination, stop_state).
    """
    direction = 1.0 if t_end >= t0 else -1.0
    span = abs(t_end - t0)
    if span == 0.0:
        return [t0], [y0], [y1], "reached_r_end", None
    h = direction * min(1e-2 * span, 0.1)
    min_h = max(caps.min_step, 1e-15 * span)

    ts = [t0]
    vs = [y0]
    ls = [y1]
    t, v, lu = t0, y0, y1
    termination = "reached_r_end"
    stop_state = None
    for _ in range(caps.max_steps):
        if direction * (t - t_end) >= 0.0:
            break
        if direction * (t + h - t_end) > 0.0:
            h = t_end - t
        v_new, lu_new, e0, e1 = _ck_step(deriv, t, v, lu, h)
        bad = not (math.isfinite(v_new) and math.isfinite(lu_new))
        if not bad:
            sc0 = tol * (1.0 + max(abs(v), abs(v_new)))
            sc1 = tol * (1.0 + max(abs(lu), abs(lu_new)))
            err = max(abs(e0) / sc0, abs(e1) / sc1)
        if bad or err > 1.0:
            h *= 0.2 if bad else max(0.2, 0.9 * err**-0.2)
            if abs(h) < min_h:
                termination = "step_underflow"
                stop_state = (t, v, lu)
                break
            continue
        t += h
        reason = cap_check(v_new, lu_new)
        if reason is not None:
            termination = reason
            stop_state = (t, v_new, lu_new)
            break
        v, lu = v_new, lu_new
        ts.append(t)
        vs.append(v)
        ls.append(lu)
        h *= min(5.0, max(0.2, 0.9 * err**-0.2)) if err > 0.0 else 5.0
    else:
        termination = "max_steps"
        stop_state = (t, v, lu)
    return ts, vs, ls, termination, stop_state


def _hop(chart, r_from, v0, logu0, r_to, params, f, tol):
    """Integrate one chart over a short stretch, returning the end state."""
    if r_from == r_to:
        return v0, logu0
    loose = Caps(v_max=math.inf, v_min=-math.inf, logu_max=math.inf, logu_min=-math.inf)
    if chart == ORIGIN_W:

        def deriv(s, w, lu):
            r = math.exp(s)
            dw, dlu = rhs_origin(r, w, lu, params, f)
            return dw * r, dlu * r

        ts, vs, ls, term, _ = _march(
            deriv, math.log(r_from), math.log(r_to), v0, logu0, tol, loose,
            lambda v, lu: None,
        )
    else:

        def deriv(r, phi, lu):
            return rhs_infinity(r, phi, lu, params, f)

        ts, vs, ls, term, _ = _march(
            deriv, r_from, r_to, v0, logu0, tol, loose, lambda v, lu: None
        )
    if term != "reached_r_end":
        raise NoConvergence(f"dense-output hop failed: {term}")
    return vs[-1], ls[-1]


def integrate(
    chart: str,
    init: tuple[float, float, float],
    r_end: float,
    params: ProblemParams,
    f: Nonlinearity | None = None,
    tol: float = 1e-10,
    caps: Caps | None = None,
) -> RadialSolution:
    """Integrate one chart from (r0, v0, logu0) toward r_end.

    Adaptive embedded 5(4) stepping with per-step local error below tol
    (mixed absolute/relative scale).  The accepted steps form the grid.
    r_end < r0 integrates backward; grids are always stored with r
    increasing.  A triggered cap terminates the run early with the reason
    recorded in ``termination`` (classification data, not an error); only
    step-size underflow and step-budget exhaustion are likewise recorded.
    """
    if chart not in (ORIGIN_W, INFINITY_PHI):
        raise InvalidParams(f"unknown chart {chart!r}")
    r0, v0, logu0 = init
    if r0 <= 0.0 or r_end <= 0.0:
        raise InvalidParams("radii must be positive")
    if tol <= 0.0:
        raise InvalidParams("tol must be positive")
    if f is None:
        f = Nonlinearity.zero(params)
    if caps is None:
        caps = default_caps(params, chart)

    def cap_check(v, lu):
        if v >= caps.v_max:
            return "v_above_cap"
        if v < caps.v_min:
            return "v_below_min"
        if lu >= caps.logu_max:
            return "logu_above_cap"
        if lu <= caps.logu_min:
            return "logu_below_cap"
        return None

    if chart == ORIGIN_W:
        # step in s = log r: dw/ds = indicial(w) + r^p (-m + ratio), which
        # removes the 1/r factor entirely
        def deriv(s, w, lu):
            r = math.exp(s)
            dw, dlu = rhs_origin(r, w, lu, params, f)
            return dw * r, dlu * r

        ts, vs, ls, term, stop = _march(
            deriv, math.log(r0), math.log(r_end), v0, logu0, tol, caps, cap_check
        )
        rs = np.exp(np.asarray(ts))
        if stop is not None:
            stop = (math.exp(stop[0]), stop[1], stop[2])
    else:

        def deriv(r, phi, lu):
            return rhs_infinity(r, phi, lu, params, f)

        ts, vs, ls, term, stop = _march(
            deriv, r0, r_end, v0, logu0, tol, caps, cap_check
        )
        rs = np.asarray(ts)

    v_arr = np.asarray(vs)
    l_arr = np.asarray(ls)
    if rs.size > 1 and rs[1] < rs[0]:
        rs, v_arr, l_arr = rs[::-1].copy(), v_arr[::-1].copy(), l_arr[::-1].copy()
    return RadialSolution(
        chart=chart,
        r=rs,
        logu=l_arr,
        v=v_arr,
        params=params,
        f=f,
        termination=term,
        stop_state=stop,
    )


@dataclass
class ShootResult:
    """Outcome of the amplitude bisection."""

    c_star: float
    solution: RadialSolution
    history: list[tuple[float, str, float]]  # (C, classification, last r)
    orientation: str  # which bracket end blows up: "high" or "low"
    bracket: tuple[float, float]


def _classify(sol: RadialSolution, w_ref: float) -> str:
    if sol.termination == "v_above_cap":
        return BLOWUP
    if sol.termination in ("v_below_min", "logu_above_cap"):
        return TURNUP
    if sol.termination == "reached_r_end":
        # Reached r_max uncapped.  For bisection bookkeeping, side with the
        # end state: above the decay-consistent scale (beta*r)^(p-1) the
        # trajectory is on its way up.
        return UNDECIDED if sol.v[-1] <= w_ref else BLOWUP
    raise NoConvergence(f"integration terminated with {sol.termination}")


def shoot_ground_state(
    params: ProblemParams,
    f: Nonlinearity,
    C_lo: float,
    C_hi: float,
    r0: float = 1e-6,
    r_max: float = 25.0,
    tol_C: float = 1e-10,
    caps: Caps | None = None,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> ShootResult:
    """Bisect the origin amplitude C until the ground state is bracketed.

    Initial data encode the origin behavior u ~ C r^(-gamma1):
    w(r0) = gamma1^(p-1), log u(r0) = log C - gamma1 log r0.  The two
    bracket endpoints must classify differently (TYPE_BLOWUP vs
    TYPE_TURNUP as seen through w); which side is which is discovered
    empirically and recorded in ``orientation``.
    """
    params.require_positive_mass()
    if not (0.0 < C_lo < C_hi):
        raise InvalidParams(f"need 0 < C_lo < C_hi, got {C_lo}, {C_hi}")
    if caps is None:
        caps = default_caps(params, ORIGIN_W)
    gamma1 = solve_exponents(params).gamma1
    w0 = gamma1 ** (params.p - 1.0) if gamma1 > 0.0 else 0.0
    beta = (params.m / (params.p - 1.0)) ** (1.0 / params.p)
    w_ref = (beta * r_max) ** (params.p - 1.0)

    def run(C):
        init = (r0, w0, math.log(C) - gamma1 * math.log(r0))
        sol = integrate(ORIGIN_W, init, r_max, params, f, tol=tol, caps=caps)
        sol.amplitude = C
        sol.gamma1 = gamma1
        return sol, _classify(sol, w_ref)

    history: list[tuple[float, str, float]] = []
    best: RadialSolution | None = None

    def consider(sol, cls):
        nonlocal best
        history.append((sol.amplitude, cls, float(sol.r[-1])))
        if best is None:
            best = sol
            return
        best_undecided = best.termination == "reached_r_end"
        sol_undecided = sol.termination == "reached_r_end"
        if sol_undecided and not best_undecided:
            best = sol
        elif sol_undecided == best_undecided and sol.r[-1] >= best.r[-1]:
            best = sol

    lo, hi = C_lo, C_hi
    sol_lo, cls_lo = run(lo)
    consider(sol_lo, cls_lo)
    sol_hi, cls_hi = run(hi)
    consider(sol_hi, cls_hi)
    side_lo = BLOWUP if cls_lo == BLOWUP else TURNUP
    side_hi = BLOWUP if cls_hi == BLOWUP else TURNUP
    if side_lo == side_hi:
        raise BracketingError(
            f"both amplitudes classify as {side_lo}; widen the bracket "
            f"({C_lo} -> {cls_lo}, {C_hi} -> {cls_hi})"
        )
    orientation = "high" if side_hi == BLOWUP else "low"

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= tol_C * mid or mid == lo or mid == hi:
            break
        sol_mid, cls_mid = run(mid)
        consider(sol_mid, cls_mid)
        side_mid = BLOWUP if cls_mid == BLOWUP else TURNUP
        if side_mid == side_hi:
            hi = mid
        else:
            lo = mid
    else:
        raise NoConvergence(
            f"no ground state detected within {max_iter} bisection iterations"
        )

    c_star = 0.5 * (lo + hi)
    sol_star, cls_star = run(c_star)
    consider(sol_star, cls_star)
    return ShootResult(
        c_star=c_star,
        solution=best,
        history=history,
        orientation=orientation,
        bracket=(lo, hi),
    )


def handoff(origin_sol: RadialSolution, r_switch: float):
    """Convert origin-chart data at r_switch into infinity-chart initial data.

    Snaps to the nearest stored grid node (no interpolation error) and uses
    the exact chart relation phi = w / r^(p-1).  Returns (r0, phi0, logu0).
    """
    if origin_sol.chart != ORIGIN_W:
        raise InvalidParams("handoff expects an origin-chart solution")
    r = origin_sol.r
    if not (r[0] <= r_switch <= r[-1]):
        raise OutOfGrid(
            f"r_switch={r_switch} outside grid [{r[0]:g}, {r[-1]:g}]"
        )
    idx = int(np.argmin(np.abs(r - r_switch)))
    w = float(origin_sol.v[idx])
    if w <= 0.0:
        raise DomainError(f"w={w} at r={r[idx]:g} is not positive; u' has turned")
    r_node = float(r[idx])
    phi0 = w / r_node ** (origin_sol.params.p - 1.0)
    return r_node, phi0, float(origin_sol.logu[idx])
