"""End-to-end ground-state runs: shoot, hand off, stabilize the far field.

Amplitude bisection fixes the shooting constant to relative width tol_C,
but the infinity-chart fixed point is forward-unstable with rate
alpha0 = p (m/(p-1))^(1/p): an amplitude uncertainty eps peels the forward
trajectory off the true solution once e^(alpha0 dr) eps ~ 1, around
r ~ log(1/eps)/alpha0.  No forward tolerance reaches a far window like
[10, 20] cleanly.  The same growth rate works for us in reverse, so the
far field is produced by integrating the infinity chart backward from a
seed radius r_far, initialized with the asymptotic series prediction for
phi; the seed error (series remainder) contracts like e^(-alpha0 (r_far - r))
going down.  The backward branch is glued to the forward branch at a
matching radius where both are accurate, the phi mismatch there is
recorded, and tests assert it is small: that overlap agreement is the
evidence that the two branches represent one solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence
from .exponents import ProblemParams, solve_exponents
from .expansion import ExpansionSeries, build_series, eval_series
from .radial_ode import (
    INFINITY_PHI,
    Caps,
    Nonlinearity,
    RadialSolution,
    ShootResult,
    default_caps,
    handoff,
    integrate,
    shoot_ground_state,
)

__all__ = ["SolverOptions", "GroundStateRun", "solve_ground_state"]


@dataclass(frozen=True)
class SolverOptions:
    r0: float = 1e-6
    r_max: float = 25.0
    tol: float = 1e-10
    tol_C: float = 1e-10
    C_lo: float = 0.1
    C_hi: float = 50.0
    r_switch: float = 1.0
    tail_pad: float = 5.0
    r_match_cap: float = 8.0
    tail_tol: float = 1e-12
    expansion_order: int | None = None


@dataclass
class GroundStateRun:
    """All artifacts of one solved problem."""

    params: ProblemParams
    f: Nonlinearity
    options: SolverOptions
    c_star: float
    gamma1: float
    series: ExpansionSeries
    origin: RadialSolution
    infinity: RadialSolution  # composite forward+backward, covers far window
    infinity_forward: RadialSolution
    shoot: ShootResult = field(repr=False)
    r_match: float = 0.0
    match_mismatch: float = 0.0


def _merge_infinity(forward: RadialSolution, tail: RadialSolution, r_match: float):
    """Forward branch up to r_match, backward branch beyond, one grid."""
    fmask = forward.r <= r_match
    tmask = tail.r > r_match
    r = np.concatenate([forward.r[fmask], tail.r[tmask]])
    logu = np.concatenate([forward.logu[fmask], tail.logu[tmask]])
    v = np.concatenate([forward.v[fmask], tail.v[tmask]])
    return RadialSolution(
        chart=INFINITY_PHI,
        r=r,
        logu=logu,
        v=v,
        params=forward.params,
        f=forward.f,
        amplitude=forward.amplitude,
        gamma1=forward.gamma1,
        termination="composite",
    )


def solve_ground_state(
    params: ProblemParams, f: Nonlinearity, options: SolverOptions | None = None
) -> GroundStateRun:
    if options is None:
        options = SolverOptions()
    params.require_positive_mass()
    shoot = shoot_ground_state(
        params,
        f,
        options.C_lo,
        options.C_hi,
        r0=options.r0,
        r_max=options.r_max,
        tol_C=options.tol_C,
        tol=options.tol,
    )
    origin = shoot.solution
    gamma1 = origin.gamma1
    series = build_series(params, options.expansion_order)

    # forward infinity branch from the handoff point
    r_h, phi_h, logu_h = handoff(origin, options.r_switch)
    caps_inf = default_caps(params, INFINITY_PHI)
    forward = integrate(
        INFINITY_PHI,
        (r_h, phi_h, logu_h),
        options.r_max,
        params,
        f,
        tol=options.tol,
        caps=caps_inf,
    )
    forward.amplitude = origin.amplitude
    forward.gamma1 = gamma1

    # matching radius: safely inside the forward branch's clean stretch
    r_fwd_end = float(forward.r[-1])
    r_match = min(options.r_match_cap, 0.6 * r_fwd_end)
    if r_match <= r_h * 1.5:
        raise NoConvergence(
            f"forward infinity branch too short (ends at {r_fwd_end:g}) to match a tail"
        )

    # backward branch seeded by the series at r_far; log u seeded from the
    # forward branch's compensated constant (error o(1), and the only
    # feedback of u on phi at these radii is the vanishing f(u)/u^(p-1))
    r_far = options.r_max + options.tail_pad
    p = params.p
    a = (params.N - 1.0) / (p * (p - 1.0))
    beta = (params.m / (p - 1.0)) ** (1.0 / p)
    logu_match_fwd = float(forward.sample_logu([r_match])[0])
    logu_far = logu_match_fwd - a * math.log(r_far / r_match) - beta * (r_far - r_match)
    phi_far = eval_series(series, r_far)
    tail = integrate(
        INFINITY_PHI,
        (r_far, phi_far, logu_far),
        0.9 * r_match,
        params,
        f,
        tol=min(options.tol, options.tail_tol),
        caps=caps_inf,
    )
    # renormalize the tail's u to agree with the forward branch at r_match
    logu_match_tail = float(tail.sample_logu([r_match])[0])
    tail.logu = tail.logu + (logu_match_fwd - logu_match_tail)
    phi_match_fwd = float(forward.sample_v([r_match])[0])
    phi_match_tail = float(tail.sample_v([r_match])[0])
    mismatch = abs(phi_match_fwd - phi_match_tail) / (1.0 + abs(phi_match_tail))

    composite = _merge_infinity(forward, tail, r_match)
    return GroundStateRun(
        params=params,
        f=f,
        options=options,
        c_star=shoot.c_star,
        gamma1=gamma1,
        series=series,
        origin=origin,
        infinity=composite,
        infinity_forward=forward,
        shoot=shoot,
        r_match=r_match,
        match_mismatch=mismatch,
    )
