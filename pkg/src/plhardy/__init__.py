"""Radial asymptotics toolkit for the p-Laplace equation with Hardy potential.

Computes the critical decay exponents, the asymptotic expansion of
(-u'/u)^(p-1) at infinity, numerically shot radial ground states, the
explicit comparison barriers, and pass/fail diagnostics that test the
decay claims on the computed objects.
"""

from .errors import (
    BracketingError,
    DomainError,
    InvalidParams,
    NoConvergence,
    OutOfGrid,
)
from .exponents import Exponents, ProblemParams, gamma_mu, mu_bar, solve_exponents
from .expansion import (
    ExpansionSeries,
    build_series,
    default_order,
    eval_series,
    f_taylor_deriv,
    log_derivative_prediction,
)
from .radial_ode import (
    BLOWUP,
    INFINITY_PHI,
    ORIGIN_W,
    TURNUP,
    UNDECIDED,
    Caps,
    Nonlinearity,
    RadialSolution,
    ShootResult,
    default_caps,
    handoff,
    integrate,
    rhs_infinity,
    rhs_origin,
    shoot_ground_state,
)
from .barriers import (
    A_func,
    InfinityBarrier,
    OriginBarrier,
    Q_func,
    Q_leading_coeff,
    choose_origin_params,
    exp_profile,
    h_func,
    h_prime_zero,
    k_func,
    origin_source,
    residual_radial,
)
from .verify import (
    PHI1,
    W_MINUS_LIMIT,
    BoundsReport,
    LimitReport,
    RateReport,
    bounds_check,
    comparison_check,
    expansion_check,
    hardy_ratio,
    infinity_limit,
    origin_limit,
    rate_fit,
)
from .pipeline import GroundStateRun, SolverOptions, solve_ground_state
from .serialize import dumps_json, solution_from_csv, solution_to_csv

__version__ = "0.1.0"
