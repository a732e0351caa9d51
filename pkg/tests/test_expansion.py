import math

import numpy as np
import pytest
import sympy as sp

from plhardy import (
    DomainError,
    InvalidParams,
    ProblemParams,
    build_series,
    default_order,
    eval_series,
    f_taylor_deriv,
    log_derivative_prediction,
)


def random_mass_params(rng):
    p = rng.uniform(1.3, 3.5)
    N = p + rng.uniform(0.5, 6.0)
    mb = ((N - p) / p) ** p
    mu = rng.uniform(0.0, 0.9) * mb
    m = rng.uniform(0.2, 5.0)
    return ProblemParams(N=N, p=p, mu=mu, m=m)


def series_substitution_oracle(N, p, m, k):
    """Independent route to the coefficients: substitute an undetermined
    polynomial-in-1/r profile into the exact first-order equation for
    phi = (-u'/u)^(p-1) (with the nonlinear term in closed form, not its
    Taylor polynomial), expand symbolically in 1/r and solve order by
    order.  Exact rational arithmetic throughout."""
    x = sp.symbols("x", positive=True)  # x = 1/r
    N_, p_, m_ = sp.Rational(N), sp.Rational(p), sp.Rational(m)
    base = m_ / (p_ - 1)
    c = [base ** sp.Rational(int(p - 1), int(p))]  # assumes integer-friendly p
    cs = sp.symbols(f"c1:{k+1}")
    phi = c[0] + sum(cs[i - 1] * x**i for i in range(1, k + 1))
    # d(phi)/dr = -x^2 d(phi)/dx; mu = 0 here (coefficients are mu-free)
    expr = (
        -(x**2) * sp.diff(phi, x)
        - (p_ - 1) * phi ** (p_ / (p_ - 1))
        + (N_ - 1) * x * phi
        + m_
    )
    series = sp.series(expr, x, 0, k + 1).removeO().expand()
    sol = {}
    for order in range(1, k + 1):
        eq = series.coeff(x, order).subs(sol)
        val = sp.solve(sp.Eq(eq, 0), cs[order - 1])
        sol[cs[order - 1]] = val[0]
    return [float(c[0])] + [float(sol[cs[i]]) for i in range(k)]


def test_f_taylor_first_two_derivatives_randomized():
    rng = np.random.default_rng(21)
    for _ in range(50):
        params = random_mass_params(rng)
        p, m = params.p, params.m
        c0 = (m / (p - 1.0)) ** ((p - 1.0) / p)
        alpha0 = p * (m / (p - 1.0)) ** (1.0 / p)
        assert f_taylor_deriv(0, c0, p) == pytest.approx(m, rel=1e-12)
        assert f_taylor_deriv(1, c0, p) == pytest.approx(alpha0, rel=1e-12)


def test_f_taylor_p2_polynomial_truncates():
    assert f_taylor_deriv(2, 1.0, 2.0) == pytest.approx(2.0, abs=0)
    assert f_taylor_deriv(3, 1.0, 2.0) == pytest.approx(0.0, abs=0)
    assert f_taylor_deriv(5, 1.0, 2.0) == pytest.approx(0.0, abs=0)


def test_closed_forms_randomized():
    rng = np.random.default_rng(22)
    for _ in range(100):
        params = random_mass_params(rng)
        N, p, m = params.N, params.p, params.m
        s = build_series(params, 1)
        assert s.c[0] == pytest.approx((m / (p - 1)) ** ((p - 1) / p), rel=1e-12)
        assert s.c[1] == pytest.approx((N - 1) / p * (m / (p - 1)) ** ((p - 2) / p), rel=1e-12)
        assert s.c[0] == pytest.approx(s.phi_inf, rel=1e-15)
        assert s.alpha0 == pytest.approx(p * s.phi_inf ** (1.0 / (p - 1.0)), rel=1e-12)
        assert s.hardy_coeff == pytest.approx(-params.mu / s.alpha0, rel=1e-12, abs=1e-15)


def test_c1_consistent_with_limit_ratio():
    # the first coefficient must also equal (N-1) * phi_inf / alpha0
    for N in (3, 4, 7):
        params = ProblemParams(N=N, p=2, mu=0.0, m=1.0)
        s = build_series(params, 1)
        assert s.c[1] == pytest.approx((N - 1) * s.phi_inf / s.alpha0, rel=1e-14)
        assert s.c[1] == pytest.approx((N - 1) / 2.0, rel=1e-14)


def test_recursion_against_substitution_oracle():
    params = ProblemParams(N=5, p=3, mu=0.0, m=2.0)
    s = build_series(params, 3)
    oracle = series_substitution_oracle(5, 3, 2, 3)
    assert s.c[0] == pytest.approx(oracle[0], rel=1e-12)
    assert s.c[1] == pytest.approx(oracle[1], rel=1e-12)
    assert s.c[2] == pytest.approx(oracle[2], rel=1e-9)
    assert s.c[3] == pytest.approx(oracle[3], rel=1e-9)
    # frozen exact values from the oracle run: 1, 4/3, 8/9, 8/81
    assert s.c == pytest.approx((1.0, 4.0 / 3.0, 8.0 / 9.0, 8.0 / 81.0), rel=1e-12)


def test_n3_p2_m1_coefficients_vanish_beyond_c1():
    # closed-form far field: the linearized profile has exactly two terms
    params = ProblemParams(N=3, p=2, mu=0.0, m=1.0)
    s = build_series(params, 5)
    assert s.c[0] == 1.0 and s.c[1] == 1.0
    assert s.c[2:] == pytest.approx((0.0,) * 4, abs=1e-14)


def test_mass_scaling():
    # c0 scales like m^((p-1)/p), the Hardy coefficient like m^(-1/p)
    for p in (1.5, 2.0, 3.0):
        pa = ProblemParams(N=5, p=p, mu=0.1, m=1.0)
        pb = ProblemParams(N=5, p=p, mu=0.1, m=4.0)
        sa = build_series(pa, 1)
        sb = build_series(pb, 1)
        assert sb.c[0] / sa.c[0] == pytest.approx(4.0 ** ((p - 1) / p), rel=1e-12)
        assert sb.hardy_coeff / sa.hardy_coeff == pytest.approx(4.0 ** (-1.0 / p), rel=1e-12)


def test_default_order_bracket_rule():
    assert default_order(2.0) == 2
    assert default_order(2.7) == 2
    assert default_order(1.2) == 1
    assert default_order(3.0) == 3
    s = build_series(ProblemParams(N=5, p=2.7, mu=0.0, m=1.0))
    assert s.k == 2 and not s.extrapolated
    s_ex = build_series(ProblemParams(N=5, p=2.7, mu=0.0, m=1.0), 6)
    assert s_ex.extrapolated


def test_eval_series_limits():
    params = ProblemParams(N=3, p=2, mu=0.0, m=1.0)
    s = build_series(params, 2)
    assert eval_series(s, 1e12) == pytest.approx(s.c[0], rel=1e-11)
    assert eval_series(s, 10.0) == pytest.approx(1.1, rel=1e-14)


def test_eval_series_hardy_term_sign():
    params = ProblemParams(N=3, p=2, mu=3.0 / 16.0, m=1.0)
    s = build_series(params, 2)
    base = ProblemParams(N=3, p=2, mu=0.0, m=1.0)
    s0 = build_series(base, 2)
    r = 7.0
    assert eval_series(s, r) == pytest.approx(
        eval_series(s0, r) + s.hardy_coeff / r**2, rel=1e-13
    )
    assert s.hardy_coeff < 0.0


def test_log_derivative_prediction_limit():
    rng = np.random.default_rng(23)
    for _ in range(20):
        params = random_mass_params(rng)
        s = build_series(params, 1)
        pred = log_derivative_prediction(s, 1e10)
        assert pred == pytest.approx(-((params.m / (params.p - 1.0)) ** (1.0 / params.p)), rel=1e-9)


def test_log_derivative_first_order_coefficient():
    # slope of the 1/r correction to u'/u must be -(N-1)/(p(p-1))
    for N, p in ((3, 2.0), (5, 3.0), (4, 1.5)):
        params = ProblemParams(N=N, p=p, mu=0.0, m=1.0)
        s = build_series(params, 1)
        r = 1e5
        lead = -((params.m / (p - 1.0)) ** (1.0 / p))
        corr = (log_derivative_prediction(s, r) - lead) * r
        assert corr == pytest.approx(-(N - 1) / (p * (p - 1.0)), rel=1e-4)


def test_log_derivative_domain_error():
    params = ProblemParams(N=3, p=2, mu=3.0 / 16.0, m=1.0)
    s = build_series(params, 2)
    with pytest.raises(DomainError):
        log_derivative_prediction(s, 1e-8)


def test_nonpositive_mass_rejected():
    params = ProblemParams(N=3, p=2, mu=0.0, m=-1.0)
    with pytest.raises(InvalidParams):
        build_series(params, 2)
    params0 = ProblemParams(N=3, p=2, mu=0.0, m=0.0)
    with pytest.raises(InvalidParams):
        build_series(params0, 2)
