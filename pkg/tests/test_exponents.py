import math

import numpy as np
import pytest

from plhardy import InvalidParams, ProblemParams, gamma_mu, mu_bar, solve_exponents
from plhardy.exponents import gamma_mu_prime


def bisect_oracle(fn, lo, hi, tol=1e-12):
    # plain interval halving, no polish; the independent route
    flo = fn(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fmid = fn(mid)
        if fmid == 0.0:
            return mid
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
    return 0.5 * (lo + hi)


def random_params(rng, p2_only=False):
    p = 2.0 if p2_only else rng.uniform(1.25, 3.5)
    N = p + rng.uniform(0.5, 6.0)
    mb = ((N - p) / p) ** p
    mu = rng.uniform(0.02, 0.95) * mb
    return ProblemParams(N=N, p=p, mu=mu)


def test_mu_bar_values():
    assert mu_bar(ProblemParams(N=3, p=2)) == pytest.approx(0.25, abs=0)
    assert mu_bar(ProblemParams(N=4, p=2)) == pytest.approx(1.0, abs=0)
    assert mu_bar(ProblemParams(N=5, p=3)) == pytest.approx((2.0 / 3.0) ** 3, rel=1e-15)


def test_mu_bar_rejects_bad_p():
    with pytest.raises(InvalidParams):
        ProblemParams(N=3, p=0.5)
    with pytest.raises(InvalidParams):
        ProblemParams(N=3, p=3.5)


def test_gamma_mu_at_zero_returns_mu():
    rng = np.random.default_rng(7)
    for _ in range(20):
        params = random_params(rng)
        assert gamma_mu(0.0, params) == pytest.approx(params.mu, abs=0)


def test_gamma_mu_at_critical_point():
    rng = np.random.default_rng(8)
    for _ in range(20):
        params = random_params(rng)
        xc = (params.N - params.p) / params.p
        expected = params.mu - mu_bar(params)
        assert gamma_mu(xc, params) == pytest.approx(expected, rel=1e-13, abs=1e-14)


def test_gamma_mu_closed_form_root():
    params = ProblemParams(N=3, p=2, mu=3.0 / 16.0)
    assert gamma_mu(0.25, params) == pytest.approx(0.0, abs=1e-16)


def test_gamma_mu_rejects_negative_argument():
    with pytest.raises(InvalidParams):
        gamma_mu(-0.1, ProblemParams(N=3, p=2, mu=0.1))


def test_solve_exponents_model_case():
    exps = solve_exponents(ProblemParams(N=3, p=2, mu=3.0 / 16.0))
    assert exps.gamma1 == pytest.approx(0.25, abs=1e-12)
    assert exps.gamma2 == pytest.approx(0.75, abs=1e-12)


def test_solve_exponents_mu_zero_exact():
    exps = solve_exponents(ProblemParams(N=4, p=3, mu=0.0))
    assert exps.gamma1 == 0.0
    assert exps.gamma2 == 0.5


def test_solve_exponents_against_bisection_oracle():
    # N=4, p=3 has mu_bar = 1/27, so mu must sit below that
    params = ProblemParams(N=4, p=3, mu=0.02)
    xc = (params.N - params.p) / params.p
    xhi = (params.N - params.p) / (params.p - 1.0)
    fn = lambda g: gamma_mu(g, params)
    g1_oracle = bisect_oracle(fn, 0.0, xc)
    g2_oracle = bisect_oracle(fn, xc, xhi)
    exps = solve_exponents(params)
    assert exps.gamma1 == pytest.approx(g1_oracle, abs=5e-12)
    assert exps.gamma2 == pytest.approx(g2_oracle, abs=5e-12)


def test_sign_bracketing_randomized():
    rng = np.random.default_rng(11)
    for _ in range(100):
        params = random_params(rng)
        xc = (params.N - params.p) / params.p
        xhi = (params.N - params.p) / (params.p - 1.0)
        assert gamma_mu(0.0, params) >= 0.0
        assert gamma_mu(xc, params) < 0.0
        assert gamma_mu(xhi, params) >= 0.0


def test_monotone_decreasing_then_increasing():
    rng = np.random.default_rng(12)
    for _ in range(30):
        params = random_params(rng)
        xc = (params.N - params.p) / params.p
        gs = np.linspace(1e-3 * xc, xc * 0.999, 40)
        vals = [gamma_mu(float(g), params) for g in gs]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        gs_up = np.linspace(xc * 1.001, 3.0 * xc, 40)
        vals_up = [gamma_mu(float(g), params) for g in gs_up]
        assert all(b > a for a, b in zip(vals_up, vals_up[1:]))


def test_p2_closed_form_randomized():
    rng = np.random.default_rng(13)
    for _ in range(200):
        params = random_params(rng, p2_only=True)
        mb = mu_bar(params)
        exps = solve_exponents(params)
        g1 = math.sqrt(mb) - math.sqrt(mb - params.mu)
        g2 = math.sqrt(mb) + math.sqrt(mb - params.mu)
        assert exps.gamma1 == pytest.approx(g1, abs=1e-10)
        assert exps.gamma2 == pytest.approx(g2, abs=1e-10)


def test_root_residuals_randomized():
    rng = np.random.default_rng(14)
    tol = 1e-12
    for _ in range(200):
        params = random_params(rng)
        exps = solve_exponents(params, tol=tol)
        assert abs(gamma_mu(exps.gamma1, params)) <= 10 * tol
        assert abs(gamma_mu(exps.gamma2, params)) <= 10 * tol
        assert 0.0 <= exps.gamma1 < (params.N - params.p) / params.p
        assert (params.N - params.p) / params.p < exps.gamma2 <= (params.N - params.p) / (
            params.p - 1.0
        ) * (1 + 1e-12)


def test_gamma_mu_prime_matches_finite_difference():
    rng = np.random.default_rng(15)
    for _ in range(20):
        params = random_params(rng)
        g = rng.uniform(0.1, 1.5) * (params.N - params.p) / params.p
        h = 1e-6 * max(g, 1.0)
        fd = (gamma_mu(g + h, params) - gamma_mu(g - h, params)) / (2 * h)
        assert gamma_mu_prime(g, params) == pytest.approx(fd, rel=1e-5)


def test_invalid_mu_rejected():
    with pytest.raises(InvalidParams):
        ProblemParams(N=3, p=2, mu=0.25)  # mu == mu_bar
    with pytest.raises(InvalidParams):
        ProblemParams(N=3, p=2, mu=-0.1)


def test_positive_mass_gate():
    params = ProblemParams(N=3, p=2, mu=0.1, m=-1.0)
    with pytest.raises(InvalidParams):
        params.require_positive_mass()
