import time

import pytest

from plhardy import Nonlinearity, ProblemParams, SolverOptions, solve_ground_state


class TimedRun:
    """A pipeline run plus the wall time it took to produce."""

    def __init__(self, run, elapsed):
        self.run = run
        self.elapsed = elapsed


def _timed_solve(params, f, options=None):
    t0 = time.perf_counter()
    run = solve_ground_state(params, f, options)
    return TimedRun(run, time.perf_counter() - t0)


@pytest.fixture(scope="session")
def cubic_params():
    return ProblemParams(N=3, p=2, mu=0.0, m=1.0)


@pytest.fixture(scope="session")
def hardy_params():
    return ProblemParams(N=3, p=2, mu=3.0 / 16.0, m=1.0)


@pytest.fixture(scope="session")
def cubic_f(cubic_params):
    return Nonlinearity.powers([(1.0, 4.0)], cubic_params)


@pytest.fixture(scope="session")
def hardy_f(hardy_params):
    return Nonlinearity.powers([(1.0, 4.0)], hardy_params)


@pytest.fixture(scope="session")
def cubic_run(cubic_params, cubic_f):
    """Ground state of the cubic model without Hardy term."""
    return _timed_solve(cubic_params, cubic_f)


@pytest.fixture(scope="session")
def hardy_run(hardy_params, hardy_f):
    """Ground state with Hardy strength mu = 3/16 (gamma1 = 1/4)."""
    return _timed_solve(hardy_params, hardy_f)
