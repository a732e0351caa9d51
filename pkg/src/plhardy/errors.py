"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input -> 2, solver
non-convergence -> 3.
"""


class InvalidParams(ValueError):
    """A parameter violates its documented precondition."""


class DomainError(ValueError):
    """An evaluation was requested outside the mathematical domain."""


class OutOfGrid(ValueError):
    """A probe radius or window falls outside a tabulated solution grid."""


class BracketingError(ValueError):
    """A root or shooting bracket does not actually bracket."""


class NoConvergence(RuntimeError):
    """An iterative solver exhausted its budget without converging."""
