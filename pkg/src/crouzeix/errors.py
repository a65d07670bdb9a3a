"""Exception hierarchy for the crouzeix package.

Contract violations (bad inputs) are distinguished from numerical
breakdowns (instability, non-convergence) so the CLI can map them to
different exit codes.
"""


class CrouzeixError(Exception):
    """Base class for all package errors."""


class ContractViolation(CrouzeixError, ValueError):
    """An input violates a documented precondition."""


class ConvergenceError(CrouzeixError, RuntimeError):
    """An iterative solver exhausted its budget without converging."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PoleError(CrouzeixError, RuntimeError):
    """A Moebius/Blaschke factor is evaluated at (or too close to) a pole."""


class DomainError(CrouzeixError, ValueError):
    """A point lies outside the domain where an evaluation is defined."""


class SpectralDomainError(CrouzeixError, ValueError):
    """An eigenvalue sits on or outside the boundary of the mapped domain."""


class CapacityDegeneracyError(CrouzeixError, RuntimeError):
    """The single-layer collocation system is singular even after rescaling."""


class DerivativeRequiredError(CrouzeixError, ValueError):
    """A confluent eigenvalue cluster needs derivatives the caller did not supply."""


class NonSmoothBoundaryError(CrouzeixError, ValueError):
    """A boundary sample is flagged non-smooth and the operation refuses it."""


class InstabilityError(CrouzeixError, RuntimeError):
    """A computation hit a known numerically unstable regime (e.g. large powers)."""
