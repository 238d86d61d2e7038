"""Exception types shared across the package."""


class MatIneqError(Exception):
    """Base class for all package-specific errors."""


class NonConvergence(MatIneqError):
    """Eigensolver failed to reach its off-diagonal tolerance."""


class DomainViolation(MatIneqError):
    """A spectrum or scalar argument falls outside a function's domain."""

    def __init__(self, message: str, offending=()):
        super().__init__(message)
        self.offending = tuple(offending)


class DimensionMismatch(MatIneqError):
    """Operands have incompatible dimensions."""


class NotMajorized(MatIneqError):
    """A constructive routine was handed vectors/matrices without the
    required majorization relation."""


class NoPerfectMatching(MatIneqError):
    """Birkhoff step found no perfect matching on the support graph;
    usually numerical dust below the support threshold."""


class AntinormOnIndefinite(MatIneqError):
    """Antinorms are only defined on the positive semidefinite cone."""


class PreconditionViolation(MatIneqError):
    """Explicit operation precondition failed."""


class SpecMismatch(MatIneqError):
    """Norm/antinorm spec does not match the convex/concave branch."""
