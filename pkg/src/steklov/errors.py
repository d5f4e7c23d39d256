"""Exception types shared across the package."""


class SteklovError(Exception):
    """Base class for all package errors."""


class GraphValidationError(SteklovError, ValueError):
    """A graph violates a structural constraint."""


class ParseError(SteklovError, ValueError):
    """Malformed serialized input."""


class EigensolverError(SteklovError, RuntimeError):
    """The Jacobi sweep failed to converge or the residual check failed."""


class ResonantLambda(SteklovError, RuntimeError):
    """The transfer recursion hit a vanishing coefficient at this lambda."""

    def __init__(self, lam, vertex, coefficient):
        super().__init__(
            f"resonant lambda={lam!r}: transfer coefficient {coefficient!r} "
            f"vanishes at vertex {vertex}"
        )
        self.lam = lam
        self.vertex = vertex
        self.coefficient = coefficient


class NormalizationFailure(SteklovError, RuntimeError):
    """The flow vanishes at the requested normalization vertex."""


class NearSingular(SteklovError, RuntimeError):
    """The dense flow system is numerically singular (resonance)."""

    def __init__(self, lam, smallest_singular_value):
        super().__init__(
            f"near-singular flow system at lambda={lam!r} "
            f"(smallest singular value {smallest_singular_value:.3e})"
        )
        self.lam = lam
        self.smallest_singular_value = smallest_singular_value


class InternalFault(SteklovError, RuntimeError):
    """A mathematically guaranteed contract failed; carries diagnostics."""
