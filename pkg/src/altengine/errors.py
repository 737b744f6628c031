"""Exception types shared across the package."""


class EngineError(Exception):
    """Base class for all package-specific errors."""


class PreconditionError(EngineError, ValueError):
    """An operation was called on inputs that violate its stated preconditions."""


class DegenerateEngineError(EngineError, ValueError):
    """The two baths do not define a usable engine (equal temperatures or a
    vanishing denominator in a fixed-point formula)."""


class StructuralImpossibilityError(EngineError, ValueError):
    """The request is impossible for structural reasons (e.g. asking for a dense
    stroke product when the overlap pattern is not primitive)."""


class RetryExhaustedError(EngineError, RuntimeError):
    """A randomized procedure failed to produce an acceptable result within its
    retry budget."""
