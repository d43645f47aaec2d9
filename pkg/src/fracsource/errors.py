"""Exception types shared across the package."""


class FracsourceError(Exception):
    """Base class for all package-specific errors."""


class AssumptionError(FracsourceError, ValueError):
    """A scenario violates one of the standing data assumptions
    (positivity of the diffusivity factor, nonzero measurement of the
    source shape, nonzero observation track, ...)."""


class InadmissibleError(AssumptionError):
    """The measurement functional failed the admissibility tail test at
    the requested decay exponent."""


class QuadratureError(FracsourceError, RuntimeError):
    """A quadrature could not certify its target tolerance."""


class AccuracyError(FracsourceError, ArithmeticError):
    """A special-function evaluation could not certify its accuracy
    contract for the given arguments."""


class ConfigError(FracsourceError, ValueError):
    """A run configuration file is malformed or contains unknown keys."""
