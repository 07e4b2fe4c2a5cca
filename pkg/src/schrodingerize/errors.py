"""Exception types shared across the package."""


class SchroError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SchroError, ValueError):
    """Array shapes are inconsistent with the declared system size."""


class DecompositionError(SchroError, ValueError):
    """A matrix expected to be Hermitian is not, beyond tolerance."""


class DegenerateSourceError(SchroError, ValueError):
    """An inhomogeneous lift was requested but the source samples to zero."""


class DomainError(SchroError, ValueError):
    """Evaluation point lies outside the representable domain."""


class AccuracyError(SchroError, ValueError):
    """Requested accuracy is outside the valid range (0, 1)."""


class ConfigError(SchroError, ValueError):
    """Run configuration is inconsistent or incomplete."""


class WindowError(SchroError, ValueError):
    """The recovery window contains no grid points."""


class OracleRefusedError(SchroError, ValueError):
    """The dense reference solver refuses inputs of this size."""


class NumericalError(SchroError, RuntimeError):
    """A numerical run produced non-finite values or a solver failed."""
