"""Exception hierarchy shared by all varineq modules."""


class VarIneqError(Exception):
    """Base class for every error raised by varineq."""


class ConfigurationError(VarIneqError, ValueError):
    """Invalid parameters, step sizes, quadrature settings or config files."""


class DomainError(VarIneqError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class AdmissibilityError(VarIneqError, ValueError):
    """A variation does not meet the endpoint conditions phi^(k) = 0, k = 0, 1, 2."""


class EvaluationError(VarIneqError, ArithmeticError):
    """A callback produced a non-finite value."""


class CapabilityError(VarIneqError):
    """A provider cannot supply a partial derivative an operation needs."""


class ModelNotFoundError(VarIneqError, LookupError):
    """Unknown catalog name."""
