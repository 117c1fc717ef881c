"""Exception types shared across the package."""


class TrivineError(Exception):
    """Base class for all package errors."""


class InvalidParams(TrivineError):
    """Copula parameters outside the family's parameter space."""


class DomainError(TrivineError):
    """Function argument outside its admissible domain."""


class NonConvergence(TrivineError):
    """An iterative solver exhausted its iteration budget."""


class Unsupported(TrivineError):
    """Operation not defined for the requested family."""


class OutOfRange(TrivineError):
    """Requested dependence level not attainable by the family."""


class AllFitsFailed(TrivineError):
    """No candidate family produced a converged fit."""


class UnknownScenario(TrivineError):
    """Scenario id not present in the registry."""


class BinTooSmall(TrivineError):
    """Too few observations per bin for the binned estimator."""


class DegenerateData(TrivineError):
    """Input data carries no usable variation."""


class IngestError(TrivineError):
    """Malformed input data file."""


class QuadratureWarning(UserWarning):
    """Adaptive quadrature hit its refinement cap; result carries an error estimate."""
