"""Exception hierarchy.

Input problems subclass ``ValueError``, numerical pipeline failures subclass
``ArithmeticError`` and configuration mistakes are usage errors. The CLI maps
the three branches to exit codes 2, 3 and 64.
"""

from typing import Optional


class EntanglementError(Exception):
    """Base class for every error raised by the toolkit."""

    def __init__(
        self,
        message: str,
        residual: Optional[float] = None,
        limit: Optional[float] = None,
    ):
        self.residual = residual
        self.limit = limit
        if residual is not None:
            message = f"{message} (residual {residual:.3e}"
            message += f", limit {limit:.3e})" if limit is not None else ")"
        super().__init__(message)


# Input validation (exit code 2)
class InputError(EntanglementError, ValueError):
    """The supplied matrix, parameters or document are invalid."""


class NotHermitian(InputError):
    pass


class TraceNotOne(InputError):
    pass


class NotPSD(InputError):
    pass


class OutOfRange(InputError):
    pass


class InvalidParameters(InputError):
    pass


class MatrixFormatError(InputError):
    """Density-matrix document does not parse; names the offending row/column."""

    def __init__(self, message: str, row: Optional[int] = None, col: Optional[int] = None):
        self.row = row
        self.col = col
        if row is not None and col is not None:
            message = f"{message} at row {row}, column {col}"
        elif row is not None:
            message = f"{message} at row {row}"
        super().__init__(message)


# Numerical pipeline (exit code 3)
class PipelineError(EntanglementError, ArithmeticError):
    """A numerical stage produced a result outside its contract."""


class NoConvergence(PipelineError):
    pass


class SpectrumNotReal(PipelineError):
    pass


class ComplexResidual(PipelineError):
    pass


class DegeneratePivot(PipelineError):
    pass


class NegativeRadicand(PipelineError):
    pass


class NegativeEigenvalue(PipelineError):
    pass


class IntermediateSign(PipelineError):
    """A bracket of the closed-form concurrence has the wrong sign."""


class CanonicalizationResidual(PipelineError):
    pass


class CriteriaDisagreement(PipelineError):
    pass


class RejectionExhausted(PipelineError):
    pass


class BoundaryExcess(PipelineError):
    pass


# Configuration / usage (exit code 64)
class ConfigError(EntanglementError):
    """Campaign or flag configuration is invalid."""


class UnknownCheck(ConfigError):
    pass


class UnknownEnsemble(ConfigError):
    pass


class IncompatibleCheck(ConfigError):
    pass


EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PIPELINE = 3
EXIT_USAGE = 64


def exit_code_for(err: BaseException) -> int:
    """
    Map an exception to the CLI exit-code contract.

    Args:
        err: Exception caught at the command boundary

    Returns:
        2 for input errors, 64 for configuration errors, 3 otherwise
    """
    if isinstance(err, InputError):
        return EXIT_INPUT
    if isinstance(err, ConfigError):
        return EXIT_USAGE
    return EXIT_PIPELINE
