"""Exception types raised across the package."""


class QcorrError(Exception):
    """Base class for all errors raised by qcorr."""


class NotSquare(QcorrError, ValueError):
    pass


class NotHermitian(QcorrError, ValueError):
    pass


class NotUnitary(QcorrError, ValueError):
    pass


class DimensionMismatch(QcorrError, ValueError):
    pass


class UnknownLabel(QcorrError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DuplicateLabel(QcorrError, ValueError):
    pass


class ZeroVector(QcorrError, ValueError):
    pass


class NotNormalized(QcorrError, ValueError):
    pass


class InvalidDensity(QcorrError, ValueError):
    pass


class IncompleteProjectorSet(QcorrError, ValueError):
    pass


class OverlappingBlocks(QcorrError, ValueError):
    pass


class CoverageError(QcorrError, ValueError):
    pass


class MixedState(QcorrError, ValueError):
    pass


class PreconditionViolated(QcorrError, ValueError):
    pass


class DegenerateBranch(QcorrError, ArithmeticError):
    pass


class CutoffExceeded(QcorrError, ArithmeticError):
    pass


class ScenarioParseError(QcorrError, ValueError):
    """Malformed scenario text; carries the 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class ScenarioValidationError(QcorrError, ValueError):
    """Scenario parsed but a named field is invalid."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class PropertyViolation(QcorrError):
    """A checked inequality or identity failed numerically."""

    def __init__(self, name, inputs=None, detail=""):
        self.name = name
        self.inputs = dict(inputs or {})
        msg = name
        if self.inputs:
            msg += " for " + ", ".join(f"{k}={v}" for k, v in self.inputs.items())
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
