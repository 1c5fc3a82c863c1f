"""Exception hierarchy shared by every module of the package."""


class CaseClusterError(Exception):
    """Base class for all errors raised by caseclust."""


class PreconditionError(CaseClusterError, ValueError):
    """An operation was called with arguments violating its contract."""


class SizeLimitError(CaseClusterError):
    """Input is larger than an algorithm is allowed to handle."""


class ValidationError(CaseClusterError, ValueError):
    """A partition or plan does not describe the case set it claims to."""


class PlanOverflowError(CaseClusterError, OverflowError):
    """A jump table would need more entries than can be materialized."""


class ParseError(CaseClusterError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyInputError(ParseError):
    pass


class SpecError(CaseClusterError, ValueError):
    """Generator or model parameters that cannot be satisfied."""
