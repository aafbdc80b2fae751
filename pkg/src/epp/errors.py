"""Exception hierarchy shared by every module."""


class EppError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EppError):
    """Bad or unusable input data (CLI exit code 2)."""


class ComputationError(EppError):
    """The data is well-formed but the method cannot proceed (CLI exit code 3)."""


class InvalidPair(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateKey(ParseError):
    pass


class ValidationFailed(InputError):
    """Raised when a validation report contains Error-level issues."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(i.message for i in report.errors))


class ShapeError(ComputationError):
    pass


class DomainError(ComputationError):
    pass


class TooFewPlayers(ComputationError):
    pass


class DisconnectedGraph(ComputationError):
    def __init__(self, components):
        self.components = components
        desc = " | ".join(
            "{" + ", ".join(str(p) for p in comp) + "}" for comp in components
        )
        super().__init__(f"comparison graph has {len(components)} components: {desc}")


class UnknownPlayer(ComputationError):
    pass


class NotConverged(ComputationError):
    pass


class IncompleteMatrix(ComputationError):
    pass
