"""Exception hierarchy shared by every module."""


class ValuationError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ValuationError):
    """Malformed or inconsistent input; the CLI maps these to exit code 2."""


class DuplicateElement(InputError):
    pass


class UnknownElement(InputError):
    pass


class CycleDetected(InputError):
    pass


class TooLarge(InputError):
    pass


class NotUpperSet(InputError):
    pass


class NotMonotone(InputError):
    pass


class PosetMismatch(InputError):
    pass


class MassExceedsOne(InputError):
    pass


class NegativeWeight(InputError):
    pass


class ContinuityViolation(InputError):
    """A Kleisli map that is not monotone in the stochastic order."""


class ChainNotMonotone(InputError):
    pass


class FormatError(InputError):
    """A text-format file could not be parsed."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class NameNotFound(InputError):
    pass


class ProgramSyntaxError(InputError):
    def __init__(self, message, line, column):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class ResolutionError(InputError):
    pass


class ProgramRecursionError(InputError):
    pass
