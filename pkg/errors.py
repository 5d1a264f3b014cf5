"""Exceptions raised by the solver library.

Everything derives from BonsaiError so the CLI can turn library failures into
exit status 2 while letting programming errors propagate.
"""


class BonsaiError(Exception):
    """Base class for all solver errors."""


class UsageError(BonsaiError, ValueError):
    """A caller broke an operation's precondition."""


class NoCubeError(UsageError):
    """No pure assignment exists because the function is constant false."""


class HoaError(BonsaiError):
    """The automaton file could not be ingested."""


class HoaSyntaxError(HoaError):
    def __init__(self, message: str, line: int = None, column: int = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)


class UnsupportedAutomaton(HoaError):
    """Well-formed HOA that falls outside the supported subset."""


class RunAborted(BonsaiError):
    """A solver run stopped before reaching a fixed point.

    This is never an answer: callers must treat it as "unknown".
    """

    def __init__(self, reason: str, steps: int = 0):
        self.reason = reason
        self.steps = steps
        super().__init__(f"run aborted after {steps} cpre applications: {reason}")


class OracleTooBig(BonsaiError):
    """The brute-force oracle refused an instance above its size guard."""
