"""Exception hierarchy.  Each class carries the exit code the CLI uses for it."""


class DihomError(Exception):
    exit_code = 1


class ParseError(DihomError, ValueError):
    exit_code = 3

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class LoopError(DihomError, ValueError):
    """The generator digraph of a presentation has a directed cycle."""

    exit_code = 4


class InvalidOccurrenceError(DihomError, ValueError):
    exit_code = 5


class NotTError(DihomError, ValueError):
    """A poset map fails one of the clauses of the class T."""

    exit_code = 6


class NotLooplessError(DihomError, ValueError):
    exit_code = 7


class SizeLimitError(DihomError, RuntimeError):
    """A backtracking search visited more nodes than its configured bound."""

    exit_code = 8


class CycleError(DihomError, ValueError):
    """An order relation relates two distinct elements both ways."""

    exit_code = 9
