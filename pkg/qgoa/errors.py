from typing import Optional


class InstanceParseError(ValueError):
    """An instance file could not be parsed."""

    field: str
    line: Optional[int]

    def __init__(self, message: str, field: str, line: Optional[int] = None):
        location = f"line {line}, " if line is not None else ""
        super().__init__(f"{location}field '{field}': {message}")
        self.field = field
        self.line = line


class NonFiniteError(ArithmeticError):
    """The loss or gradient became NaN or infinite during optimization."""

    iteration: int

    def __init__(self, message: str, iteration: int):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


class OracleBoundError(ValueError):
    """The instance is too large for exhaustive search."""


class ConsistencyError(RuntimeError):
    """An internal numerical invariant was violated."""
