"""Exception hierarchy shared by all sumlevels modules."""


class SumLevelsError(Exception):
    """Base class for errors raised by this package."""


class LevelTooLargeError(SumLevelsError):
    """Requested tree level exceeds the configured enumeration guard."""

    def __init__(self, n: int, guard: int):
        super().__init__(f"level n={n} exceeds guard {guard}; raise the guard explicitly to opt out")
        self.n = n
        self.guard = guard


class DomainError(SumLevelsError):
    """Argument outside the mathematical domain of the operation."""


class UntranslatableCodeError(SumLevelsError):
    """Binary code does not correspond to a single continued-fraction cylinder."""


class InsufficientDepthError(SumLevelsError):
    """Not enough validated continued-fraction digits to evaluate the statistic."""


class CheckpointError(SumLevelsError):
    """Checkpoint file is missing, corrupt, or incompatible with the request."""
