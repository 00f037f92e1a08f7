"""Exception types shared across the package."""


class WgainError(Exception):
    """Base class for all package errors."""


class InputError(WgainError, ValueError):
    """An input matrix, mask, or argument violates its contract."""


class TrainingDivergedError(WgainError, RuntimeError):
    """A training loss became non-finite."""

    def __init__(self, message: str, iteration: int):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration
