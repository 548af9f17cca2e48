class TwinsepError(Exception):
    """Base class for errors raised by this package."""


class SieveConfigError(TwinsepError, ValueError):
    pass


class ScanOrderError(TwinsepError, RuntimeError):
    """The prime stream fed to the scanner was not strictly increasing."""


class InsufficientDataError(TwinsepError, ValueError):
    pass


class FitConvergenceError(TwinsepError, RuntimeError):
    def __init__(self, message: str, last_m: float, iterations: int):
        super().__init__(message)
        self.last_m = last_m
        self.iterations = iterations


class ModelDomainError(TwinsepError, ValueError):
    pass
