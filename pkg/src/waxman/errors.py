"""Exception types shared across the package."""


class WaxmanError(Exception):
    pass


class ParameterError(WaxmanError, ValueError):
    """An argument is outside the model's domain."""


class DataError(WaxmanError, ValueError):
    """Input data is empty, malformed or inconsistent."""


class InsufficientDataError(DataError):
    pass


class InfeasibleParametersError(ParameterError):
    """The requested combination of (n, k_bar, s) needs q > 1."""


class ConvergenceError(WaxmanError, RuntimeError):
    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}
