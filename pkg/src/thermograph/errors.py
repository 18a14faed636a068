class ThermographError(Exception):
    exit_code = 1


class ConfigError(ThermographError, ValueError):
    exit_code = 2


class NumericFailure(ThermographError, ArithmeticError):
    exit_code = 3


class BudgetExceeded(ThermographError):
    exit_code = 4


class NoCompletion(NumericFailure):
    """The fixed coordinates admit no unit-entropy completion."""
