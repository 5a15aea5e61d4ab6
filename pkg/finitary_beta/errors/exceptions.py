class FinitaryBetaError(Exception):
    """Base error. `key` indexes constants.error_messages."""

    key = "error_validation"

    def __init__(self, message="", key=None):
        super().__init__(message)
        if key is not None:
            self.key = key


class ValidationError(FinitaryBetaError, ValueError):
    key = "error_validation"


class ResourceCapError(FinitaryBetaError, RuntimeError):
    key = "error_cardinality_cap"

    def __init__(self, predicted, cap, what="enumeration"):
        super().__init__(f"{what} would produce {predicted} items, cap is {cap}")
        self.predicted = predicted
        self.cap = cap


class NumericFailure(FinitaryBetaError, ArithmeticError):
    key = "error_numeric"


class InconsistentPowerSums(NumericFailure):
    key = "error_power_sums"
