from .exceptions import (
    FinitaryBetaError,
    ValidationError,
    ResourceCapError,
    NumericFailure,
    InconsistentPowerSums,
)
from .error_handler import describe_error, exit_code_for, handle_error
