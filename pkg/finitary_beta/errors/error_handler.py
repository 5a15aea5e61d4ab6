import logging

from ..constants import EXIT_CODES, error_messages
from .exceptions import FinitaryBetaError, NumericFailure, ResourceCapError


def get_error_text(key):
    """
    Retrieve the human readable text for an error key.

    Args:
        key (str): Error key such as "error_power_sums".

    Returns:
        str: The message, or the key itself when it is unknown.
    """
    if key in error_messages:
        return error_messages[key]
    return key


def describe_error(error):
    """
    Format an exception as a single line for the error stream.

    Args:
        error (Exception): Raised by library code.

    Returns:
        str: "<category>: <detail>".
    """
    if isinstance(error, FinitaryBetaError):
        category = get_error_text(error.key)
    elif isinstance(error, ArithmeticError):
        category = get_error_text("error_numeric")
    else:
        category = get_error_text("error_validation")

    detail = str(error)
    if not detail or detail == category:
        return category
    return f"{category}: {detail}"


def exit_code_for(error):
    if isinstance(error, ResourceCapError):
        return EXIT_CODES["RESOURCE_CAP"]
    if isinstance(error, (NumericFailure, ArithmeticError)):
        return EXIT_CODES["NUMERIC"]
    return EXIT_CODES["VALIDATION"]


def handle_error(error):
    """Returns (exit code, message); the traceback goes to the debug log."""
    message = describe_error(error)
    logging.debug(message, exc_info=error)
    return exit_code_for(error), message
