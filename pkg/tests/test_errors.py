import logging

import pytest

from finitary_beta.constants import EXIT_CODES
from finitary_beta.errors import (
    FinitaryBetaError,
    InconsistentPowerSums,
    NumericFailure,
    ResourceCapError,
    ValidationError,
    describe_error,
    exit_code_for,
    handle_error,
)
from finitary_beta.errors.error_handler import get_error_text


def test_hierarchy_keeps_builtin_families():
    assert issubclass(ValidationError, ValueError)
    assert issubclass(ResourceCapError, RuntimeError)
    assert issubclass(NumericFailure, ArithmeticError)
    assert issubclass(InconsistentPowerSums, NumericFailure)
    assert issubclass(ValidationError, FinitaryBetaError)


def test_error_text_falls_back_to_key():
    assert get_error_text("error_power_sums") == "Inconsistent power sums"
    assert get_error_text("error_unheard_of") == "error_unheard_of"


def test_describe_error():
    assert describe_error(ValidationError("bad swap", key="error_permutation")) == "Not a permutation: bad swap"
    assert describe_error(ValidationError()) == "Invalid input"
    assert describe_error(ZeroDivisionError("boom")) == "Numeric failure: boom"
    message = describe_error(ResourceCapError(500, 100, what="ball"))
    assert "cap is 100" in message


@pytest.mark.parametrize("error, code", [
    (ValidationError("x"), EXIT_CODES["VALIDATION"]),
    (ResourceCapError(10, 1), EXIT_CODES["RESOURCE_CAP"]),
    (InconsistentPowerSums("x"), EXIT_CODES["NUMERIC"]),
    (NumericFailure("x", key="error_root_finder"), EXIT_CODES["NUMERIC"]),
    (ValueError("x"), EXIT_CODES["VALIDATION"]),
])
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_handle_error_logs(caplog):
    caplog.set_level(logging.DEBUG)
    code, message = handle_error(InconsistentPowerSums("p_2 exceeds p_1"))
    assert code == 3
    assert message == "Inconsistent power sums: p_2 exceeds p_1"
    assert message in caplog.text
