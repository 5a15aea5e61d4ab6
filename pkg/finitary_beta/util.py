import json
import os
import sys
import time

from .errors import ValidationError


def get_nested_field(message, *fields):
    current_level = message
    for field in fields:
        if isinstance(current_level, dict) and field in current_level:
            current_level = current_level[field]
        else:
            return None
    return current_level


def print_status(status_type, status_message):
    # stderr, so stdout stays byte-identical between runs
    current_time = time.strftime("%H:%M:%S")
    print(f"🕒 {status_type:<25}: {status_message:<15} ({current_time})", file=sys.stderr)


def load_json_source(source):
    """
    Load a JSON document from a file path or an inline JSON string.

    Args:
        source (str): Path to a file, or text starting with "{" or "[".

    Returns:
        The decoded document.
    """
    text = source.strip()
    try:
        if text.startswith("{") or text.startswith("["):
            return json.loads(text)
        if not os.path.exists(source):
            raise ValidationError(f"no such file: {source}")
        with open(source, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except json.JSONDecodeError as e:
        raise ValidationError(f"invalid JSON in {source!r}: {e}") from e


def parse_number_list(text, cast=float):
    """Parse "1,0.625" or "1 0.625" into a list of numbers."""
    parts = [part for part in text.replace(",", " ").split() if part]
    if not parts:
        raise ValidationError("empty number list")
    try:
        return [cast(part) for part in parts]
    except ValueError as e:
        raise ValidationError(f"not a number list: {text!r}") from e


def dump_json(document):
    return json.dumps(document, sort_keys=True, indent=2)
