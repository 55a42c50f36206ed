import os
from typing import Optional

LOG_LEVEL = "COREFTOOLS_LOG_LEVEL"
"""
Environment variable holding the default log level (``INFO`` when unset).
"""

JOBS = "COREFTOOLS_JOBS"
"""
Environment variable holding the number of joblib workers (``1`` when unset).
"""

PRONOUNS = "COREFTOOLS_PRONOUNS"
"""
Environment variable holding the path of a pronoun lemma list replacing the shipped one.
"""


def get_env(key: str, default: Optional[str] = None):
    """Get the value of an environment variable.

    :param key: The name of the environment variable.
    :param default: The default value to return if the variable is not found.
    :return: The value of the environment variable or the default value.
    """
    return os.environ.get(key, default)


def get_env_int(key: str, default: int) -> int:
    """Get the value of an environment variable as an integer.

    :param key: The name of the environment variable.
    :param default: The value used if the variable is unset or empty.
    :return: The parsed integer.
    :raise ValueError: If the variable is set but is not an integer.
    """
    value = get_env(key)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"environment variable {key} must be an integer, got '{value}'")


def set_env(key: str, value: str):
    """Set value of an environment variable.

    :param key: The name of the environment variable.
    :param value: The value of the environment variable.
    """
    os.environ[key] = value
