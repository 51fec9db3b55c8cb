"""Numerical verification of Hofer-energy bounds for curves in a cylindrical end."""

import json

from ._core import ConfigError, HoferError, config_keys, decay_rate, extremal_energies
from ._core import run as _run

__all__ = ["ConfigError", "HoferError", "config_keys", "decay_rate", "extremal_energies", "verify"]


def _text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_text(v) for v in value)
    return str(value)


def verify(**options):
    """Run the suites with the given configuration keys.

    Returns (exit_code, report) with report the parsed report.json.
    """
    result = _run({key: _text(value) for key, value in options.items()})
    return result["exit_code"], json.loads(result["report_json"])
