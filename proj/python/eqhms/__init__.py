"""Python access to the eqhms core."""

import json

from . import _core
from ._core import HypothesisError, InputError

__all__ = ["HypothesisError", "InputError", "cli", "jacobian_count", "mirror_report", "parse_novikov"]


def cli(*args):
    """Run a CLI command. Returns (exit_code, parsed report or None, stderr)."""
    code, out, err = _core.run_cli([str(a) for a in args])
    return code, (json.loads(out) if code == 0 and out.strip() else None), err


def mirror_report(geometry, lam, precision="4", degenerate=False):
    return json.loads(_core.mirror_report(geometry, lam, str(precision), degenerate))


def parse_novikov(text):
    return json.loads(_core.parse_novikov(text))


def jacobian_count(fan):
    return _core.jacobian_count(fan)
