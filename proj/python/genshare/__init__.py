"""Generalized share forecasters for prediction with expert advice."""

from ._genshare import *  # noqa: F401,F403
from ._genshare import ConfigError, run_experiment, report_csv

import json as _json


def run_config(config, threads=1):
    """Run a config given as a dict (or JSON string); returns the report rows."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return run_experiment(config, threads)
