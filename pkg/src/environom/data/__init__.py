"""Bundled desk-scale fixture: a synthetic multi-energy scenario plus the
background database it was characterized against.

The numbers are illustrative, chosen so the six objectives pull the system in
genuinely different directions; they do not reproduce any real country's
statistics.
"""

from pathlib import Path

_HERE = Path(__file__).resolve().parent


def bundled_scenario_dir() -> Path:
    return _HERE / "scenario"


def bundled_db_dir() -> Path:
    return _HERE / "db"
