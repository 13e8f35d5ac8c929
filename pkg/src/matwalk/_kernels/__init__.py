"""Kernel backend selection.

Imports the compiled extension when available, otherwise falls back to the
pure-Python reference implementation.  Set the environment variable
``MATWALK_PURE=1`` to force the pure backend (used by the cross-checking
tests and the benchmark).
"""

import os

from . import pure

if os.environ.get("MATWALK_PURE") == "1":
    backend = pure
else:
    try:
        from . import _core as backend
    except ImportError:
        backend = pure

IS_COMPILED = backend.IS_COMPILED
prod21_log_e1 = backend.prod21_log_e1
prod12_log_rows = backend.prod12_log_rows
simulate_excursions = backend.simulate_excursions
simulate_hitting = backend.simulate_hitting
sandwich_scan = backend.sandwich_scan

__all__ = [
    "IS_COMPILED",
    "backend",
    "pure",
    "prod21_log_e1",
    "prod12_log_rows",
    "simulate_excursions",
    "simulate_hitting",
    "sandwich_scan",
]
