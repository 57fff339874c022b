"""Event-queue backend selection.

The compiled queue is preferred when its extension module built; the
pure-Python heap is the fallback. Setting SIMRUN_PURE_PYTHON=1 forces the
fallback regardless. Both backends order events identically because the
(fire_at, seq) key is a strict total order, so backend choice never changes
simulation results.
"""

import os

if os.environ.get("SIMRUN_PURE_PYTHON") == "1":
    from ._evqueue_py import EventQueue

    BACKEND = "python"
else:
    try:
        from ._evqueue import EventQueue  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from ._evqueue_py import EventQueue

        BACKEND = "python"

__all__ = ["BACKEND", "EventQueue"]
