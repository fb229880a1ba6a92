"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``CLOSEDGEO_PURE=1`` to force the pure-Python kernels.
"""

import os

if os.environ.get("CLOSEDGEO_PURE", "") not in ("", "0"):
    from . import _fallback as backend
else:
    try:
        from . import _core as backend
    except ImportError:
        from . import _fallback as backend

from . import _fallback as python_backend

ball_bfs = backend.ball_bfs
cutting_sequence = backend.cutting_sequence
crossing_mask = backend.crossing_mask
BACKEND = backend.NAME


def compiled_backend():
    """The compiled module, or None if it was not built."""
    try:
        from . import _core
    except ImportError:
        return None
    return _core
