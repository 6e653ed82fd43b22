"""Kernel backend selection.

Set INTERSEARCH_BACKEND=numpy to force the pure-numpy path, =numba to require
the jit path. Unset (or "auto") prefers numba and falls back to numpy when
numba is not importable. Both paths share cell ordering and update formulas;
results agree to the last few ulps (transcendental and summation order differ).
"""
from __future__ import annotations

import os

_requested = os.environ.get("INTERSEARCH_BACKEND", "auto").strip().lower()

if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"INTERSEARCH_BACKEND must be 'auto', 'numba' or 'numpy', got {_requested!r}")

if _requested == "numpy":
    from . import _kernels_numpy as _impl
    ACTIVE_BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl
        ACTIVE_BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kernels_numpy as _impl
        ACTIVE_BACKEND = "numpy"

disc_cells = _impl.disc_cells
bayes_update_cells = _impl.bayes_update_cells
sum_binary_entropy = _impl.sum_binary_entropy
gain_at = _impl.gain_at
gains_at_positions = _impl.gains_at_positions
