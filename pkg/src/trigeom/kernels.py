"""Kernel backend selection: compiled extension if present, else pure Python.

Set ``TRIGEOM_PURE=1`` to force the Python fallback (used by the parity
tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("TRIGEOM_PURE") == "1":
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernel_py

BACKEND: str = _impl.BACKEND
delta_mask = _impl.delta_mask
delta_table = _impl.delta_table
scan_min = _impl.scan_min
