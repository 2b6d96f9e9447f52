"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the NumPy
fallback. Set ``FRACTV_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"

if os.environ.get("FRACTV_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

haversine_matrix = _impl.haversine_matrix
median_pass = _impl.median_pass

__all__ = ["BACKEND", "haversine_matrix", "median_pass"]
