"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``THERMOFLOW_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used.
"""
import os

from . import _pykernels

if os.environ.get("THERMOFLOW_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

curve_gap = _impl.curve_gap
flattest_sorted = _impl.flattest_sorted
compositions = _impl.compositions
