"""Kernel selection.

The compiled extension is used when it imports; otherwise the pure-Python
module.  Setting ``LISLAB_PURE_PYTHON=1`` forces the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("LISLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

lis_strict = _impl.lis_strict
evolve_row = _impl.evolve_row
sweep = _impl.sweep

__all__ = ["BACKEND", "lis_strict", "evolve_row", "sweep"]
