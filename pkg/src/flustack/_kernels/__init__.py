"""Numerical kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise
the pure-numpy fallback takes over.  Set ``FLUSTACK_PURE_PYTHON=1`` to
force the fallback (useful for the backend benchmark and for debugging).
"""

import os

from . import _pykernels as py_backend

cy_backend = None
if not os.environ.get("FLUSTACK_PURE_PYTHON"):
    try:
        from . import _speedups as cy_backend
    except ImportError:
        cy_backend = None

_active = cy_backend if cy_backend is not None else py_backend

BACKEND = _active.BACKEND
lasso_cd = _active.lasso_cd
svr_smo = _active.svr_smo
split_scan = _active.split_scan

__all__ = ["BACKEND", "lasso_cd", "svr_smo", "split_scan", "py_backend", "cy_backend"]
