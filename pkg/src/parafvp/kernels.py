"""Kernel backend selection.

The compiled extension is used when it imports; setting ``FVP_PURE_PYTHON=1``
forces the numpy fallback. ``BACKEND`` names the active choice.
"""
import os

import numpy as np

from . import _kernels_py

_compiled = None
if not os.environ.get("FVP_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def _impl(backend):
    if backend is None:
        backend = BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if backend == "python":
        return _kernels_py
    raise ValueError(f"unknown backend {backend!r}")


def duhamel_scan(decay, w_left, w_right, u0, values, backend=None):
    """Node states ``s[m+1] = decay*s[m] + w_left*f[m] + w_right*f[m+1]``."""
    return _impl(backend).duhamel_scan(
        np.ascontiguousarray(decay, dtype=float),
        np.ascontiguousarray(w_left, dtype=float),
        np.ascontiguousarray(w_right, dtype=float),
        np.ascontiguousarray(u0, dtype=complex),
        np.ascontiguousarray(values, dtype=complex),
    )


def cn_march(u_init, r, dt, left, right, source, backend=None):
    """Crank-Nicolson march of interior values; see ``parafvp.fd``."""
    return _impl(backend).cn_march(
        np.ascontiguousarray(u_init, dtype=float),
        float(r),
        float(dt),
        np.ascontiguousarray(left, dtype=float),
        np.ascontiguousarray(right, dtype=float),
        np.ascontiguousarray(source, dtype=float),
    )
