"""Kernel selection: compiled extension when importable, numpy/Python twin otherwise.

Set DENSEBAL_PURE_PYTHON=1 to force the fallback.  `BACKEND` records which
implementation is active.
"""

import os

from densebal.kernels import pyfallback

if os.environ.get("DENSEBAL_PURE_PYTHON") == "1":
    _impl = pyfallback
    BACKEND = "python"
else:
    try:
        from densebal.kernels import _speedups as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = pyfallback
        BACKEND = "python"

jacobi_epsilon_sweeps = _impl.jacobi_epsilon_sweeps
max_flow = _impl.max_flow
