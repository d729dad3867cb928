"""Select the simplex pivoting kernel at import time.

The compiled extension is used when importable; setting ``SLMP_PURE_PYTHON=1``
forces the numpy fallback.
"""
import os

from . import _simplex_kernel_py

if os.environ.get("SLMP_PURE_PYTHON", "") not in ("", "0"):
    run_phase = _simplex_kernel_py.run_phase
    KERNEL = "python"
else:
    try:
        from ._simplex_kernel import run_phase
        KERNEL = "compiled"
    except ImportError:
        run_phase = _simplex_kernel_py.run_phase
        KERNEL = "python"
