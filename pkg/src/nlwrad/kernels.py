"""Kernel selection: compiled Cython extension when built, numpy otherwise.

Set NLWRAD_PURE_PYTHON=1 to force the numpy fallback (used by the benchmark
and to test kernel parity).
"""

import os

from . import _step_kernels_py

STATUS_OK = _step_kernels_py.STATUS_OK
STATUS_BLOWUP = _step_kernels_py.STATUS_BLOWUP
STATUS_NONFINITE = _step_kernels_py.STATUS_NONFINITE
BLOWUP_LIMIT = _step_kernels_py.BLOWUP_LIMIT

if os.environ.get("NLWRAD_PURE_PYTHON", "0") not in ("", "0"):
    _impl = _step_kernels_py
    COMPILED = False
else:
    try:
        from . import _step_kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        _impl = _step_kernels_py
        COMPILED = False

run_steps = _impl.run_steps
KERNEL_NAME = "compiled" if COMPILED else "python"
