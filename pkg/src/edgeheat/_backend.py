"""Select the compiled or pure-Python kernel module at import.

Set ``EDGEHEAT_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("EDGEHEAT_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as kernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as kernels
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as kernels
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
