"""Select the compiled kernels when available, else the NumPy fallback.

Set ``WMCF_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
by the backend-agreement tests).
"""

import os

from . import _kernels_py

NAME = "python"
kernels = _kernels_py

if os.environ.get("WMCF_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        NAME = "cython"


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
