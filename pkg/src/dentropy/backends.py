"""Kernel backend selection.

The compiled extension is preferred; the numpy fallback keeps the package
functional (slower) when it is missing.  Set DENTROPY_FORCE_PYTHON=1 to
force the fallback, e.g. for the backend benchmark.
"""

import os
import warnings

FORCE_PYTHON_ENV = "DENTROPY_FORCE_PYTHON"

if os.environ.get(FORCE_PYTHON_ENV, "0") not in ("", "0"):
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "ext"
    except ImportError:  # pragma: no cover - depends on the build
        from . import _kernels_py as kernels

        BACKEND = "python"
        warnings.warn(
            "dentropy compiled kernels not available; falling back to the "
            "slower pure-numpy backend",
            RuntimeWarning,
            stacklevel=2,
        )
