"""Kernel backend selection.

Prefers the compiled extension; falls back to the NumPy implementation.
``TRIBOSON_FORCE_PURE=1`` forces the fallback (used by the benchmark and
by tests that exercise both code paths).
"""

import os

if os.environ.get("TRIBOSON_FORCE_PURE") == "1":
    from . import _kernels_py as kernels
    BACKEND = "python"
else:
    try:
        from . import _fastkern as kernels  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as kernels
        BACKEND = "python"

k2_array = kernels.k2_array
kiv1 = kernels.kiv1
kiv1_array = kernels.kiv1_array
