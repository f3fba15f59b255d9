"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``SNAILBUDGET_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SNAILBUDGET_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

pivot = _impl.pivot
simplex_iterate = _impl.simplex_iterate
min_conversion_gap = _impl.min_conversion_gap


def get_backend(name):
    """Return the kernel module for ``"python"`` or ``"cython"`` (raises ImportError if unbuilt)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")
