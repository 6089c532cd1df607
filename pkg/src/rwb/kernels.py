"""Backend selection for the search kernels.

The compiled extension is used when it imports; setting ``RWB_PURE_PYTHON=1``
forces the Python fallback.  ``BACKEND`` names the active one.
"""
import os

from rwb import _kernels_py

try:
    from rwb import _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

if _kernels_c is not None and os.environ.get("RWB_PURE_PYTHON", "") in ("", "0"):
    _impl = _kernels_c
    BACKEND = "cython"
else:
    _impl = _kernels_py
    BACKEND = "python"

embed_search = _impl.embed_search
color_search = _impl.color_search


def backends():
    """Map of available backend name -> kernel module."""
    out = {"python": _kernels_py}
    if _kernels_c is not None:
        out["cython"] = _kernels_c
    return out
