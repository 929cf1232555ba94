"""Backend selection for the hot kernels.

The compiled extension is preferred; set ``DECLUTTER_PURE_PYTHON=1`` to
force the NumPy fallback.
"""
import os

from . import _fallback

if os.environ.get("DECLUTTER_PURE_PYTHON"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _fallback

BACKEND = "python" if _impl is _fallback else "cython"

pair_free = _impl.pair_free
star_free = _impl.star_free
shadow_count = _impl.shadow_count
