"""Kernel backend selection.

The compiled extension is used when it was built; setting the environment
variable ``ORBICHECK_PURE=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("ORBICHECK_PURE"):
    from . import _pykernel as _impl
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        from . import _pykernel as _impl

BACKEND = _impl.BACKEND
add_terms = _impl.add_terms
mul_terms = _impl.mul_terms
scale_shift = _impl.scale_shift
divmod_terms = _impl.divmod_terms
