"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
pure-Python ``_pykernels`` module is used.  Setting ``QPL_PURE_PYTHON=1``
forces the fallback.
"""

import os
import warnings

from qpl import _pykernels

RATIO, CARRY, NUM_ZERO, DEN_ZERO = (
    _pykernels.RATIO,
    _pykernels.CARRY,
    _pykernels.NUM_ZERO,
    _pykernels.DEN_ZERO,
)


def _load():
    if os.environ.get("QPL_PURE_PYTHON", "") not in ("", "0"):
        return _pykernels, "python"
    try:
        from qpl import _ckernels
    except ImportError:
        warnings.warn(
            "qpl compiled kernels unavailable, falling back to pure Python",
            RuntimeWarning,
            stacklevel=3,
        )
        return _pykernels, "python"
    return _ckernels, "cython"


_impl, BACKEND = _load()

horner = _impl.horner
product_recursion = _impl.product_recursion
ratio_recursion = _impl.ratio_recursion
q_integral_sums = _impl.q_integral_sums
