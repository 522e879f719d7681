"""Hot loops: triad convolution, its Jacobian, compensated prefix sums.

The compiled extension is used when it was built; otherwise the numpy
fallback is imported. Set ``VOIGTLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels as python

if os.environ.get("VOIGTLAB_PURE_PYTHON", "") not in ("", "0"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

triad_apply = _impl.triad_apply
triad_apply_batch = _impl.triad_apply_batch
triad_jacobian = _impl.triad_jacobian
kahan_cumsum = _impl.kahan_cumsum

__all__ = ["BACKEND", "compiled", "python", "triad_apply", "triad_apply_batch",
           "triad_jacobian", "kahan_cumsum"]
