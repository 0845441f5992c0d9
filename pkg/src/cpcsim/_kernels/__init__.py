"""Hot kernels: compiled Cython versions when built, numpy otherwise.

Set ``CPCSIM_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("CPCSIM_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

spectral_sum = _active.spectral_sum
return_probability = _active.return_probability
cascade_trials = _active.cascade_trials

__all__ = [
    "BACKEND",
    "cascade_trials",
    "compiled_backend",
    "python_backend",
    "return_probability",
    "spectral_sum",
]
