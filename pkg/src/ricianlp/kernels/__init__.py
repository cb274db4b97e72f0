"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The active backend is fixed at import time (see :mod:`ricianlp._backend`).
``get_backend`` hands out either implementation explicitly, which the tests
and the benchmark use to compare the two.
"""
from types import ModuleType

from .. import _backend
from . import numpy_impl

_EXPORTS = (
    "i0e_array",
    "i1e_array",
    "log_kernel_grid",
    "mixture_log_ratio",
    "kernel_expectations",
    "plane_mixture_mi",
    "mixture_mi_terms",
)

if _backend.USE_NUMBA:
    from . import numba_impl as _active
else:
    _active = numpy_impl

BACKEND = "numba" if _active is not numpy_impl else "numpy"


def get_backend(name: str) -> ModuleType:
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        if not _backend.HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        from . import numba_impl

        return numba_impl
    raise ValueError(f"unknown backend {name!r}")


i0e_array = _active.i0e_array
i1e_array = _active.i1e_array
log_kernel_grid = _active.log_kernel_grid
mixture_log_ratio = _active.mixture_log_ratio
kernel_expectations = _active.kernel_expectations
plane_mixture_mi = _active.plane_mixture_mi
mixture_mi_terms = _active.mixture_mi_terms

__all__ = ["BACKEND", "get_backend", *_EXPORTS]
