"""Kernel backend selection.

Hot loops run under numba when it is importable. Setting
``RICIANLP_DISABLE_NUMBA=1`` forces the vectorized numpy path, which is
also what runs when numba is missing.
"""
import os

ENV_FLAG = "RICIANLP_DISABLE_NUMBA"


def numba_disabled_by_env() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not numba_disabled_by_env()
