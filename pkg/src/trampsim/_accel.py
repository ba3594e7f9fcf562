"""JIT switch for the hot kernels.

Set ``TRAMPSIM_NO_NUMBA=1`` to force the pure numpy/Python paths. When numba
is not importable the fallback is used automatically.
"""
import os

_disabled = os.environ.get("TRAMPSIM_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    _njit = None
    HAS_NUMBA = False


def njit(func):
    """``numba.njit(cache=True)`` when enabled, identity otherwise."""
    if HAS_NUMBA:
        return _njit(cache=True)(func)
    return func
