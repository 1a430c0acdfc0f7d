"""Backend selection for the compiled kernels.

Setting ``SFFSBA_DISABLE_NUMBA=1`` (or having numba unavailable) routes every
hot kernel through its pure-numpy implementation instead.
"""
import os

_FLAG = os.environ.get("SFFSBA_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is usable, identity decorator otherwise."""
    if numba is None:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda func: func
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "numpy"
