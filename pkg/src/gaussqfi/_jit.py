"""Optional numba acceleration.

Set ``GAUSSQFI_DISABLE_NUMBA=1`` to force the pure-numpy code paths (also used
automatically when numba cannot be imported).
"""

import os

_DISABLED = os.environ.get("GAUSSQFI_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False
    _njit = None


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAS_NUMBA:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrapper(func):
        return func

    return wrapper
