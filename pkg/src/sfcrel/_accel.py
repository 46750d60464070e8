"""Optional numba acceleration.

Set ``SFCREL_NO_NUMBA=1`` to force the pure-numpy kernels. Both paths
produce identical Monte Carlo counts; enumeration sums agree to round-off.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("SFCREL_NO_NUMBA", "").strip().lower() not in ("1", "true", "yes")


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]
    return lambda fn: fn
