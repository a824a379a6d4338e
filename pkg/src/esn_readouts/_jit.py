"""Optional numba acceleration.

Set ``ESN_READOUTS_DISABLE_JIT=1`` to force the pure-numpy kernels (handy for
debugging and for environments without numba).
"""

import os

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in ("1", "true", "yes", "on")


USE_JIT = HAVE_NUMBA and not _env_flag("ESN_READOUTS_DISABLE_JIT")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise the identity decorator."""
    if HAVE_NUMBA:
        return nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
