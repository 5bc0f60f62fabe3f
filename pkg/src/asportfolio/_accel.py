"""Switch between numba-compiled kernels and their pure-numpy twins.

Set ``ASPORTFOLIO_DISABLE_NUMBA=1`` before import to force the numpy path.
Both paths are kept bit-for-bit compatible; ``tests/test_kernels.py``
checks that.
"""

import os

_FLAG = "ASPORTFOLIO_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get(_FLAG, "").strip().lower() not in (
    "1",
    "true",
    "yes",
    "on",
)


def njit(fn):
    """Compile ``fn`` with numba when available, otherwise return it as is."""
    if numba is None:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def pick(numba_impl, numpy_impl):
    return numba_impl if USE_NUMBA else numpy_impl
