"""JIT switch.

Kernels are written in the numba-compatible subset of Python. When
``CATTREE_DISABLE_JIT`` is set (to anything but ``0``/``false``) or numba is
missing, ``jit`` is the identity and the same code runs as plain Python over
numpy arrays; the few bit-twiddling primitives that need different code on the
two paths live in ``cattree._bits``.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_flag = os.environ.get("CATTREE_DISABLE_JIT", "").strip().lower()
JIT_ENABLED = numba is not None and _flag in ("", "0", "false", "no")


def jit(fn):
    if JIT_ENABLED:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn
