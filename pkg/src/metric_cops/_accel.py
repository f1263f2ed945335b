"""JIT switch for the numeric kernels.

Kernels are written in the numba-compatible subset of Python.  They are
compiled with ``numba.njit`` unless numba is missing or the environment
variable ``METRIC_COPS_PURE`` is set to a truthy value, in which case the
very same functions run as plain Python on numpy arrays.
"""
import os

_FLAG = os.environ.get("METRIC_COPS_PURE", "").strip().lower()
PURE_REQUESTED = _FLAG not in ("", "0", "false", "no")

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

NUMBA_ENABLED = _numba is not None and not PURE_REQUESTED


def _identity(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(fn):
        return fn

    return wrap


if NUMBA_ENABLED:
    njit = _numba.njit
else:
    njit = _identity


def backend():
    return "numba" if NUMBA_ENABLED else "python"
