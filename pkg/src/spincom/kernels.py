"""Backend selection for the per-frequency kernels.

The compiled extension is preferred; set ``SPINCOM_PURE_PYTHON=1`` to force
the numpy implementation.
"""
import os

from . import _kernels_py

if os.environ.get("SPINCOM_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"numpy": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "numpy"
_active = BACKENDS[BACKEND]


def use_backend(name):
    """Switch the active backend; returns the previous name."""
    global BACKEND, _active
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})")
    previous = BACKEND
    BACKEND, _active = name, BACKENDS[name]
    return previous


def output_batch(*args):
    return _active.output_batch(*args)


def cavity_batch(*args):
    return _active.cavity_batch(*args)
