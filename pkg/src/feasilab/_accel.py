"""Kernel backend selection.

The hot numeric kernels in :mod:`feasilab.kernels` are written once and either
compiled with numba's ``@njit`` (default) or left as plain numpy functions.
The backend is chosen at import time from the ``FEASILAB_KERNEL`` environment
variable:

* ``FEASILAB_KERNEL=numba`` (or unset/``auto`` with numba importable): JIT.
* ``FEASILAB_KERNEL=numpy``: pure-numpy fallback, no compilation.

Both paths execute the same source, so results agree; the numpy path simply
pays interpreter overhead in the inner loops.  ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

_VALID = ("numba", "numpy")


def _select_backend() -> str:
    choice = os.environ.get("FEASILAB_KERNEL", "auto").strip().lower()
    if choice in ("", "auto"):
        try:
            import numba  # noqa: F401
        except ImportError:
            return "numpy"
        return "numba"
    if choice not in _VALID:
        raise RuntimeError(
            f"FEASILAB_KERNEL={choice!r} not recognized; use one of {_VALID}"
        )
    return choice


BACKEND = _select_backend()

if BACKEND == "numba":
    from numba import njit as _njit

    def jit(fn):
        return _njit(cache=True)(fn)

else:

    def jit(fn):
        return fn
