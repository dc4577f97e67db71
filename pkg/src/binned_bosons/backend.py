"""Kernel backend selection.

The hot inner loops (Glynn permanent, Gurvits estimator) exist in two
versions: numba-jitted and pure numpy.  The environment variable
``BINNED_BOSONS_BACKEND`` picks one:

* ``auto`` (default): numba if importable, numpy otherwise
* ``numba``: require numba, fail loudly if missing
* ``numpy``: force the pure-numpy path

The choice is resolved once, at import time.
"""

import os

_ENV_VAR = "BINNED_BOSONS_BACKEND"

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:
    NUMBA_AVAILABLE = False


def _resolve() -> str:
    requested = os.environ.get(_ENV_VAR, "auto").lower()
    if requested not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'auto', 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not NUMBA_AVAILABLE:
            raise ImportError(f"{_ENV_VAR}=numba but numba is not importable")
        return "numba"
    return "numba" if NUMBA_AVAILABLE else "numpy"


ACTIVE_BACKEND = _resolve()


def active_backend() -> str:
    """Name of the kernel backend in use ('numba' or 'numpy')."""
    return ACTIVE_BACKEND
