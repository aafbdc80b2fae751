"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``EPP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

kernels = _kernels_py
BACKEND = "python"


def available() -> list[str]:
    return ["cython", "python"] if _compiled is not None else ["python"]


def current() -> str:
    return BACKEND


def set_backend(name: str) -> None:
    """Switch every module to the ``"cython"`` or ``"python"`` kernels."""
    global kernels, BACKEND
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        kernels = _compiled
    elif name == "python":
        kernels = _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


if _compiled is not None and not os.environ.get("EPP_PURE_PYTHON"):
    set_backend("cython")
