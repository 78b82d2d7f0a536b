"""Kernel backend selection.

The compiled extension is used when importable; set ``MFREQLAB_BACKEND=python``
to force the numpy fallback (the test-suite runs both).
"""

import os

from . import _pycore

NAME = "python"
kernels = _pycore

if os.environ.get("MFREQLAB_BACKEND", "").lower() != "python":
    try:
        from . import _core as kernels  # noqa: F811

        NAME = "cython"
    except ImportError:
        pass


def get(name=None):
    """Return the kernel module for ``name`` ('cython' or 'python'), default active."""
    if name is None:
        return kernels
    if name == "python":
        return _pycore
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
