"""Kernel backend selection.

The compiled `_kernels` extension is used when importable; otherwise the
pure-numpy `_kernels_py` fallback. Set PQCFOURIER_BACKEND=python or
=compiled to force a choice (forcing `compiled` raises if the extension
is missing instead of silently falling back).
"""

from __future__ import annotations

import os

from . import _kernels_py

_ENV_VAR = "PQCFOURIER_BACKEND"


def _select():
    forced = os.environ.get(_ENV_VAR, "").strip().lower()
    if forced == "python":
        return _kernels_py
    try:
        from . import _kernels

        return _kernels
    except ImportError:
        if forced == "compiled":
            raise ImportError(
                f"{_ENV_VAR}=compiled but the pqcfourier._kernels extension is not built"
            )
        return _kernels_py


kernels = _select()


def backend_name() -> str:
    """'compiled' or 'python', whichever is active."""
    return "compiled" if kernels.COMPILED else "python"
