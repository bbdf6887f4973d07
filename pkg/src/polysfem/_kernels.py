"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set ``POLYSFEM_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
stab2d_batch = _kernels_py.stab2d_batch

if os.environ.get("POLYSFEM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        pass
    else:
        stab2d_batch = _ckernels.stab2d_batch
        BACKEND = "cython"

__all__ = ["BACKEND", "stab2d_batch"]
