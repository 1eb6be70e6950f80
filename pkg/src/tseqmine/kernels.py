"""Selects the PrefixSpan kernel: the compiled one if built, else pure Python.

Set ``TSEQMINE_PURE=1`` to force the pure-Python kernel.
"""
from __future__ import annotations

import os

from . import _span_py

if os.environ.get("TSEQMINE_PURE", "") not in ("", "0"):
    span = _span_py.span
    BACKEND = "python"
else:
    try:
        from ._span import span
        BACKEND = "cython"
    except ImportError:
        span = _span_py.span
        BACKEND = "python"

__all__ = ["span", "BACKEND"]
