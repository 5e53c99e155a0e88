"""Backend selection for the string kernels.

The compiled extension is used when it was built and ``MORPHAN_PURE_PYTHON``
is unset; otherwise the pure-Python twins are used. ``BACKEND`` names the
active one.
"""
import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("MORPHAN_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

BACKENDS = {"python": _pykernels}
if BACKEND == "compiled":
    BACKENDS["compiled"] = _impl


def codepoints(word: str) -> np.ndarray:
    return np.array([ord(ch) for ch in word], dtype=np.int32)


def from_codepoints(row) -> str:
    return "".join(map(chr, row))


def shuffle_intersect(a: str, b: str, c: str, d: str) -> bool:
    return bool(_impl.shuffle_intersect(codepoints(a), codepoints(b), codepoints(c), codepoints(d)))


def alea_trials(a: str, b: str, c: str, u: np.ndarray) -> list:
    """Run one Alea trial per row of ``u``; returns candidate strings (None on failure)."""
    out, ok = _impl.alea_trials(codepoints(a), codepoints(b), codepoints(c), np.ascontiguousarray(u, dtype=np.float64))
    return [from_codepoints(row) if flag else None for row, flag in zip(out.tolist(), ok.tolist())]


def common_extension(a: str, b: str) -> np.ndarray:
    return _impl.common_extension(codepoints(a), codepoints(b))
