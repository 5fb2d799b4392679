"""Kernel dispatch: the compiled extension when built, numpy otherwise.

Set GRAIL_PURE_PYTHON=1 to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

_impl = _pykernels
if os.environ.get("GRAIL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND
leq_slack = _impl.leq_slack
hausdorff_table = _impl.hausdorff_table
w1_dual_rows = _impl.w1_dual_rows
w1_dual_table = _impl.w1_dual_table
min_scale = _impl.min_scale


def backends() -> dict:
    """Every available implementation, keyed by name (for benchmarks and tests)."""
    out = {"python": _pykernels}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
