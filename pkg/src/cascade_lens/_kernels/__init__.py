"""Hot graph kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when importable; set ``CASCADE_LENS_PURE=1`` to
force the fallback. :data:`BACKEND` names the active implementation.
"""
import os

from . import _pykernels

if os.environ.get("CASCADE_LENS_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

scc_labels = _impl.scc_labels
wcc_labels = _impl.wcc_labels
bfs_levels = _impl.bfs_levels
triangle_counts = _impl.triangle_counts
bfs_pair_stats = _impl.bfs_pair_stats

__all__ = [
    "BACKEND",
    "bfs_levels",
    "bfs_pair_stats",
    "scc_labels",
    "triangle_counts",
    "wcc_labels",
]
