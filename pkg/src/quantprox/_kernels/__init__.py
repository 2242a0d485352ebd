"""Hot enumeration kernels with backend selection at import time.

The compiled extension (built from ``_speedups.pyx``) is used when present;
otherwise the chunked numpy implementation in ``_fallback`` takes over with
identical contracts.  ``python -m quantprox.benchmark`` times both.
"""

try:
    from . import _speedups as _impl

    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on the build
    from . import _fallback as _impl

    BACKEND = "python"

grid_min_guaranteed = _impl.grid_min_guaranteed
grid_min_cond = _impl.grid_min_cond
grid_min_excess = _impl.grid_min_excess
exhaustive_min_entropy_map = _impl.exhaustive_min_entropy_map
vertex_min_entropy = _impl.vertex_min_entropy

__all__ = [
    "BACKEND",
    "grid_min_guaranteed",
    "grid_min_cond",
    "grid_min_excess",
    "exhaustive_min_entropy_map",
    "vertex_min_entropy",
]
