"""Hot-loop kernels with a numba fast path and a pure-numpy fallback.

The numba backend is used when importable; set the environment variable
``SANDBUBBLER_DISABLE_NUMBA=1`` (before import) to force the numpy
fallback.  Both backends produce byte-identical results; see
``benchmarks/bench_kernels.py`` for the speed comparison.
"""

from __future__ import annotations

import os

from . import _numpy

_flag = os.environ.get("SANDBUBBLER_DISABLE_NUMBA", "")
if _flag not in ("", "0"):
    _impl = _numpy
    BACKEND = "numpy"
else:
    try:
        from . import _numba as _impl  # type: ignore[no-redef]

        BACKEND = "numba"
    except ImportError:
        _impl = _numpy
        BACKEND = "numpy"

stamp_discs = _impl.stamp_discs
gradient_stimulus = _impl.gradient_stimulus
box_occupancy = _impl.box_occupancy


def backend() -> str:
    """Name of the active kernel backend: 'numba' or 'numpy'."""
    return BACKEND


__all__ = ["stamp_discs", "gradient_stimulus", "box_occupancy", "backend", "BACKEND"]
