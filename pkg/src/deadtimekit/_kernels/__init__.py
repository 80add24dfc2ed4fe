"""Hot-kernel backend selection.

The compiled Cython kernels are used when the extension was built;
otherwise the pure-numpy fallback is selected.  Set the environment
variable DEADTIMEKIT_BACKEND to "python" or "cython" to force one.
Both backends produce bit-identical results (all integer arithmetic).
"""

import os

from . import _pykernels

_forced = os.environ.get("DEADTIMEKIT_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _cykernels as _impl
        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise ImportError(
                "DEADTIMEKIT_BACKEND=cython but the compiled extension is not available"
            )
        _impl = _pykernels
        BACKEND = "python"

deadtime_filter = _impl.deadtime_filter
dead_time_per_bin = _impl.dead_time_per_bin
