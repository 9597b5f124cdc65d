"""Kernel backend selection.

The compiled extension is used when importable; otherwise the pure-Python
twin.  Set ``ARITHSTRUCT_PURE=1`` to force the fallback.
"""
import os

if os.environ.get("ARITHSTRUCT_PURE"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

longest_run_on_step = _impl.longest_run_on_step
longest_ap_scan = _impl.longest_ap_scan
power_diff_count = _impl.power_diff_count
greedy_power_free = _impl.greedy_power_free
sumset_mask = _impl.sumset_mask
bohr_norm = _impl.bohr_norm

__all__ = [
    "BACKEND",
    "longest_run_on_step",
    "longest_ap_scan",
    "power_diff_count",
    "greedy_power_free",
    "sumset_mask",
    "bohr_norm",
]
