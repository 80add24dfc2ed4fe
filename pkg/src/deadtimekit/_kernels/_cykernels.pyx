# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-shot hot kernels (deadtime filtering, active-time accounting).

Must stay bit-identical to _pykernels: all arithmetic is integer
picoseconds and both backends are exercised against each other in the
test suite.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def deadtime_filter(times_ps, offsets, tau_ps):
    """Greedy non-paralyzable deadtime filter per shot; returns uint8 keep mask."""
    cdef const cnp.uint64_t[::1] times = np.ascontiguousarray(times_ps, dtype=np.uint64)
    cdef const cnp.int64_t[::1] offs = np.ascontiguousarray(offsets, dtype=np.int64)
    out = np.zeros(times.shape[0], dtype=np.uint8)
    cdef cnp.uint8_t[::1] keep = out
    cdef cnp.uint64_t tau = <cnp.uint64_t> tau_ps
    cdef Py_ssize_t i, j, lo, hi
    cdef cnp.uint64_t last
    if tau_ps <= 0:
        out[:] = 1
        return out
    for i in range(offs.shape[0] - 1):
        lo = offs[i]
        hi = offs[i + 1]
        if hi <= lo:
            continue
        last = times[lo]
        keep[lo] = 1
        for j in range(lo + 1, hi):
            if times[j] - last >= tau:
                keep[j] = 1
                last = times[j]
    return out


def dead_time_per_bin(times_ps, offsets, tau_ps, bin_width_ps, num_bins, window_start_ps):
    """Total dead picoseconds per bin over all shots; exact int64 accumulation."""
    cdef const cnp.int64_t[::1] times = np.ascontiguousarray(times_ps, dtype=np.int64)
    cdef const cnp.int64_t[::1] offs = np.ascontiguousarray(offsets, dtype=np.int64)
    out = np.zeros(num_bins, dtype=np.int64)
    cdef cnp.int64_t[::1] acc = out
    cdef cnp.int64_t tau = tau_ps
    cdef cnp.int64_t width = bin_width_ps
    cdef cnp.int64_t wstart = window_start_ps
    cdef cnp.int64_t wend = wstart + (<cnp.int64_t> num_bins) * width
    # interior (fully dead) bins go through a difference array so a long
    # deadtime spanning many bins costs O(1), not O(bins spanned)
    diff_arr = np.zeros(num_bins + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] diff = diff_arr
    cdef Py_ssize_t i, j, lo, hi
    cdef cnp.int64_t d, end, b0, b1, b, running
    if tau <= 0:
        return out
    for i in range(offs.shape[0] - 1):
        lo = offs[i]
        hi = offs[i + 1]
        for j in range(lo, hi):
            d = times[j]
            end = d + tau
            if j + 1 < hi and times[j + 1] < end:
                end = times[j + 1]
            if end > wend:
                end = wend
            if d < wstart:
                d = wstart
            if end <= d:
                continue
            b0 = (d - wstart) // width
            b1 = (end - 1 - wstart) // width
            if b0 == b1:
                acc[b0] += end - d
            else:
                acc[b0] += wstart + (b0 + 1) * width - d
                acc[b1] += end - (wstart + b1 * width)
                diff[b0 + 1] += 1
                diff[b1] -= 1
    running = 0
    for b in range(num_bins):
        running += diff[b]
        acc[b] += running * width
    return out
