"""Pure-numpy implementations of the per-shot hot kernels.

These are the import-time fallback when the compiled extension is not
available.  All arithmetic is integer picoseconds, so results are
bit-identical to the compiled kernels.
"""

from __future__ import annotations

import numpy as np

_FAR_FUTURE = np.iinfo(np.int64).max // 2


def deadtime_filter(times_ps: np.ndarray, offsets: np.ndarray, tau_ps: int) -> np.ndarray:
    """Greedy non-paralyzable deadtime filter, applied independently per shot.

    Keeps the first arrival of each shot, then discards any arrival closer
    than tau_ps to the last kept one.  Returns a uint8 keep-mask over the
    flat arrival array.
    """
    times = np.asarray(times_ps, dtype=np.uint64)
    offsets = np.asarray(offsets, dtype=np.int64)
    keep = np.zeros(len(times), dtype=np.uint8)
    if tau_ps <= 0:
        keep[:] = 1
        return keep
    tau = np.uint64(tau_ps)
    for i in range(len(offsets) - 1):
        lo, hi = offsets[i], offsets[i + 1]
        if hi <= lo:
            continue
        shot = times[lo:hi]
        j = 0
        n = hi - lo
        while j < n:
            keep[lo + j] = 1
            # next arrival at least tau after the kept one
            j = int(np.searchsorted(shot, shot[j] + tau, side="left"))
    return keep


def dead_time_per_bin(
    times_ps: np.ndarray,
    offsets: np.ndarray,
    tau_ps: int,
    bin_width_ps: int,
    num_bins: int,
    window_start_ps: int,
) -> np.ndarray:
    """Total dead picoseconds per bin, summed over all shots.

    Each detection at d deadens [d, d + tau), truncated at the next
    detection of the same shot (union semantics for inputs that were not
    deadtime-filtered) and at the window end.  Exact int64 accumulation.
    """
    d = np.asarray(times_ps, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    acc = np.zeros(num_bins, dtype=np.int64)
    if len(d) == 0 or tau_ps <= 0:
        return acc
    window_end = window_start_ps + num_bins * bin_width_ps

    nxt = np.empty_like(d)
    nxt[:-1] = d[1:]
    nxt[-1] = _FAR_FUTURE
    last_of_shot = offsets[1:] - 1
    last_of_shot = last_of_shot[(last_of_shot >= 0) & (last_of_shot < len(d))]
    nxt[last_of_shot] = _FAR_FUTURE

    end = np.minimum(d + tau_ps, np.minimum(nxt, window_end))
    start = np.clip(d, window_start_ps, window_end)
    end = np.maximum(end, start)
    nz = end > start
    if not np.any(nz):
        return acc
    start = start[nz]
    end = end[nz]

    b0 = (start - window_start_ps) // bin_width_ps
    b1 = (end - 1 - window_start_ps) // bin_width_ps
    single = b0 == b1
    np.add.at(acc, b0[single], (end - start)[single])
    multi = ~single
    if np.any(multi):
        left_edge_next = window_start_ps + (b0[multi] + 1) * bin_width_ps
        np.add.at(acc, b0[multi], left_edge_next - start[multi])
        right_edge = window_start_ps + b1[multi] * bin_width_ps
        np.add.at(acc, b1[multi], end[multi] - right_edge)
        # full interior bins b0+1 .. b1-1 via a difference array
        diff = np.zeros(num_bins + 1, dtype=np.int64)
        np.add.at(diff, b0[multi] + 1, 1)
        np.add.at(diff, b1[multi], -1)
        acc += np.cumsum(diff[:-1]) * bin_width_ps
    return acc
