"""Count (Y) and active-fraction (Z) histograms built from shot timestamps.

Z is accumulated as exact integer picoseconds of dead time per bin; the
division into a fraction happens once at the end, so parallel partial
sums merge to results identical to sequential accumulation.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .core import (
    ActiveFractionHistogram,
    CountHistogram,
    DetectorConfig,
    ShotTimestamps,
    bin_index_ps,
)


class WindowError(ValueError):
    """A timestamp lies outside the acquisition window."""


def _check_window(data: ShotTimestamps, config: DetectorConfig) -> None:
    if data.total_detections == 0:
        return
    t = data.times_ps
    lo = config.window_start_ps
    hi = config.window_end_ps
    if int(t.min()) < lo or int(t.max()) >= hi:
        bad = t[(t.astype(np.int64) < lo) | (t.astype(np.int64) >= hi)][0]
        raise WindowError(
            f"timestamp {int(bad)} ps outside acquisition window [{lo}, {hi}) ps"
        )


def build_count_histogram(
    data: ShotTimestamps, config: DetectorConfig, per_shot: bool = False
) -> CountHistogram:
    """Y_m: detections with t in [t_m, t_m+1), summed over shots."""
    _check_window(data, config)
    idx = bin_index_ps(data.times_ps, config)
    counts = np.bincount(idx, minlength=config.num_bins).astype(np.int64)
    shots = None
    if per_shot:
        shot_idx = data.shot_indices()
        shots = np.zeros((data.num_shots, config.num_bins), dtype=np.int64)
        np.add.at(shots, (shot_idx, idx), 1)
    return CountHistogram(counts=counts, per_shot=shots)


def dead_ps_per_bin(data: ShotTimestamps, config: DetectorConfig) -> np.ndarray:
    """Integer picoseconds of dead time per bin, summed over all shots."""
    _check_window(data, config)
    return _kernels.dead_time_per_bin(
        data.times_ps,
        data.offsets,
        config.tau_ps,
        config.bin_width_ps,
        config.num_bins,
        config.window_start_ps,
    )


def build_active_histogram(data: ShotTimestamps, config: DetectorConfig) -> ActiveFractionHistogram:
    """Z_m: mean fraction of bin m during which the detector was live.

    Every detection deadens [t, t + tau), truncated at the window end (the
    detector state resets each shot) and at the next detection of the same
    shot, so inputs that were not deadtime-filtered cannot push Z below 0.
    """
    dead = dead_ps_per_bin(data, config)
    denom = data.num_shots * config.bin_width_ps
    fractions = 1.0 - dead / denom
    return ActiveFractionHistogram(fractions=fractions)


def single_shot_active(
    shot_times_ps: np.ndarray, config: DetectorConfig
) -> np.ndarray:
    """z_m for one shot, as exact fractions of each bin left active."""
    shot_times_ps = np.asarray(shot_times_ps, dtype=np.uint64)
    offsets = np.array([0, len(shot_times_ps)], dtype=np.int64)
    dead = _kernels.dead_time_per_bin(
        shot_times_ps,
        offsets,
        config.tau_ps,
        config.bin_width_ps,
        config.num_bins,
        config.window_start_ps,
    )
    return 1.0 - dead / config.bin_width_ps


def active_fraction(z: ActiveFractionHistogram) -> float:
    """AF: the mean of Z over all bins."""
    return float(np.mean(z.fractions))


def measured_rate(y: CountHistogram, config: DetectorConfig) -> np.ndarray:
    """Per-bin measured count rate R_m = Y_m / (num_shots * bin_width)."""
    return y.counts / (config.num_shots * config.bin_width)
