"""Shared domain types and time-grid arithmetic.

All timestamps and durations are held internally as unsigned 64-bit
integer picoseconds so that bin assignment is exact and accumulation over
millions of shots cannot drift.  Durations cross the public API boundary
as float seconds and are converted (and validated) on entry.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

PS_PER_SECOND = 10**12


class ConfigError(ValueError):
    """Invalid detector or scenario configuration."""


def seconds_to_ps(value: float, name: str = "duration") -> int:
    """Convert a duration in seconds to integer picoseconds.

    The duration must land on the picosecond grid to within 1e-3 ps;
    anything finer than the grid is a configuration error, not something
    to silently round away.
    """
    ps = value * PS_PER_SECOND
    ps_int = int(round(ps))
    if abs(ps - ps_int) > 1e-3:
        raise ConfigError(f"{name} = {value} s is not an integer number of picoseconds")
    return ps_int


def ps_to_seconds(ps) -> float:
    return np.asarray(ps, dtype=np.float64) / PS_PER_SECOND if np.ndim(ps) else float(ps) / PS_PER_SECOND


@dataclass(frozen=True)
class DetectorConfig:
    """Detector and acquisition geometry.

    Attributes:
        tau: deadtime interval in seconds (0 disables deadtime)
        bin_width: histogram bin width in seconds
        num_bins: number of histogram bins M
        num_shots: number of laser shots accumulated
        window_start: offset of the first bin edge from the shot start, seconds
    """

    tau: float
    bin_width: float
    num_bins: int
    num_shots: int
    window_start: float = 0.0

    def __post_init__(self):
        if self.tau < 0:
            raise ConfigError(f"tau must be >= 0, got {self.tau}")
        if self.bin_width <= 0:
            raise ConfigError(f"bin_width must be > 0, got {self.bin_width}")
        if self.num_bins < 1:
            raise ConfigError(f"num_bins must be >= 1, got {self.num_bins}")
        if self.num_shots < 1:
            raise ConfigError(f"num_shots must be >= 1, got {self.num_shots}")
        if self.window_start < 0:
            raise ConfigError(f"window_start must be >= 0, got {self.window_start}")
        # trigger grid validation eagerly
        self.tau_ps, self.bin_width_ps, self.window_start_ps

    @property
    def tau_ps(self) -> int:
        return seconds_to_ps(self.tau, "tau")

    @property
    def bin_width_ps(self) -> int:
        ps = seconds_to_ps(self.bin_width, "bin_width")
        if ps < 1:
            raise ConfigError("bin_width must be at least 1 ps")
        return ps

    @property
    def window_start_ps(self) -> int:
        return seconds_to_ps(self.window_start, "window_start")

    @property
    def window_end_ps(self) -> int:
        return self.window_start_ps + self.num_bins * self.bin_width_ps

    @property
    def window_length(self) -> float:
        """Acquisition window length in seconds (= num_bins * bin_width)."""
        return self.num_bins * self.bin_width_ps / PS_PER_SECOND

    def with_shots(self, num_shots: int) -> "DetectorConfig":
        """Copy of this config with a different accumulated shot count."""
        return DetectorConfig(
            tau=self.tau,
            bin_width=self.bin_width,
            num_bins=self.num_bins,
            num_shots=num_shots,
            window_start=self.window_start,
        )


def bin_edges(config: DetectorConfig) -> np.ndarray:
    """All M+1 bin edges in seconds; edges[m] = window_start + m * bin_width."""
    return bin_edges_ps(config) / PS_PER_SECOND


def bin_edges_ps(config: DetectorConfig) -> np.ndarray:
    """All M+1 bin edges in integer picoseconds."""
    start = config.window_start_ps
    width = config.bin_width_ps
    edges = start + width * np.arange(config.num_bins + 1, dtype=np.int64)
    edges.flags.writeable = False
    return edges


def bin_index_ps(times_ps: np.ndarray, config: DetectorConfig) -> np.ndarray:
    """Map integer-ps timestamps to bin indices (half-open bins [t_m, t_m+1))."""
    return (np.asarray(times_ps, dtype=np.int64) - config.window_start_ps) // config.bin_width_ps


def _as_frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


class ShotTimestamps:
    """Per-shot detection times, the raw product of simulation or file ingestion.

    Stored as one flat uint64 picosecond array plus per-shot offsets, so a
    million sparse shots do not cost a million small allocations.  Immutable
    after construction.
    """

    __slots__ = ("times_ps", "offsets", "num_shots")

    def __init__(self, times_ps: np.ndarray, offsets: np.ndarray):
        times_ps = _as_frozen(np.asarray(times_ps, dtype=np.uint64))
        offsets = _as_frozen(np.asarray(offsets, dtype=np.int64))
        if offsets.ndim != 1 or len(offsets) < 2:
            raise ValueError("offsets must contain at least [0, n]")
        if offsets[0] != 0 or offsets[-1] != len(times_ps):
            raise ValueError("offsets must start at 0 and end at len(times_ps)")
        if np.any(np.diff(offsets) < 0):
            raise ValueError("offsets must be non-decreasing")
        # strictly increasing within each shot: allow equality only across
        # shot boundaries
        if len(times_ps) > 1:
            same_shot = np.ones(len(times_ps) - 1, dtype=bool)
            boundaries = offsets[1:-1]
            boundaries = boundaries[(boundaries > 0) & (boundaries < len(times_ps))]
            same_shot[boundaries - 1] = False
            diffs = np.diff(times_ps.astype(np.int64))
            if np.any(diffs[same_shot] <= 0):
                raise ValueError("timestamps must be strictly increasing within each shot")
        self.times_ps = times_ps
        self.offsets = offsets
        self.num_shots = len(offsets) - 1

    @classmethod
    def from_shots(cls, shots: Sequence[Sequence[int]]) -> "ShotTimestamps":
        """Build from a list of per-shot timestamp (ps) sequences."""
        counts = np.array([len(s) for s in shots], dtype=np.int64)
        offsets = np.concatenate(([0], np.cumsum(counts)))
        if len(shots):
            flat = np.concatenate([np.asarray(s, dtype=np.uint64) for s in shots]) \
                if offsets[-1] else np.empty(0, dtype=np.uint64)
        else:
            flat = np.empty(0, dtype=np.uint64)
        return cls(flat, offsets)

    def shot(self, i: int) -> np.ndarray:
        return self.times_ps[self.offsets[i]:self.offsets[i + 1]]

    def __iter__(self) -> Iterator[np.ndarray]:
        for i in range(self.num_shots):
            yield self.shot(i)

    def __len__(self) -> int:
        return self.num_shots

    @property
    def total_detections(self) -> int:
        return int(self.offsets[-1])

    def counts_per_shot(self) -> np.ndarray:
        return np.diff(self.offsets)

    def shot_indices(self) -> np.ndarray:
        """Shot index for every detection in the flat timestamp array."""
        return np.repeat(np.arange(self.num_shots, dtype=np.int64), self.counts_per_shot())

    def select(self, indices: np.ndarray) -> "ShotTimestamps":
        """New ShotTimestamps containing the given shots, reindexed from 0."""
        indices = np.asarray(indices, dtype=np.int64)
        counts = self.counts_per_shot()[indices]
        new_offsets = np.concatenate(([0], np.cumsum(counts)))
        pieces = [self.shot(i) for i in indices]
        flat = np.concatenate(pieces) if pieces else np.empty(0, dtype=np.uint64)
        return ShotTimestamps(flat, new_offsets)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ShotTimestamps):
            return NotImplemented
        return (
            np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.times_ps, other.times_ps)
        )


@dataclass(frozen=True)
class FluxCurve:
    """Discretized arrival rate on the bin grid.

    rates[m] is the (zero-order-hold) arrival rate in photons/second over
    bin m; cumulative[m] is the expected pre-detector count up to edge m,
    so cumulative[m+1] - cumulative[m] = rates[m] * bin_width.
    """

    rates: np.ndarray
    cumulative: np.ndarray
    bin_width: float

    def __post_init__(self):
        rates = _as_frozen(np.asarray(self.rates, dtype=np.float64))
        cumulative = _as_frozen(np.asarray(self.cumulative, dtype=np.float64))
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "cumulative", cumulative)
        if rates.ndim != 1 or cumulative.ndim != 1:
            raise ValueError("rates and cumulative must be 1-D")
        if len(cumulative) != len(rates) + 1:
            raise ValueError("cumulative must have length len(rates) + 1")
        if np.any(rates < 0):
            raise ValueError("rates must be non-negative")
        if cumulative[0] != 0.0:
            raise ValueError("cumulative[0] must be 0")
        expected = rates * self.bin_width
        if not np.allclose(np.diff(cumulative), expected, rtol=1e-9, atol=1e-12):
            raise ValueError("cumulative increments inconsistent with rates * bin_width")

    @classmethod
    def from_rates(cls, rates: np.ndarray, bin_width: float) -> "FluxCurve":
        rates = np.asarray(rates, dtype=np.float64)
        cumulative = np.concatenate(([0.0], np.cumsum(rates * bin_width)))
        return cls(rates=rates, cumulative=cumulative, bin_width=bin_width)

    @property
    def num_bins(self) -> int:
        return len(self.rates)

    @property
    def expected_counts(self) -> float:
        """Expected pre-detector arrivals per shot over the whole window."""
        return float(self.cumulative[-1])

    def scaled(self, factor: float) -> "FluxCurve":
        return FluxCurve.from_rates(self.rates * factor, self.bin_width)


@dataclass(frozen=True)
class CountHistogram:
    """Accumulated detection counts Y_m, optionally with per-shot counts."""

    counts: np.ndarray
    per_shot: Optional[np.ndarray] = None

    def __post_init__(self):
        counts = _as_frozen(np.asarray(self.counts, dtype=np.int64))
        object.__setattr__(self, "counts", counts)
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        if self.per_shot is not None:
            per_shot = _as_frozen(np.asarray(self.per_shot, dtype=np.int64))
            object.__setattr__(self, "per_shot", per_shot)
            if per_shot.ndim != 2 or per_shot.shape[1] != len(counts):
                raise ValueError("per_shot must be (num_shots, num_bins)")
            if not np.array_equal(per_shot.sum(axis=0), counts):
                raise ValueError("per-shot counts do not sum to the accumulated counts")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ActiveFractionHistogram:
    """Mean detector-active fraction per bin, Z_m in [0, 1]."""

    fractions: np.ndarray

    def __post_init__(self):
        fractions = _as_frozen(np.asarray(self.fractions, dtype=np.float64))
        object.__setattr__(self, "fractions", fractions)
        if np.any(fractions < 0) or np.any(fractions > 1):
            raise ValueError("fractions must lie in [0, 1]")


def require_length(vector, config: DetectorConfig, name: str) -> np.ndarray:
    vector = np.asarray(vector)
    if vector.shape[-1] != config.num_bins:
        raise ValueError(f"{name} has length {vector.shape[-1]}, expected {config.num_bins}")
    return vector


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def save_timestamps_csv(path, data: ShotTimestamps) -> None:
    """Write `shot_index,timestamp_ps` rows; empty shots leave no rows."""
    shot_idx = data.shot_indices()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["shot_index", "timestamp_ps"])
        for s, t in zip(shot_idx, data.times_ps):
            writer.writerow([int(s), int(t)])


def load_timestamps_csv(path, num_shots: int) -> ShotTimestamps:
    """Read a `shot_index,timestamp_ps` CSV back into ShotTimestamps.

    num_shots must come from the accompanying config because shots without
    detections leave no rows in the file.
    """
    shot_idx = []
    times = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["shot_index", "timestamp_ps"]:
            raise ValueError(f"unexpected timestamp CSV header: {header}")
        for row in reader:
            shot_idx.append(int(row[0]))
            times.append(int(row[1]))
    shot_idx = np.asarray(shot_idx, dtype=np.int64)
    times = np.asarray(times, dtype=np.uint64)
    if len(shot_idx) and (shot_idx.min() < 0 or shot_idx.max() >= num_shots):
        raise ValueError("shot_index out of range for num_shots")
    counts = np.bincount(shot_idx, minlength=num_shots) if len(shot_idx) else np.zeros(num_shots, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    order = np.argsort(shot_idx, kind="stable")
    return ShotTimestamps(times[order], offsets)


def timestamps_to_json(data: ShotTimestamps) -> dict:
    return {
        "shot_index": data.shot_indices().tolist(),
        "timestamp_ps": data.times_ps.astype(np.int64).tolist(),
    }


def save_histogram_csv(path, values, config: DetectorConfig, digits: Optional[int] = None) -> None:
    """Write `bin_index,left_edge_ps,value` rows for a length-M vector."""
    values = require_length(values, config, "histogram")
    edges = bin_edges_ps(config)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_index", "left_edge_ps", "value"])
        for m, v in enumerate(values):
            if digits is not None:
                writer.writerow([m, int(edges[m]), f"{v:.{digits}f}"])
            else:
                writer.writerow([m, int(edges[m]), int(v) if float(v).is_integer() else v])


def histogram_to_json(values, config: DetectorConfig) -> dict:
    values = require_length(values, config, "histogram")
    edges = bin_edges_ps(config)
    return {
        "bin_index": list(range(config.num_bins)),
        "left_edge_ps": edges[:-1].tolist(),
        "value": np.asarray(values).tolist(),
    }


def load_histogram_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["bin_index", "left_edge_ps", "value"]:
            raise ValueError(f"unexpected histogram CSV header: {header}")
        rows = [(int(r[0]), float(r[2])) for r in reader]
    rows.sort()
    return np.array([v for _, v in rows], dtype=np.float64)


def dump_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
