"""Nonhomogeneous Poisson photon-stream simulation through a non-paralyzable detector.

Arrival times are sampled by exact inversion of the piecewise-linear
cumulative intensity (the rate is a zero-order hold, so the inversion is
exact): per shot, the arrival count is Poisson with mean the total
cumulative intensity and, conditioned on the count, sorted arrival
positions are uniform in cumulative-intensity space.  Sorted uniforms are
generated directly from exponential spacings, so no sort is needed.

Reproducibility: shots are processed in fixed-size chunks and chunk k
consumes the counter-based stream Philox(key=seed, counter=k << 128).
Chunks are therefore independent of execution order and a given shot
index yields the same photons regardless of the total shot count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    ConfigError,
    DetectorConfig,
    FluxCurve,
    ShotTimestamps,
    bin_edges,
    bin_edges_ps,
)

# Fixed chunk size; part of the random-stream definition, do not change.
CHUNK_SHOTS = 4096


@dataclass(frozen=True)
class GaussianTargetSpec:
    """Gaussian backscatter target plus constant background flux."""

    peak_rate: float          # photons/s at the Gaussian maximum
    center: float             # seconds
    sigma: float              # seconds
    background_rate: float = 0.0   # photons/s

    def __post_init__(self):
        if self.peak_rate < 0:
            raise ConfigError(f"peak_rate must be >= 0, got {self.peak_rate}")
        if self.sigma <= 0:
            raise ConfigError(f"sigma must be > 0, got {self.sigma}")
        if self.background_rate < 0:
            raise ConfigError(f"background_rate must be >= 0, got {self.background_rate}")


FWHM_TO_SIGMA = 1.0 / (2.0 * math.sqrt(2.0 * math.log(2.0)))


@dataclass(frozen=True)
class AttenuationSpec:
    """Receiver-chain attenuation, T_r = 10^(-OD) when built from an ND filter."""

    receiver_transmission: float
    optical_density: float | None = None

    def __post_init__(self):
        if not 0.0 < self.receiver_transmission <= 1.0:
            raise ConfigError(
                f"receiver_transmission must be in (0, 1], got {self.receiver_transmission}"
            )

    @classmethod
    def from_od(cls, od: float) -> "AttenuationSpec":
        if od < 0:
            raise ConfigError(f"optical density must be >= 0, got {od}")
        return cls(receiver_transmission=10.0 ** (-od), optical_density=od)


def gaussian_flux(spec: GaussianTargetSpec, config: DetectorConfig) -> FluxCurve:
    """Gaussian + background rate sampled at the bin left edges."""
    t = bin_edges(config)[:-1]
    rates = spec.peak_rate * np.exp(-((t - spec.center) ** 2) / (2.0 * spec.sigma**2))
    rates += spec.background_rate
    return FluxCurve.from_rates(rates, config.bin_width)


def constant_flux(rate: float, config: DetectorConfig) -> FluxCurve:
    return FluxCurve.from_rates(np.full(config.num_bins, float(rate)), config.bin_width)


def attenuate(flux: FluxCurve, spec: AttenuationSpec) -> FluxCurve:
    """Pointwise scaling of the rate curve by the receiver transmission."""
    return flux.scaled(spec.receiver_transmission)


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=chunk_index << 128))


def _sample_chunk(flux: FluxCurve, config: DetectorConfig, rng, n_shots: int):
    """Sorted pre-detector arrival times (integer ps) for n_shots shots.

    Returns (times_ps uint64 flat, offsets int64).  Uses exponential
    spacings so per-shot arrivals come out already sorted.
    """
    lam_tot = flux.expected_counts
    # counts are drawn for the full chunk even when only a prefix is used,
    # so a shot's position in the random stream never depends on n_shots
    counts = rng.poisson(lam_tot, size=CHUNK_SHOTS)[:n_shots].astype(np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    if lam_tot == 0.0 or offsets[-1] == 0:
        return np.empty(0, dtype=np.uint64), offsets

    spacings_per_shot = counts + 1
    seg_ends = np.cumsum(spacings_per_shot)
    gaps = rng.standard_exponential(int(seg_ends[-1]))
    cs = np.cumsum(gaps)
    base = np.concatenate(([0.0], cs[seg_ends[:-1] - 1]))
    denom = cs[seg_ends - 1] - base

    mask = np.ones(len(gaps), dtype=bool)
    mask[seg_ends - 1] = False
    svals = (cs[mask] - np.repeat(base, counts)) / np.repeat(denom, counts) * lam_tot

    edges = bin_edges_ps(config).astype(np.float64)
    times = np.interp(svals, flux.cumulative, edges)
    times_ps = np.floor(times).astype(np.int64)
    np.clip(times_ps, config.window_start_ps, config.window_end_ps - 1, out=times_ps)
    return times_ps.astype(np.uint64), offsets


def sample_poisson_arrivals(flux: FluxCurve, config: DetectorConfig, rng_seed: int) -> np.ndarray:
    """Raw (pre-detector, no deadtime) arrival times for a single shot, in seconds."""
    rng = _chunk_rng(rng_seed, 0)
    times_ps, _ = _sample_chunk(flux, config, rng, 1)
    return times_ps.astype(np.float64) / 1e12


def apply_deadtime(arrivals: np.ndarray, tau: float) -> np.ndarray:
    """Greedy non-paralyzable deadtime filter on a sorted arrival-time array.

    Keeps the first arrival, then drops every arrival closer than tau to
    the most recently kept one.  Works in the caller's float-second units.
    """
    arrivals = np.asarray(arrivals, dtype=np.float64)
    if np.any(np.diff(arrivals) < 0):
        raise ValueError("arrivals must be sorted ascending")
    if tau <= 0 or len(arrivals) == 0:
        return arrivals.copy()
    kept = []
    j = 0
    n = len(arrivals)
    while j < n:
        kept.append(arrivals[j])
        j = int(np.searchsorted(arrivals, arrivals[j] + tau, side="left"))
    return np.asarray(kept)


def simulate_dataset(flux: FluxCurve, config: DetectorConfig, rng_seed: int) -> ShotTimestamps:
    """num_shots independent deadtime-filtered realizations of the photon stream.

    Deterministic for a fixed seed.  Arrivals are quantized to the 1-ps
    timestamp grid before the deadtime filter; with tau = 0 the filter
    still merges arrivals that land on the same picosecond tick (a real
    timestamper cannot emit two counts in one tick).
    """
    if flux.num_bins != config.num_bins:
        raise ValueError("flux grid does not match config")
    tau_filter = max(config.tau_ps, 1)
    kept_chunks = []
    kept_counts = np.zeros(config.num_shots, dtype=np.int64)
    shot0 = 0
    chunk_index = 0
    while shot0 < config.num_shots:
        n = min(CHUNK_SHOTS, config.num_shots - shot0)
        rng = _chunk_rng(rng_seed, chunk_index)
        times_ps, offsets = _sample_chunk(flux, config, rng, n)
        keep = _kernels.deadtime_filter(times_ps, offsets, tau_filter)
        keep_b = keep.astype(bool)
        kept_chunks.append(times_ps[keep_b])
        # per-shot kept counts from the mask (robust to empty shots)
        ck = np.concatenate(([0], np.cumsum(keep.astype(np.int64))))
        kept_counts[shot0:shot0 + n] = ck[offsets[1:]] - ck[offsets[:-1]]
        shot0 += n
        chunk_index += 1
    flat = np.concatenate(kept_chunks) if kept_chunks else np.empty(0, dtype=np.uint64)
    shot_offsets = np.concatenate(([0], np.cumsum(kept_counts)))
    return ShotTimestamps(flat, shot_offsets)
