"""Benchmark the compiled histogram kernels against the pure-Python fallback.

Runs the deadtime filter and per-bin dead-time accumulation on an identical
simulated workload with both backends, verifies the outputs are bit-identical,
and reports wall-clock timings.  Run with `python -m deadtimekit.benchmark`.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ._kernels import _pykernels
from .scenarios import narrow_pulse_config, narrow_pulse_flux
from .simulator import CHUNK_SHOTS, _chunk_rng, _sample_chunk

try:
    from ._kernels import _cykernels
except ImportError:
    _cykernels = None


def _workload(num_shots: int, peak_rate: float, seed: int):
    """Pre-detector arrival stream for a saturating narrow-pulse scenario."""
    config = narrow_pulse_config(num_shots)
    flux = narrow_pulse_flux(peak_rate, config)
    chunks = []
    offsets = [np.zeros(1, dtype=np.int64)]
    shot0 = 0
    chunk = 0
    base = 0
    while shot0 < num_shots:
        n = min(CHUNK_SHOTS, num_shots - shot0)
        times_ps, offs = _sample_chunk(flux, config, _chunk_rng(seed, chunk), n)
        chunks.append(times_ps)
        offsets.append(offs[1:] + base)
        base += offs[-1]
        shot0 += n
        chunk += 1
    return config, np.concatenate(chunks), np.concatenate(offsets)


def _time(fn, repeats: int):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return result, best


def run_benchmark(num_shots: int = 100_000, peak_rate: float = 1e9,
                  seed: int = 7, repeats: int = 3):
    """Time both backends on one workload; returns a list of result rows.

    Raises RuntimeError if the compiled backend is unavailable or if the
    two backends disagree on any output value.
    """
    if _cykernels is None:
        raise RuntimeError("compiled kernel backend is not available")
    config, times_ps, offsets = _workload(num_shots, peak_rate, seed)
    tau_ps = config.tau_ps

    rows = []
    kernels = [
        (
            "deadtime_filter",
            lambda mod: mod.deadtime_filter(times_ps, offsets, tau_ps),
        ),
        (
            "dead_time_per_bin",
            lambda mod: mod.dead_time_per_bin(
                times_ps.astype(np.int64), offsets, tau_ps,
                config.bin_width_ps, config.num_bins, config.window_start_ps,
            ),
        ),
    ]
    for name, call in kernels:
        py_out, py_time = _time(lambda: call(_pykernels), repeats)
        cy_out, cy_time = _time(lambda: call(_cykernels), repeats)
        if not np.array_equal(py_out, cy_out):
            raise RuntimeError(f"backend outputs differ for {name}")
        rows.append(
            {
                "kernel": name,
                "arrivals": int(len(times_ps)),
                "python_seconds": py_time,
                "cython_seconds": cy_time,
                "speedup": py_time / cy_time,
                "identical": True,
            }
        )
    return rows


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--shots", type=int, default=100_000)
    parser.add_argument("--peak-rate", type=float, default=1e9)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)
    rows = run_benchmark(args.shots, args.peak_rate, args.seed, args.repeats)
    width = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{width}}  {'arrivals':>10}  {'python':>10}  {'cython':>10}  {'speedup':>8}")
    for r in rows:
        print(
            f"{r['kernel']:<{width}}  {r['arrivals']:>10d}  "
            f"{r['python_seconds']:>9.4f}s  {r['cython_seconds']:>9.4f}s  "
            f"{r['speedup']:>7.1f}x"
        )
    print("outputs bit-identical across backends")


if __name__ == "__main__":
    main()
