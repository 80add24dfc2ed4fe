import os
import subprocess
import sys

import numpy as np
import pytest

from deadtimekit._kernels import BACKEND, _pykernels

cykernels = pytest.importorskip("deadtimekit._kernels._cykernels")


def random_instance(rng, num_shots, max_per_shot, window_ps):
    shots = []
    for _ in range(num_shots):
        n = int(rng.integers(0, max_per_shot + 1))
        t = np.sort(rng.choice(window_ps, size=n, replace=False)) if n else np.empty(0, int)
        shots.append(t.astype(np.uint64))
    counts = np.array([len(s) for s in shots], dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(counts)))
    flat = np.concatenate(shots) if len(shots) else np.empty(0, dtype=np.uint64)
    return flat, offsets


@pytest.mark.parametrize("tau_ps", [0, 1, 7, 100, 100_000])
def test_deadtime_filter_backends_identical(rng, tau_ps):
    for _ in range(20):
        flat, offsets = random_instance(rng, num_shots=13, max_per_shot=30, window_ps=5000)
        py = _pykernels.deadtime_filter(flat, offsets, tau_ps)
        cy = cykernels.deadtime_filter(flat, offsets, tau_ps)
        np.testing.assert_array_equal(py, cy)


@pytest.mark.parametrize("tau_ps", [0, 1, 7, 100, 100_000])
def test_dead_time_per_bin_backends_identical(rng, tau_ps):
    num_bins, bin_ps = 25, 200
    for _ in range(20):
        flat, offsets = random_instance(rng, num_shots=13, max_per_shot=30,
                                        window_ps=num_bins * bin_ps)
        args = (flat.astype(np.int64), offsets, tau_ps, bin_ps, num_bins, 0)
        np.testing.assert_array_equal(
            _pykernels.dead_time_per_bin(*args), cykernels.dead_time_per_bin(*args)
        )


def test_backend_is_reported():
    assert BACKEND in ("python", "cython")


def test_backend_env_override():
    code = "import deadtimekit; print(deadtimekit.BACKEND)"
    env = dict(os.environ, DEADTIMEKIT_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_filter_keeps_first_and_enforces_gap(rng):
    flat, offsets = random_instance(rng, num_shots=11, max_per_shot=40, window_ps=3000)
    tau = 150
    keep = _pykernels.deadtime_filter(flat, offsets, tau).astype(bool)
    for i in range(len(offsets) - 1):
        lo, hi = offsets[i], offsets[i + 1]
        if hi == lo:
            continue
        assert keep[lo]  # first arrival always detected
        kept = flat[lo:hi][keep[lo:hi]].astype(np.int64)
        assert np.all(np.diff(kept) >= tau)


def test_dead_time_totals_match_truncated_tau(rng):
    """Summed dead ps equals min(tau, window_end - t) per kept detection."""
    num_bins, bin_ps, tau = 16, 250, 900
    window_end = num_bins * bin_ps
    flat, offsets = random_instance(rng, num_shots=9, max_per_shot=12, window_ps=window_end)
    keep = _pykernels.deadtime_filter(flat, offsets, tau).astype(bool)
    kept_flat = flat[keep]
    counts = np.array([int(keep[offsets[i]:offsets[i + 1]].sum())
                       for i in range(len(offsets) - 1)], dtype=np.int64)
    kept_offsets = np.concatenate(([0], np.cumsum(counts)))
    dead = _pykernels.dead_time_per_bin(
        kept_flat.astype(np.int64), kept_offsets, tau, bin_ps, num_bins, 0
    )
    expected = np.minimum(tau, window_end - kept_flat.astype(np.int64)).sum()
    assert dead.sum() == expected
