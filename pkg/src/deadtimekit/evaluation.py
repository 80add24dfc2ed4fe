"""Validation of fitted flux models against an unbiased low-flux evaluation dataset."""

from __future__ import annotations

import numpy as np

from .core import CountHistogram, DetectorConfig, FluxCurve, ShotTimestamps
from .histograms import build_count_histogram
from .models import poisson_loss


def optimal_scale(fit_flux: FluxCurve, eval_counts: CountHistogram, eval_config: DetectorConfig) -> float:
    """Amplitude factor minimizing the Poisson loss of the scaled fit.

    T_r* = sum(Y_eval) / (num_shots * bin_width * sum(fitted rates)).
    """
    denom = float(np.sum(fit_flux.rates))
    if denom <= 0:
        raise ValueError("fitted flux sums to zero; no scale factor exists")
    total = float(eval_counts.counts.sum())
    return total / (eval_config.num_shots * eval_config.bin_width * denom)


def _as_count_histogram(eval_data, eval_config: DetectorConfig) -> CountHistogram:
    if isinstance(eval_data, CountHistogram):
        return eval_data
    if isinstance(eval_data, ShotTimestamps):
        return build_count_histogram(eval_data, eval_config)
    raise TypeError("evaluation data must be ShotTimestamps or CountHistogram")


def evaluation_loss(fit_flux: FluxCurve, eval_data, eval_config: DetectorConfig) -> float:
    """Poisson loss of the optimally rescaled fit against the evaluation histogram.

    Scale is re-optimized per call, so the score depends only on the shape
    of the fitted flux, not its absolute amplitude.
    """
    counts = _as_count_histogram(eval_data, eval_config)
    factor = optimal_scale(fit_flux, counts, eval_config)
    scaled = fit_flux.scaled(factor)
    value, _ = poisson_loss(scaled, counts, eval_config)
    return value


def rmse(fit_flux: FluxCurve, truth_flux: FluxCurve) -> float:
    """Root-mean-square rate error after optimally scaling the fit to the truth."""
    if fit_flux.num_bins != truth_flux.num_bins or fit_flux.bin_width != truth_flux.bin_width:
        raise ValueError("fitted and truth flux curves are on different grids")
    denom = float(np.sum(fit_flux.rates))
    if denom <= 0:
        raise ValueError("fitted flux sums to zero; no scale factor exists")
    factor = float(np.sum(truth_flux.rates)) / denom
    return float(np.sqrt(np.mean((factor * fit_flux.rates - truth_flux.rates) ** 2)))
