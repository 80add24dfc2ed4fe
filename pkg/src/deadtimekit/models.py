"""Negative log-likelihood loss functions and the Muller correction.

Loss sums run through numpy's pairwise summation, which keeps the error
growth logarithmic in the bin count; comparisons between fits rest on
small differences between large sums.
"""

from __future__ import annotations

import numpy as np

from .core import ActiveFractionHistogram, CountHistogram, DetectorConfig, FluxCurve, require_length


class NonPhysicalEstimateError(ValueError):
    """Muller correction evaluated at or beyond its pole (R * tau >= 1)."""

    def __init__(self, rate, tau):
        self.rate = rate
        self.tau = tau
        super().__init__(
            f"non-physical Muller estimate: measured rate {rate} 1/s with "
            f"tau {tau} s gives R*tau >= 1"
        )


def _loss_terms(rates, counts, active, num_shots, bin_width):
    rates = np.asarray(rates, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    active = np.asarray(active, dtype=np.float64)
    observed = counts > 0
    if np.any(rates[observed] <= 0):
        raise ValueError("rate must be positive in every bin with observed counts")
    scale = num_shots * bin_width
    value = np.sum(scale * rates * active)
    if np.any(observed):
        value -= np.sum(counts[observed] * np.log(rates[observed]))
    grad = scale * active - np.divide(
        counts, rates, out=np.zeros_like(counts), where=observed
    )
    return float(value), grad


def deadtime_loss(
    flux: FluxCurve,
    y: CountHistogram,
    z: ActiveFractionHistogram,
    config: DetectorConfig,
):
    """Deadtime negative log-likelihood and its gradient w.r.t. the per-bin rates.

    L = sum_m (N * lambda_m * Z_m * dt - Y_m * ln lambda_m); bins with
    Y_m = 0 and Z_m = 0 contribute nothing (detector never active there,
    nothing observed).
    """
    rates = require_length(flux.rates, config, "flux")
    counts = require_length(y.counts, config, "counts")
    active = require_length(z.fractions, config, "active fractions")
    return _loss_terms(rates, counts, active, config.num_shots, config.bin_width)


def poisson_loss(flux: FluxCurve, y: CountHistogram, config: DetectorConfig):
    """Poisson negative log-likelihood and gradient (deadtime loss with Z = 1)."""
    rates = require_length(flux.rates, config, "flux")
    counts = require_length(y.counts, config, "counts")
    return _loss_terms(rates, counts, np.ones_like(rates), config.num_shots, config.bin_width)


def muller_correct(rate, tau: float):
    """Closed-form deadtime correction lambda = R / (1 - R * tau).

    Valid only when R * tau < 1; raises NonPhysicalEstimateError carrying
    the offending rate otherwise.  Accepts a scalar or an array of rates.
    """
    rate_arr = np.asarray(rate, dtype=np.float64)
    if np.any(rate_arr < 0):
        raise ValueError("measured rate must be >= 0")
    occupancy = rate_arr * tau
    if np.any(occupancy >= 1.0):
        bad = rate_arr[occupancy >= 1.0] if rate_arr.ndim else rate_arr
        offending = float(np.atleast_1d(bad)[0])
        raise NonPhysicalEstimateError(offending, tau)
    corrected = rate_arr / (1.0 - occupancy)
    return corrected if rate_arr.ndim else float(corrected)


def muller_equivalence_check(y: CountHistogram, config: DetectorConfig) -> np.ndarray:
    """Per-bin analytic minimizer of the deadtime loss under the coarse-bin Z.

    Substituting Z_m = 1 - Y_m * tau / (N * dt) and minimizing the deadtime
    loss bin by bin gives lambda_m = Y_m / (N * Z_m * dt), which must agree
    with the Muller correction of R_m = Y_m / (N * dt) exactly.
    """
    counts = require_length(y.counts, config, "counts").astype(np.float64)
    scale = config.num_shots * config.bin_width
    coarse_z = 1.0 - counts * config.tau / scale
    bad = (counts > 0) & (coarse_z <= 0.0)
    if np.any(bad):
        offending = float((counts[bad] / scale)[0])
        raise NonPhysicalEstimateError(offending, config.tau)
    out = np.zeros_like(counts)
    observed = counts > 0
    out[observed] = counts[observed] / (scale * coarse_z[observed])
    return out
