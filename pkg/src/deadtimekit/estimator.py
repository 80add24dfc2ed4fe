"""Maximum-likelihood flux estimation with exponential-Chebyshev and spline bases.

The flux forward model is lambda(t) = exp(basis(t) @ v) + b with b >= 0.
Fitting minimizes the deadtime or Poisson negative log-likelihood over the
basis coefficients and a softplus-parameterized background with L-BFGS and
analytic gradients.  Model complexity (polynomial order or spline knot
configuration) is chosen by holdout cross-validation on alternating laser
shots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.interpolate import make_interp_spline
from scipy.optimize import minimize as _scipy_minimize

from .core import DetectorConfig, FluxCurve, ShotTimestamps, bin_edges
from .histograms import build_active_histogram, build_count_histogram

LOG_RATE_LIMIT = 700.0   # exp() overflow guard
RATE_FLOOR = 1e-300      # keeps log(lambda) finite while b -> 0

# Removing one knot shifts the validation loss by ~chi2(1)/2 (about half a
# nat) from noise alone even when the knot carries no signal, so increases
# below this are treated as ties and resolved toward the smaller model.
KNOT_MERGE_TOLERANCE = 1.0


class FluxOverflowError(FloatingPointError):
    """Forward model log-rate exceeds the exp() overflow limit."""


class FitError(RuntimeError):
    """All fit candidates failed."""


@dataclass(frozen=True)
class OptimizerSettings:
    relative_tolerance: float = 1e-9
    max_iterations: int = 10_000


@dataclass(frozen=True)
class ChebyshevModel:
    """exp(sum_j c_j T_j(u)) + b on the window mapped affinely onto [-1, 1]."""

    order: int
    coefficients: np.ndarray
    background: float

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        object.__setattr__(self, "coefficients", coeffs)
        if self.order < 0:
            raise ValueError("order must be >= 0")
        if len(coeffs) != self.order + 1:
            raise ValueError("need exactly order + 1 coefficients")
        if self.background < 0:
            raise ValueError("background must be >= 0")

    def to_json(self) -> dict:
        return {
            "basis": "chebyshev",
            "order": self.order,
            "coefficients": self.coefficients.tolist(),
            "background": self.background,
        }


@dataclass(frozen=True)
class SplineModel:
    """exp(cubic log-flux interpolant over knots) + b."""

    knot_positions: np.ndarray   # seconds, strictly increasing, covering the window
    control_values: np.ndarray   # log-domain values at the knots
    background: float

    def __post_init__(self):
        knots = np.asarray(self.knot_positions, dtype=np.float64)
        values = np.asarray(self.control_values, dtype=np.float64)
        object.__setattr__(self, "knot_positions", knots)
        object.__setattr__(self, "control_values", values)
        if len(knots) < 2:
            raise ValueError("need at least 2 knots")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if len(values) != len(knots):
            raise ValueError("one control value per knot")
        if self.background < 0:
            raise ValueError("background must be >= 0")

    def to_json(self) -> dict:
        return {
            "basis": "spline",
            "knot_positions": self.knot_positions.tolist(),
            "control_values": self.control_values.tolist(),
            "background": self.background,
        }


def model_from_json(obj: dict):
    if obj["basis"] == "chebyshev":
        return ChebyshevModel(
            order=int(obj["order"]),
            coefficients=np.asarray(obj["coefficients"]),
            background=float(obj["background"]),
        )
    if obj["basis"] == "spline":
        return SplineModel(
            knot_positions=np.asarray(obj["knot_positions"]),
            control_values=np.asarray(obj["control_values"]),
            background=float(obj["background"]),
        )
    raise ValueError(f"unknown basis {obj['basis']!r}")


@dataclass(frozen=True)
class FitResult:
    model: object
    fit_loss: float
    validation_loss: float
    selected: object            # chosen polynomial order or knot positions
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        selected = self.selected
        if isinstance(selected, np.ndarray):
            selected = selected.tolist()
        return {
            "model": self.model.to_json(),
            "fit_loss": self.fit_loss,
            "validation_loss": self.validation_loss,
            "selected": selected,
            "diagnostics": {
                k: v for k, v in self.diagnostics.items() if not isinstance(v, np.ndarray)
            },
        }


# ---------------------------------------------------------------------------
# Bases
# ---------------------------------------------------------------------------

def chebyshev_eval(order: int, u: float) -> np.ndarray:
    """Values of T_0..T_order at u in [-1, 1] via the standard recurrence."""
    if order < 0:
        raise ValueError("order must be >= 0")
    if abs(u) > 1.0:
        raise ValueError(f"u must lie in [-1, 1], got {u}")
    return cheb.chebvander(u, order).ravel()


def normalized_bin_times(config: DetectorConfig) -> np.ndarray:
    """Bin left edges mapped affinely from the window onto [-1, 1]."""
    edges = bin_edges(config)
    span = edges[-1] - edges[0]
    return -1.0 + 2.0 * (edges[:-1] - edges[0]) / span


def chebyshev_design(order: int, config: DetectorConfig) -> np.ndarray:
    return cheb.chebvander(normalized_bin_times(config), order)


def spline_design(knots: np.ndarray, config: DetectorConfig) -> np.ndarray:
    """Linear map from log-domain knot values to log-rate at bin left edges."""
    knots = np.asarray(knots, dtype=np.float64)
    k = min(3, len(knots) - 1)
    bc = "natural" if k == 3 else None
    spline = make_interp_spline(knots, np.eye(len(knots)), k=k, axis=0, bc_type=bc)
    t = bin_edges(config)[:-1]
    return spline(t)


def _design_for(model, config: DetectorConfig) -> np.ndarray:
    if isinstance(model, ChebyshevModel):
        return chebyshev_design(model.order, config)
    if isinstance(model, SplineModel):
        return spline_design(model.knot_positions, config)
    raise TypeError(f"unsupported model type {type(model)!r}")


def _coefficients_of(model) -> np.ndarray:
    return model.coefficients if isinstance(model, ChebyshevModel) else model.control_values


def forward_flux(model, config: DetectorConfig) -> FluxCurve:
    """Evaluate the model's flux on the bin grid; strictly positive."""
    design = _design_for(model, config)
    log_rate = design @ _coefficients_of(model)
    if np.any(log_rate > LOG_RATE_LIMIT):
        worst = float(np.max(log_rate))
        raise FluxOverflowError(
            f"log-rate {worst:.1f} exceeds exp() overflow limit {LOG_RATE_LIMIT}"
        )
    rates = np.exp(log_rate) + model.background
    return FluxCurve.from_rates(rates, config.bin_width)


# ---------------------------------------------------------------------------
# Data splitting
# ---------------------------------------------------------------------------

def thin_alternating(data: ShotTimestamps):
    """Split alternating shots into disjoint fit (even) and validation (odd) sets."""
    if data.num_shots < 2:
        raise ValueError("need at least 2 shots to thin into fit and validation sets")
    even = np.arange(0, data.num_shots, 2)
    odd = np.arange(1, data.num_shots, 2)
    return data.select(even), data.select(odd)


# ---------------------------------------------------------------------------
# Core histogram-space fitting
# ---------------------------------------------------------------------------

def _softplus(x: float) -> float:
    return math.log1p(math.exp(-abs(x))) + max(x, 0.0)

def _inv_softplus(y: float) -> float:
    # y > 0; stable for both small and large y
    return y + math.log(-math.expm1(-y)) if y > 1e-10 else math.log(math.expm1(max(y, 1e-300)))


def _histogram_loss(rates, counts, active, num_shots, bin_width):
    scale = num_shots * bin_width
    observed = counts > 0
    value = np.sum(scale * rates * active)
    value -= np.sum(counts[observed] * np.log(rates[observed]))
    grad = scale * active - np.divide(counts, rates, out=np.zeros_like(rates), where=observed)
    return float(value), grad


def fit_histogram_model(
    loss: str,
    design: np.ndarray,
    counts: np.ndarray,
    active: np.ndarray,
    num_shots: int,
    config: DetectorConfig,
    settings: OptimizerSettings = OptimizerSettings(),
    initial: Optional[np.ndarray] = None,
):
    """Fit (coefficients, background) to one histogram triple by L-BFGS.

    loss: "deadtime" uses the supplied active fractions, "poisson" forces
    them to 1.  counts may be non-integer (e.g. corrected pseudo-counts).
    Returns (coefficients, background, loss_value, diagnostics).
    """
    if loss not in ("deadtime", "poisson"):
        raise ValueError(f"unknown loss {loss!r}")
    counts = np.asarray(counts, dtype=np.float64)
    if loss == "poisson":
        active = np.ones(config.num_bins)
    active = np.asarray(active, dtype=np.float64)

    total = counts.sum()
    mean_rate = max(total / (num_shots * config.num_bins * config.bin_width), 1e-3)
    k = design.shape[1]
    if initial is None:
        x0 = np.zeros(k + 1)
        if np.allclose(design[:, 0], 1.0):
            x0[0] = math.log(mean_rate)   # Chebyshev: T_0 carries the constant
        else:
            x0[:k] = math.log(mean_rate)  # spline: constant log-rate needs every knot set
        x0[k] = _inv_softplus(max(1e-3 * mean_rate, 1e-12))
    else:
        x0 = np.asarray(initial, dtype=np.float64).copy()

    def objective(x):
        v = x[:k]
        b = _softplus(x[k])
        log_rate = np.minimum(design @ v, LOG_RATE_LIMIT)
        expart = np.exp(log_rate)
        rates = expart + b + RATE_FLOOR
        value, g_rate = _histogram_loss(rates, counts, active, num_shots, config.bin_width)
        grad = np.empty_like(x)
        grad[:k] = design.T @ (g_rate * expart)
        grad[k] = g_rate.sum() / (1.0 + math.exp(-x[k]))
        return value, grad

    res = _scipy_minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={
            "maxiter": settings.max_iterations,
            "ftol": settings.relative_tolerance,
            "gtol": 1e-12,
        },
    )
    coeffs = res.x[:k]
    background = _softplus(res.x[k])
    diagnostics = {
        "iterations": int(res.nit),
        "converged": bool(res.success),
        "message": str(res.message),
    }
    return coeffs, background, float(res.fun), diagnostics


def _histogram_triplet(data: ShotTimestamps, config: DetectorConfig, loss: str):
    """(counts, active fractions, shot count) for the given shots."""
    cfg = config.with_shots(data.num_shots)
    y = build_count_histogram(data, cfg)
    if loss == "deadtime":
        z = build_active_histogram(data, cfg).fractions
    else:
        z = np.ones(config.num_bins)
    return y.counts.astype(np.float64), z, data.num_shots


def _build_model(template, coeffs, background):
    if isinstance(template, ChebyshevModel):
        return ChebyshevModel(order=template.order, coefficients=coeffs, background=background)
    return SplineModel(
        knot_positions=template.knot_positions, control_values=coeffs, background=background
    )


def minimize(
    loss: str,
    template,
    fit_data: ShotTimestamps,
    config: DetectorConfig,
    settings: OptimizerSettings = OptimizerSettings(),
):
    """Fit the template's basis to the fit data under the selected loss.

    Returns (model, fit_loss, diagnostics); non-convergence is flagged in
    diagnostics["converged"], never silent.
    """
    if fit_data.num_shots < 1 or fit_data.total_detections == 0:
        raise ValueError("fit data must contain at least one detection")
    counts, active, n = _histogram_triplet(fit_data, config, loss)
    design = _design_for(template, config)
    coeffs, background, value, diagnostics = fit_histogram_model(
        loss, design, counts, active, n, config, settings
    )
    return _build_model(template, coeffs, background), value, diagnostics


def cross_validate(
    data: ShotTimestamps,
    config: DetectorConfig,
    loss: str,
    orders: Sequence[int],
    settings: OptimizerSettings = OptimizerSettings(),
) -> FitResult:
    """Holdout cross-validation over Chebyshev polynomial orders.

    Fits every candidate order on the even shots, scores it on the odd
    shots with the same loss family, and returns the minimum-validation-
    loss model; ties break toward smaller order.
    """
    orders = sorted(set(int(j) for j in orders))
    if not orders:
        raise ValueError("need at least one candidate order")
    fit_set, val_set = thin_alternating(data)
    counts_f, active_f, n_f = _histogram_triplet(fit_set, config, loss)
    counts_v, active_v, n_v = _histogram_triplet(val_set, config, loss)

    max_design = chebyshev_design(max(orders), config)
    candidates = []
    failures = []
    for j in orders:
        design = max_design[:, : j + 1]
        try:
            coeffs, background, fit_loss, diag = fit_histogram_model(
                loss, design, counts_f, active_f, n_f, config, settings
            )
            model = ChebyshevModel(order=j, coefficients=coeffs, background=background)
            rates = forward_flux(model, config).rates + RATE_FLOOR
            val_loss, _ = _histogram_loss(rates, counts_v, active_v, n_v, config.bin_width)
            candidates.append((val_loss, j, model, fit_loss, diag))
        except (FluxOverflowError, ValueError) as exc:
            failures.append((j, exc))
    if not candidates:
        raise FitError(f"all candidate orders failed: {failures}")
    val_loss, j, model, fit_loss, diag = min(candidates, key=lambda c: (c[0], c[1]))
    diagnostics = dict(diag)
    diagnostics["candidate_validation_losses"] = {c[1]: c[0] for c in candidates}
    if failures:
        diagnostics["failed_orders"] = [j for j, _ in failures]
    return FitResult(
        model=model,
        fit_loss=fit_loss,
        validation_loss=val_loss,
        selected=j,
        diagnostics=diagnostics,
    )


# ---------------------------------------------------------------------------
# Dyadic spline knot trimming
# ---------------------------------------------------------------------------

def _dyadic_knots(config: DetectorConfig, ticks: np.ndarray, depth: int) -> np.ndarray:
    edges = bin_edges(config)
    span = edges[-1] - edges[0]
    return edges[0] + span * ticks / float(1 << depth)


def _mergeable(ticks: np.ndarray, i: int) -> bool:
    """Whether interior breakpoint ticks[i] can be removed, keeping a dyadic grid."""
    left, mid, right = ticks[i - 1], ticks[i], ticks[i + 1]
    length = right - left
    return (
        mid - left == right - mid
        and (length & (length - 1)) == 0
        and left % length == 0
    )


def trim_spline_knots(
    data: ShotTimestamps,
    config: DetectorConfig,
    loss: str,
    max_depth: int,
    settings: OptimizerSettings = OptimizerSettings(),
) -> FitResult:
    """Spline fit with dyadic knot-tree trimming by holdout cross-validation.

    Starts from the densest dyadic grid at max_depth and greedily merges
    sibling dyadic intervals whenever the merge does not increase the
    validation loss.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    span_ps = config.num_bins * config.bin_width_ps
    if max_depth > 0 and span_ps % (1 << max_depth) != 0:
        raise ValueError("window length must be a power-of-two multiple of the knot spacing")
    fit_set, val_set = thin_alternating(data)
    counts_f, active_f, n_f = _histogram_triplet(fit_set, config, loss)
    counts_v, active_v, n_v = _histogram_triplet(val_set, config, loss)
    return _trim_on_histograms(
        counts_f, active_f, n_f, counts_v, active_v, n_v, config, loss, max_depth, settings
    )


def _trim_on_histograms(
    counts_f, active_f, n_f, counts_v, active_v, n_v,
    config: DetectorConfig, loss: str, max_depth: int,
    settings: OptimizerSettings = OptimizerSettings(),
) -> FitResult:
    """Dyadic trimming driven directly by fit/validation histogram triples."""

    def fit_ticks(ticks):
        knots = _dyadic_knots(config, ticks, max_depth)
        design = spline_design(knots, config)
        coeffs, background, fit_loss, diag = fit_histogram_model(
            loss, design, counts_f, active_f, n_f, config, settings
        )
        model = SplineModel(knot_positions=knots, control_values=coeffs, background=background)
        rates = forward_flux(model, config).rates + RATE_FLOOR
        val_loss, _ = _histogram_loss(rates, counts_v, active_v, n_v, config.bin_width)
        return model, fit_loss, val_loss, diag

    ticks = np.arange((1 << max_depth) + 1, dtype=np.int64)
    model, fit_loss, val_loss, diag = fit_ticks(ticks)
    merged = True
    n_fits = 1
    while merged and len(ticks) > 2:
        merged = False
        i = 1
        while i < len(ticks) - 1:
            if _mergeable(ticks, i):
                trial = np.delete(ticks, i)
                try:
                    t_model, t_fit, t_val, t_diag = fit_ticks(trial)
                except (FluxOverflowError, ValueError):
                    i += 1
                    continue
                n_fits += 1
                if t_val <= val_loss + KNOT_MERGE_TOLERANCE:
                    ticks = trial
                    model, fit_loss, val_loss, diag = t_model, t_fit, t_val, t_diag
                    merged = True
                    continue    # same position now points at the next breakpoint
            i += 1
    diagnostics = dict(diag)
    diagnostics["n_candidate_fits"] = n_fits
    diagnostics["n_intervals"] = len(ticks) - 1
    return FitResult(
        model=model,
        fit_loss=fit_loss,
        validation_loss=val_loss,
        selected=model.knot_positions,
        diagnostics=diagnostics,
    )
