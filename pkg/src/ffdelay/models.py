"""Discrete-time fitness/fatigue state models and the performance combination.

Four state-model variants over a daily grid, all driven by a non-negative
training-load series w with w(0) = 0 and zero initial history:

* classical     -- first-order exponential accumulation of load
* single_delay  -- adds a 1-day-delayed self-term with constant 1/tau_lag1
* three_delay   -- delayed self-terms at lags 1, 2, 3 days
* kernel        -- weighted 3-lag memory with a signed gain tau5

The delayed variants come in two algebraically equivalent forms: a one-step
recursion and an explicit exponentially-weighted history sum ("convolution"
form). Both are exposed; equality is a tested invariant, not an assumption.

Lag time constants use ``math.inf`` as the exact "no lag term" sentinel
(1/inf == 0.0), so reductions between variants are exact rather than
approximate. All functions here are pure and safe to call concurrently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, SeriesLengthError

INF = math.inf

_DEFAULT_KERNEL_WEIGHTS = (0.5, 0.3, 0.2)


def _check_decay(tau: float, name: str) -> None:
    if not (math.isfinite(tau) and tau > 0.0):
        raise ParameterError(f"{name} must be finite and > 0, got {tau!r}")


def _check_lag(tau: float, name: str, allow_negative: bool = False) -> None:
    if tau == INF:
        return
    if math.isnan(tau) or tau == -INF or tau == 0.0:
        raise ParameterError(f"{name} must be nonzero and not NaN (or +inf), got {tau!r}")
    if not allow_negative and tau < 0.0:
        raise ParameterError(f"{name} must be > 0 or +inf, got {tau!r}")


def _lag_rate(tau: float) -> float:
    """The coefficient 1/tau, exactly 0.0 for the +inf sentinel."""
    return 0.0 if tau == INF else 1.0 / tau


@dataclass(frozen=True)
class LoadSeries:
    """Daily training-load impulses w(0..N-1), day 0 first.

    Values are unit-agnostic (TRIMP, kJ, ...; note the unit in ``units`` if
    you care). Construction enforces the modelling assumptions: every value
    finite and non-negative, and w(0) = 0.
    """

    values: tuple[float, ...]
    units: str | None = None

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ParameterError("load series must contain at least one day")
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                raise ParameterError(f"load at day {i} is not finite: {v!r}")
            if v < 0.0:
                raise ParameterError(f"load at day {i} is negative: {v!r}")
        if vals[0] != 0.0:
            raise ParameterError(
                f"load at day 0 must be 0 (model assumption), got {vals[0]!r}"
            )

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class StateSeries:
    """A fitness/fatigue state trajectory g(0..N-1) plus the variant that made it."""

    values: tuple[float, ...]
    variant_tag: str

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ParameterError("state series must contain at least one day")
        if vals[0] != 0.0:
            raise ParameterError("state series must start at 0 (zero initial history)")
        for i, v in enumerate(vals):
            if not math.isfinite(v):
                raise ParameterError(f"state at day {i} is not finite: {v!r}")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class FirstOrderParams:
    """Classical model parameter: decay time constant in days."""

    tau_decay: float

    def __post_init__(self) -> None:
        _check_decay(self.tau_decay, "tau_decay")


@dataclass(frozen=True)
class SingleDelayParams:
    """Decay constant plus a 1-day lag constant (+inf disables the lag term)."""

    tau_decay: float
    tau_lag1: float = INF

    def __post_init__(self) -> None:
        _check_decay(self.tau_decay, "tau_decay")
        _check_lag(self.tau_lag1, "tau_lag1")


@dataclass(frozen=True)
class ThreeDelayParams:
    """Decay constant plus lag constants for delays of 1, 2 and 3 days.

    Lag constants are normally positive or +inf, but any nonzero finite value
    is accepted: ``kernel_to_three_delay`` with a positive kernel gain maps to
    negative lag constants, and the recursion stays perfectly well defined.
    """

    tau_decay: float
    tau_lag1: float = INF
    tau_lag2: float = INF
    tau_lag3: float = INF

    def __post_init__(self) -> None:
        _check_decay(self.tau_decay, "tau_decay")
        _check_lag(self.tau_lag1, "tau_lag1", allow_negative=True)
        _check_lag(self.tau_lag2, "tau_lag2", allow_negative=True)
        _check_lag(self.tau_lag3, "tau_lag3", allow_negative=True)


@dataclass(frozen=True)
class KernelParams:
    """Weighted-memory variant: signed gain ``tau5`` (1/day^2) and 3 lag weights."""

    tau_decay: float
    tau5: float
    weights: tuple[float, float, float] = _DEFAULT_KERNEL_WEIGHTS

    def __post_init__(self) -> None:
        _check_decay(self.tau_decay, "tau_decay")
        if not math.isfinite(self.tau5):
            raise ParameterError(f"tau5 must be finite, got {self.tau5!r}")
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != 3:
            raise ParameterError("weights must be a triple (lag-1, lag-2, lag-3)")
        for x in w:
            if not (0.0 < x < 1.0):
                raise ParameterError(f"each kernel weight must lie in (0, 1), got {x!r}")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ParameterError(f"kernel weights must sum to 1, got {sum(w)!r}")


@dataclass(frozen=True)
class PerformanceParams:
    """Full performance model: p(n) = p0 + k1 * g(n) - k2 * h(n).

    ``fitness`` drives g and ``fatigue`` drives h, each through the
    single-delay recursion (with +inf lag this is exactly the classical model).
    """

    p0: float
    k1: float
    k2: float
    fitness: SingleDelayParams
    fatigue: SingleDelayParams

    def __post_init__(self) -> None:
        if not math.isfinite(self.p0):
            raise ParameterError(f"p0 must be finite, got {self.p0!r}")
        if not (math.isfinite(self.k1) and self.k1 > 0.0):
            raise ParameterError(f"k1 must be finite and > 0, got {self.k1!r}")
        if not (math.isfinite(self.k2) and self.k2 > 0.0):
            raise ParameterError(f"k2 must be finite and > 0, got {self.k2!r}")


def _check_horizon(w: LoadSeries, horizon: int) -> int:
    horizon = int(horizon)
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    if horizon > len(w):
        raise SeriesLengthError(
            f"horizon {horizon} exceeds load series length {len(w)}"
        )
    return horizon


# ---------------------------------------------------------------------------
# Raw trajectory kernels. These operate on plain sequences and power both the
# public operations below and the estimation hot loop (which skips the
# dataclass wrapping). Arithmetic ordering inside the recursions is mirrored
# by the fine-grid integrator so that its m=1 reduction is bit-identical.
# ---------------------------------------------------------------------------


def classical_path(w, tau_decay: float, horizon: int) -> list[float]:
    """Literal load-history sum g(n) = sum_{i<n} w(i) e^{-(n-i)/tau}."""
    if horizon == 1:
        return [0.0]
    wv = np.asarray(w[: horizon - 1], dtype=float)
    decay = np.exp(-np.arange(1, horizon, dtype=float) / tau_decay)
    conv = np.convolve(wv, decay)
    out = [0.0] * horizon
    for n in range(1, horizon):
        out[n] = float(conv[n - 1])
    return out


def single_delay_path(w, tau_decay: float, lag_rate1: float, horizon: int) -> list[float]:
    a = math.exp(-1.0 / tau_decay)
    g = [0.0] * horizon
    gk = g1 = 0.0  # g(k), g(k-1)
    for k in range(horizon - 1):
        nxt = (w[k] + gk - lag_rate1 * g1) * a
        g[k + 1] = nxt
        g1 = gk
        gk = nxt
    return g


def three_delay_path(
    w, tau_decay: float, lag_rate1: float, lag_rate2: float, lag_rate3: float, horizon: int
) -> list[float]:
    a = math.exp(-1.0 / tau_decay)
    g = [0.0] * horizon
    gk = g1 = g2 = g3 = 0.0  # g(k), g(k-1), g(k-2), g(k-3)
    for k in range(horizon - 1):
        nxt = (w[k] + gk - lag_rate1 * g1 - lag_rate2 * g2 - lag_rate3 * g3) * a
        g[k + 1] = nxt
        g3 = g2
        g2 = g1
        g1 = gk
        gk = nxt
    return g


def kernel_path(w, tau_decay: float, tau5: float, weights, horizon: int) -> list[float]:
    a = math.exp(-1.0 / tau_decay)
    w1, w2, w3 = weights
    g = [0.0] * horizon
    gk = g1 = g2 = g3 = 0.0
    for k in range(horizon - 1):
        nxt = (w[k] + gk + tau5 * (w1 * g1 + w2 * g2 + w3 * g3)) * a
        g[k + 1] = nxt
        g3 = g2
        g2 = g1
        g1 = gk
        gk = nxt
    return g


def performance_path(
    w, p0: float, k1: float, k2: float,
    fitness: SingleDelayParams, fatigue: SingleDelayParams, horizon: int,
) -> list[float]:
    g = single_delay_path(w, fitness.tau_decay, _lag_rate(fitness.tau_lag1), horizon)
    h = single_delay_path(w, fatigue.tau_decay, _lag_rate(fatigue.tau_lag1), horizon)
    # group the state terms first so that k1 == k2 with identical sides gives
    # exactly p0 (the gains cancel before the baseline is touched)
    return [p0 + (k1 * g[n] - k2 * h[n]) for n in range(horizon)]


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def eval_classical(w: LoadSeries, params: FirstOrderParams, horizon: int) -> StateSeries:
    """Evaluate the classical first-order model as the explicit history sum."""
    horizon = _check_horizon(w, horizon)
    return StateSeries(
        tuple(classical_path(w.values, params.tau_decay, horizon)), "classical"
    )


def eval_single_delay_recursive(
    w: LoadSeries, params: SingleDelayParams, horizon: int
) -> StateSeries:
    """One-day-lag model via the step recursion
    g(k+1) = [w(k) + g(k) - (1/tau_lag1) g(k-1)] e^{-1/tau_decay}."""
    horizon = _check_horizon(w, horizon)
    path = single_delay_path(
        w.values, params.tau_decay, _lag_rate(params.tau_lag1), horizon
    )
    return StateSeries(tuple(path), "single_delay")


def eval_single_delay_convolution(
    w: LoadSeries, params: SingleDelayParams, horizon: int
) -> StateSeries:
    """Same model as :func:`eval_single_delay_recursive`, evaluated as the
    explicit history sum g(n) = sum_{i=1}^{n-1} [w(i) - (1/tau_lag1) g(i-1)] e^{-(n-i)/tau}.

    An independent arithmetic route to the same trajectory; the two must agree
    to 1e-9 relative (tested invariant).
    """
    horizon = _check_horizon(w, horizon)
    tau = params.tau_decay
    rate = _lag_rate(params.tau_lag1)
    wv = w.values
    decay = np.exp(-np.arange(horizon, dtype=float) / tau)  # decay[d] = e^{-d/tau}
    g = np.zeros(horizon)
    c = np.zeros(horizon)  # c[i] = w(i) - rate * g(i-1), defined for i >= 1
    for n in range(2, horizon):
        c[n - 1] = wv[n - 1] - rate * g[n - 2]
        g[n] = float(np.dot(c[1:n], decay[n - 1:0:-1]))
    return StateSeries(tuple(float(x) for x in g), "single_delay")


def eval_three_delay_recursive(
    w: LoadSeries, params: ThreeDelayParams, horizon: int
) -> StateSeries:
    """Three-lag model via the step recursion with zero history on [-3, 0]."""
    horizon = _check_horizon(w, horizon)
    path = three_delay_path(
        w.values,
        params.tau_decay,
        _lag_rate(params.tau_lag1),
        _lag_rate(params.tau_lag2),
        _lag_rate(params.tau_lag3),
        horizon,
    )
    return StateSeries(tuple(path), "three_delay")


def eval_three_delay_convolution(
    w: LoadSeries, params: ThreeDelayParams, horizon: int
) -> StateSeries:
    """Three-lag model as the expanded, grouped history sum.

    The grouped form folds the three lag sums into one weighted history sum
    plus separated boundary terms in g(n-3) and g(n-2):

        g(n) = sum_{i=1}^{n-1} w(i) e^{-(n-i)/tau}
             - sum_{i=1}^{n-3} g(i-1) [r1 + r2 e^{1/tau} + r3 e^{2/tau}] e^{-(n-i)/tau}
             - g(n-3) [r1 e^{-2/tau} + r2 e^{-1/tau}]
             - g(n-2) r1 e^{-1/tau}

    with r_j the lag rates 1/tau_lag_j. Kept deliberately in this shape as an
    independent check on the recursion.
    """
    horizon = _check_horizon(w, horizon)
    tau = params.tau_decay
    r1 = _lag_rate(params.tau_lag1)
    r2 = _lag_rate(params.tau_lag2)
    r3 = _lag_rate(params.tau_lag3)
    wv = np.asarray(w.values[:horizon], dtype=float)
    decay = np.exp(-np.arange(horizon, dtype=float) / tau)
    grouped = r1 + r2 * math.exp(1.0 / tau) + r3 * math.exp(2.0 / tau)
    g = np.zeros(horizon)
    for n in range(2, horizon):
        total = float(np.dot(wv[1:n], decay[n - 1:0:-1]))
        if n >= 4:
            total -= grouped * float(np.dot(g[0 : n - 3], decay[n - 1:2:-1]))
        if n >= 3:
            total -= g[n - 3] * (r1 * decay[2] + r2 * decay[1])
        total -= g[n - 2] * (r1 * decay[1])
        g[n] = total
    return StateSeries(tuple(float(x) for x in g), "three_delay")


def eval_kernel_recursive(w: LoadSeries, params: KernelParams, horizon: int) -> StateSeries:
    """Weighted-memory model:
    g(k+1) = [w(k) + g(k) + tau5 (w1 g(k-1) + w2 g(k-2) + w3 g(k-3))] e^{-1/tau}."""
    horizon = _check_horizon(w, horizon)
    path = kernel_path(w.values, params.tau_decay, params.tau5, params.weights, horizon)
    return StateSeries(tuple(path), "kernel")


def kernel_to_three_delay(params: KernelParams) -> ThreeDelayParams:
    """Map kernel parameters onto the equivalent three-delay parameters.

    The kernel recursion coincides with the three-delay recursion whenever
    -1/tau_lag_j = weight_j * tau5, i.e. tau_lag_j = -1 / (weight_j * tau5).
    tau5 = 0 maps to all-infinite lags (the classical reduction). For
    tau5 > 0 the mapped lag constants are negative; they are returned
    verbatim (the trajectories still coincide) with a UserWarning flagging
    the sign-domain departure.
    """
    if params.tau5 == 0.0:
        return ThreeDelayParams(params.tau_decay, INF, INF, INF)
    w1, w2, w3 = params.weights
    lags = (-1.0 / (w1 * params.tau5), -1.0 / (w2 * params.tau5), -1.0 / (w3 * params.tau5))
    if params.tau5 > 0.0:
        warnings.warn(
            "positive kernel gain maps to negative lag constants; "
            "trajectories still coincide but the parameters are outside the "
            "physical domain",
            UserWarning,
            stacklevel=2,
        )
    return ThreeDelayParams(params.tau_decay, *lags)


def eval_performance(
    w: LoadSeries, params: PerformanceParams, horizon: int
) -> tuple[float, ...]:
    """Predicted performance p(n) = p0 + k1 g(n) - k2 h(n) over the horizon."""
    horizon = _check_horizon(w, horizon)
    return tuple(
        performance_path(
            w.values, params.p0, params.k1, params.k2,
            params.fitness, params.fatigue, horizon,
        )
    )
