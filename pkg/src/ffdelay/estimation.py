"""Least-squares parameter estimation for the performance model.

The objective sum of squared errors over sparse (day, performance)
observations is minimized with a derivative-free Nelder-Mead simplex plus a
seeded multi-start strategy. The search runs in a transformed space: every
positive-constrained parameter (gains and time constants) lives on a
log-scaled box and the baseline on a linear box, each reached through a
logistic squash, so every candidate the optimizer can express is feasible and
the returned parameters respect their bounds by construction.

Multi-start points are a stratified (Latin hypercube) sample of the
transformed unit box drawn from a seeded generator; starts are evaluated
sequentially and the winner is the lowest objective value with the lowest
start index as tie-break, so results are bit-reproducible for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import MetricError, ObservationError, ParameterError, SeriesLengthError
from .models import (
    INF,
    FirstOrderParams,
    KernelParams,
    LoadSeries,
    PerformanceParams,
    SingleDelayParams,
    ThreeDelayParams,
    _lag_rate,
    eval_performance,
    kernel_path,
    single_delay_path,
    three_delay_path,
)

VARIANTS = ("classical", "single_delay", "three_delay", "kernel")

#: Logistic argument at which the squash saturates to exactly 0.0/1.0 in
#: doubles; used to pin a lag coordinate at the top of its box.
_Z_SATURATED = 40.0

_WARN_UNDERDETERMINED = "underdetermined"
_WARN_ZERO_LOAD = "zero-load"
_WARN_ZERO_VARIANCE = "zero-variance-observations"


@dataclass(frozen=True)
class ObservationSet:
    """Sparse (day, performance) measurements, normalized to increasing day."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        norm = []
        for day, value in self.entries:
            d = int(day)
            v = float(value)
            if d < 0:
                raise ObservationError(f"observation day must be >= 0, got {day!r}")
            if d != day:
                raise ObservationError(f"observation day must be an integer, got {day!r}")
            if not math.isfinite(v):
                raise ObservationError(f"observation at day {d} is not finite: {value!r}")
            norm.append((d, v))
        norm.sort(key=lambda e: e[0])
        if not norm:
            raise ObservationError("observation set must not be empty")
        for (d1, _), (d2, _) in zip(norm, norm[1:]):
            if d1 == d2:
                raise ObservationError(f"duplicate observation day {d1}")
        object.__setattr__(self, "entries", tuple(norm))

    @property
    def days(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _check_bound_pair(name: str, pair: tuple[float, float], positive: bool) -> tuple[float, float]:
    lo, hi = float(pair[0]), float(pair[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ParameterError(f"bounds for {name} must be finite, got {pair!r}")
    if not lo < hi:
        raise ParameterError(f"bounds for {name} must satisfy lower < upper, got {pair!r}")
    if positive and lo <= 0.0:
        raise ParameterError(f"bounds for {name} must be strictly positive, got {pair!r}")
    return (lo, hi)


@dataclass(frozen=True)
class ParamBounds:
    """Box bounds for every fittable parameter.

    tau1/tau3 bound the fitness/fatigue decay constants, tau2/tau4 their lag
    constants (reused for all three lags of a three-delay side), tau5 the
    signed kernel gain. Lag upper bounds default very high so that a fitted
    delay term can shrink to numerical irrelevance, letting the richer
    variants reproduce the classical model inside the box.
    """

    p0: tuple[float, float] = (0.0, 5000.0)
    k1: tuple[float, float] = (1e-4, 10.0)
    k2: tuple[float, float] = (1e-4, 10.0)
    tau1: tuple[float, float] = (0.5, 500.0)
    tau2: tuple[float, float] = (0.5, 1e12)
    tau3: tuple[float, float] = (0.5, 500.0)
    tau4: tuple[float, float] = (0.5, 1e12)
    tau5: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "p0", _check_bound_pair("p0", self.p0, positive=False))
        object.__setattr__(self, "k1", _check_bound_pair("k1", self.k1, positive=True))
        object.__setattr__(self, "k2", _check_bound_pair("k2", self.k2, positive=True))
        for name in ("tau1", "tau2", "tau3", "tau4"):
            object.__setattr__(
                self, name, _check_bound_pair(name, getattr(self, name), positive=True)
            )
        object.__setattr__(self, "tau5", _check_bound_pair("tau5", self.tau5, positive=False))

    def contains(self, name: str, value: float) -> bool:
        lo, hi = getattr(self, name)
        return lo <= value <= hi


@dataclass(frozen=True)
class FitConfig:
    """Multi-start and termination settings for :func:`fit`."""

    starts: int = 20
    max_iterations: int = 2500
    tolerance: float = 1e-9
    simplex_tolerance: float = 1e-7
    seed: int = 0
    fix_p0: float | None = None

    def __post_init__(self) -> None:
        if self.starts < 1:
            raise ParameterError(f"starts must be >= 1, got {self.starts}")
        if self.max_iterations < 1:
            raise ParameterError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.tolerance > 0.0:
            raise ParameterError(f"tolerance must be > 0, got {self.tolerance}")
        if not self.simplex_tolerance > 0.0:
            raise ParameterError(
                f"simplex_tolerance must be > 0, got {self.simplex_tolerance}"
            )
        if self.seed < 0:
            raise ParameterError(f"seed must be a non-negative integer, got {self.seed}")
        if self.fix_p0 is not None and not math.isfinite(self.fix_p0):
            raise ParameterError(f"fix_p0 must be finite, got {self.fix_p0!r}")


@dataclass(frozen=True)
class FitResult:
    """Best single-delay performance fit over all starts."""

    params: PerformanceParams
    sse: float
    r2: float
    predicted: tuple[float, ...]
    starts_converged: int
    best_start_index: int
    iterations_used: int
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class VariantFit:
    """A fitted performance model of any state-model variant.

    ``fitness``/``fatigue`` hold the side parameter objects of the variant's
    state model; ``n_free`` counts the coordinates the optimizer actually
    searched (p0 is excluded when fixed).
    """

    variant: str
    p0: float
    k1: float
    k2: float
    fitness: FirstOrderParams | SingleDelayParams | ThreeDelayParams | KernelParams
    fatigue: FirstOrderParams | SingleDelayParams | ThreeDelayParams | KernelParams
    n_free: int
    sse: float
    r2: float
    predicted: tuple[float, ...]
    starts_converged: int
    best_start_index: int
    iterations_used: int
    warnings: tuple[str, ...] = ()

    def to_performance_params(self) -> PerformanceParams:
        """Express a classical or single-delay fit as PerformanceParams."""
        if self.variant == "classical":
            fit_side = SingleDelayParams(self.fitness.tau_decay, INF)
            fat_side = SingleDelayParams(self.fatigue.tau_decay, INF)
        elif self.variant == "single_delay":
            fit_side = self.fitness
            fat_side = self.fatigue
        else:
            raise ParameterError(
                f"variant {self.variant!r} is not representable as PerformanceParams"
            )
        return PerformanceParams(self.p0, self.k1, self.k2, fit_side, fat_side)


# ---------------------------------------------------------------------------
# Fit metrics
# ---------------------------------------------------------------------------


def sse_objective(params: PerformanceParams, w: LoadSeries, obs: ObservationSet) -> float:
    """Sum of squared model-vs-observation errors at the observed days."""
    last = obs.days[-1]
    if last >= len(w):
        raise ObservationError(
            f"observation day {last} outside the load horizon {len(w)}"
        )
    p = eval_performance(w, params, last + 1)
    return sum((p[d] - y) ** 2 for d, y in obs.entries)


def r_squared(predicted: Sequence[float], obs: ObservationSet) -> float:
    """Coefficient of determination 1 - SSE/SST, SST about the observation mean.

    1 for a perfect fit, 0 for the mean predictor, negative when worse than
    the mean. Undefined (MetricError) for fewer than two observations or
    zero observation variance.
    """
    if len(obs) < 2:
        raise MetricError("r_squared needs at least two observations")
    if obs.days[-1] >= len(predicted):
        raise ObservationError(
            f"observation day {obs.days[-1]} outside the predicted horizon {len(predicted)}"
        )
    values = obs.values
    mean = sum(values) / len(values)
    sst = sum((y - mean) ** 2 for y in values)
    if sst == 0.0:
        raise MetricError("r_squared undefined: observations have zero variance")
    sse = sum((predicted[d] - y) ** 2 for d, y in obs.entries)
    return 1.0 - sse / sst


# ---------------------------------------------------------------------------
# Nelder-Mead simplex
# ---------------------------------------------------------------------------


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    start: Sequence[float],
    config: FitConfig,
    step: float | Sequence[float] | None = None,
    trace: list[float] | None = None,
) -> tuple[np.ndarray, float, int, bool]:
    """Minimize ``objective`` from ``start`` with the standard simplex moves.

    Non-finite objective values during the search are treated as +inf; a
    non-finite value at the start itself is an input error. Terminates when
    the simplex's value spread drops below ``config.tolerance``, its size
    below ``config.simplex_tolerance``, or after ``config.max_iterations``.

    Returns (best point, best value, iterations, converged). The best vertex
    is never discarded, so the returned value cannot exceed objective(start);
    if ``trace`` is given, the best value per iteration is appended to it.
    """
    x0 = np.asarray(start, dtype=float)
    n = x0.size
    if n == 0:
        raise ParameterError("start vector must be non-empty")

    def f(x: np.ndarray) -> float:
        v = float(objective(x))
        return v if math.isfinite(v) else math.inf

    f00 = float(objective(x0))
    if not math.isfinite(f00):
        raise ParameterError(f"objective is not finite at the start point: {f00!r}")

    if step is None:
        steps = np.array([0.05 * max(abs(v), 1.0) for v in x0])
    else:
        steps = np.broadcast_to(np.asarray(step, dtype=float), (n,)).copy()

    verts = np.tile(x0, (n + 1, 1))
    for i in range(n):
        verts[i + 1, i] += steps[i]
    fvals = np.array([f00] + [f(verts[i + 1]) for i in range(n)])

    iterations = 0
    converged = False
    spread_streak = 0
    while iterations < config.max_iterations:
        order = np.argsort(fvals, kind="stable")
        verts = verts[order]
        fvals = fvals[order]
        spread = fvals[-1] - fvals[0]
        size = float(np.max(np.abs(verts[1:] - verts[0])))
        # The spread criterion must hold on two consecutive iterations: a
        # simplex straddling a minimum symmetrically has zero value spread
        # while still step-sized wide, and one more iteration (a contraction)
        # breaks that tie.
        spread_streak = spread_streak + 1 if spread <= config.tolerance else 0
        if spread_streak >= 2 or size <= config.simplex_tolerance:
            converged = True
            break

        iterations += 1
        centroid = verts[:-1].mean(axis=0)
        worst = verts[-1]
        reflected = centroid + (centroid - worst)
        f_r = f(reflected)
        if f_r < fvals[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            f_e = f(expanded)
            if f_e < f_r:
                verts[-1], fvals[-1] = expanded, f_e
            else:
                verts[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            verts[-1], fvals[-1] = reflected, f_r
        else:
            if f_r < fvals[-1]:
                contracted = centroid + 0.5 * (centroid - worst)
                f_c = f(contracted)
                accept = f_c <= f_r
            else:
                contracted = centroid - 0.5 * (centroid - worst)
                f_c = f(contracted)
                accept = f_c < fvals[-1]
            if accept:
                verts[-1], fvals[-1] = contracted, f_c
            else:
                for i in range(1, n + 1):
                    verts[i] = verts[0] + 0.5 * (verts[i] - verts[0])
                    fvals[i] = f(verts[i])
        if trace is not None:
            trace.append(float(np.min(fvals)))

    best = int(np.argmin(fvals))
    return verts[best].copy(), float(fvals[best]), iterations, converged


# ---------------------------------------------------------------------------
# Bounded parameter transform
# ---------------------------------------------------------------------------


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _logit(u: float) -> float:
    u = min(max(u, 1e-15), 1.0 - 1e-15)
    return math.log(u / (1.0 - u))


@dataclass(frozen=True)
class _Coord:
    """One search coordinate: a bounded box reached via a logistic squash."""

    name: str
    lo: float
    hi: float
    log_scale: bool

    def value(self, z: float) -> float:
        u = _sigmoid(z)
        if self.log_scale:
            lo = math.log(self.lo)
            return math.exp(lo + u * (math.log(self.hi) - lo))
        return self.lo + u * (self.hi - self.lo)

    def z_of(self, value: float) -> float:
        if self.log_scale:
            lo = math.log(self.lo)
            u = (math.log(value) - lo) / (math.log(self.hi) - lo)
        else:
            u = (value - self.lo) / (self.hi - self.lo)
        return _logit(u)


_SIDE_PARAMS = {
    "classical": ("tau_decay",),
    "single_delay": ("tau_decay", "tau_lag1"),
    "three_delay": ("tau_decay", "tau_lag1", "tau_lag2", "tau_lag3"),
    "kernel": ("tau_decay", "tau5"),
}


def _coords_for(variant: str, bounds: ParamBounds, fix_p0: float | None) -> list[_Coord]:
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    coords: list[_Coord] = []
    if fix_p0 is None:
        coords.append(_Coord("p0", *bounds.p0, log_scale=False))
    coords.append(_Coord("k1", *bounds.k1, log_scale=True))
    coords.append(_Coord("k2", *bounds.k2, log_scale=True))
    for side, decay_b, lag_b in (("fitness", bounds.tau1, bounds.tau2),
                                 ("fatigue", bounds.tau3, bounds.tau4)):
        for pname in _SIDE_PARAMS[variant]:
            if pname == "tau_decay":
                coords.append(_Coord(f"{side}.tau_decay", *decay_b, log_scale=True))
            elif pname.startswith("tau_lag"):
                coords.append(_Coord(f"{side}.{pname}", *lag_b, log_scale=True))
            else:  # tau5: signed, linear scale
                coords.append(_Coord(f"{side}.tau5", *bounds.tau5, log_scale=False))
    return coords


def _side_object(variant: str, side_vals: dict[str, float]):
    if variant == "classical":
        return FirstOrderParams(side_vals["tau_decay"])
    if variant == "single_delay":
        return SingleDelayParams(side_vals["tau_decay"], side_vals["tau_lag1"])
    if variant == "three_delay":
        return ThreeDelayParams(
            side_vals["tau_decay"], side_vals["tau_lag1"],
            side_vals["tau_lag2"], side_vals["tau_lag3"],
        )
    return KernelParams(side_vals["tau_decay"], side_vals["tau5"])


def _state_path(side, wv: Sequence[float], horizon: int) -> list[float]:
    if isinstance(side, FirstOrderParams):
        return single_delay_path(wv, side.tau_decay, 0.0, horizon)
    if isinstance(side, SingleDelayParams):
        return single_delay_path(wv, side.tau_decay, _lag_rate(side.tau_lag1), horizon)
    if isinstance(side, ThreeDelayParams):
        return three_delay_path(
            wv, side.tau_decay,
            _lag_rate(side.tau_lag1), _lag_rate(side.tau_lag2), _lag_rate(side.tau_lag3),
            horizon,
        )
    if isinstance(side, KernelParams):
        return kernel_path(wv, side.tau_decay, side.tau5, side.weights, horizon)
    raise ParameterError(f"unsupported state parameter object {type(side).__name__}")


def predict_performance(
    variant: str,
    p0: float,
    k1: float,
    k2: float,
    fitness,
    fatigue,
    w: LoadSeries,
    horizon: int,
) -> tuple[float, ...]:
    """Performance trajectory p0 + k1*g - k2*h for any state-model variant."""
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    if horizon > len(w):
        raise SeriesLengthError(f"horizon {horizon} exceeds load series length {len(w)}")
    g = _state_path(fitness, w.values, horizon)
    h = _state_path(fatigue, w.values, horizon)
    return tuple(p0 + (k1 * g[n] - k2 * h[n]) for n in range(horizon))


def predict(params: PerformanceParams, w: LoadSeries, horizon: int) -> tuple[float, ...]:
    """Performance trajectory for fitted (or hand-written) single-delay parameters."""
    return eval_performance(w, params, horizon)


# ---------------------------------------------------------------------------
# Multi-start driver
# ---------------------------------------------------------------------------


def _raw_predictor(
    variant: str, coords: list[_Coord], fix_p0: float | None, wv: Sequence[float]
) -> Callable[[np.ndarray, int], list[float]]:
    names = [c.name for c in coords]

    def run(z: np.ndarray, horizon: int) -> list[float]:
        vals = {name: c.value(float(z[i])) for i, (name, c) in enumerate(zip(names, coords))}
        p0 = fix_p0 if fix_p0 is not None else vals["p0"]
        k1 = vals["k1"]
        k2 = vals["k2"]
        paths = []
        for side in ("fitness", "fatigue"):
            tau = vals[f"{side}.tau_decay"]
            if variant == "classical":
                paths.append(single_delay_path(wv, tau, 0.0, horizon))
            elif variant == "single_delay":
                paths.append(single_delay_path(wv, tau, 1.0 / vals[f"{side}.tau_lag1"], horizon))
            elif variant == "three_delay":
                paths.append(three_delay_path(
                    wv, tau,
                    1.0 / vals[f"{side}.tau_lag1"],
                    1.0 / vals[f"{side}.tau_lag2"],
                    1.0 / vals[f"{side}.tau_lag3"],
                    horizon,
                ))
            else:
                paths.append(kernel_path(wv, tau, vals[f"{side}.tau5"], (0.5, 0.3, 0.2), horizon))
        g, h = paths
        return [p0 + (k1 * g[n] - k2 * h[n]) for n in range(horizon)]

    return run


def _latin_hypercube(rng: np.random.Generator, n_starts: int, dims: int) -> np.ndarray:
    u = np.empty((n_starts, dims))
    for i in range(dims):
        perm = rng.permutation(n_starts)
        u[:, i] = (perm + rng.random(n_starts)) / n_starts
    return np.clip(u, 1e-15, 1.0 - 1e-15)


def fit_variant(
    w: LoadSeries,
    obs: ObservationSet,
    bounds: ParamBounds,
    config: FitConfig,
    variant: str = "single_delay",
    extra_starts: Sequence[np.ndarray] = (),
) -> VariantFit:
    """Fit the performance model with the given state-model variant.

    ``extra_starts`` prepends deterministic start points in the transformed
    space ahead of the sampled ones (used by :func:`compare_variants` to seed
    richer variants with the classical solution).
    """
    if obs.days[-1] >= len(w):
        raise ObservationError(
            f"observation day {obs.days[-1]} outside the load horizon {len(w)}"
        )
    coords = _coords_for(variant, bounds, config.fix_p0)
    wv = w.values
    predictor = _raw_predictor(variant, coords, config.fix_p0, wv)
    entries = obs.entries
    obj_horizon = obs.days[-1] + 1

    def objective(z: np.ndarray) -> float:
        p = predictor(z, obj_horizon)
        return sum((p[d] - y) ** 2 for d, y in entries)

    rng = np.random.default_rng(config.seed)
    u = _latin_hypercube(rng, config.starts, len(coords))
    starts = [np.asarray(z, dtype=float) for z in extra_starts]
    starts += [np.array([_logit(ui) for ui in row]) for row in u]

    best_z = None
    best_f = math.inf
    best_index = -1
    best_iters = 0
    n_converged = 0
    for index, z0 in enumerate(starts):
        zb, fb, iters, conv = nelder_mead(objective, z0, config)
        budget = config.max_iterations - iters
        if budget > 0:
            polish_config = FitConfig(
                starts=1,
                max_iterations=budget,
                tolerance=config.tolerance,
                simplex_tolerance=config.simplex_tolerance,
                seed=config.seed,
            )
            zb2, fb2, iters2, conv2 = nelder_mead(objective, zb, polish_config, step=0.02)
            if fb2 <= fb:
                zb, fb = zb2, fb2
            iters += iters2
            conv = conv or conv2
        if conv:
            n_converged += 1
        if fb < best_f:
            best_z, best_f, best_index, best_iters = zb, fb, index, iters

    if best_z is None:  # pragma: no cover - starts >= 1 always yields a candidate
        raise ParameterError("no usable start point")

    vals = {c.name: c.value(float(best_z[i])) for i, c in enumerate(coords)}
    p0 = config.fix_p0 if config.fix_p0 is not None else vals["p0"]
    fitness = _side_object(variant, _side_values(variant, vals, "fitness"))
    fatigue = _side_object(variant, _side_values(variant, vals, "fatigue"))
    predicted = tuple(predictor(best_z, len(w)))

    warnings_out = []
    if len(obs) < len(coords):
        warnings_out.append(_WARN_UNDERDETERMINED)
    if all(v == 0.0 for v in wv):
        warnings_out.append(_WARN_ZERO_LOAD)
    try:
        r2 = r_squared(predicted, obs)
    except MetricError:
        r2 = math.nan
        warnings_out.append(_WARN_ZERO_VARIANCE)

    return VariantFit(
        variant=variant,
        p0=p0,
        k1=vals["k1"],
        k2=vals["k2"],
        fitness=fitness,
        fatigue=fatigue,
        n_free=len(coords),
        sse=best_f,
        r2=r2,
        predicted=predicted,
        starts_converged=n_converged,
        best_start_index=best_index,
        iterations_used=best_iters,
        warnings=tuple(warnings_out),
    )


def _side_values(variant: str, vals: dict[str, float], side: str) -> dict[str, float]:
    return {p: vals[f"{side}.{p}"] for p in _SIDE_PARAMS[variant]}


def fit(
    w: LoadSeries,
    obs: ObservationSet,
    bounds: ParamBounds,
    config: FitConfig,
    variant: str = "single_delay",
) -> FitResult:
    """Least-squares fit of the performance model; best result over all starts.

    Supports the two variants representable as PerformanceParams: the default
    single-delay model and its classical reduction (lag constants pinned at
    +inf). Deterministic for a given (inputs, seed).
    """
    if variant not in ("classical", "single_delay"):
        raise ParameterError(
            f"fit supports 'classical' and 'single_delay'; use fit_variant for {variant!r}"
        )
    vf = fit_variant(w, obs, bounds, config, variant)
    return FitResult(
        params=vf.to_performance_params(),
        sse=vf.sse,
        r2=vf.r2,
        predicted=vf.predicted,
        starts_converged=vf.starts_converged,
        best_start_index=vf.best_start_index,
        iterations_used=vf.iterations_used,
        warnings=vf.warnings,
    )


def _embed_start(coords: list[_Coord], targets: dict[str, float]) -> np.ndarray:
    """Start vector realizing ``targets`` in the transformed space.

    A +inf target pins a lag coordinate at the saturated top of its log box,
    where the lag rate is numerically negligible (the exact-inf reduction is
    outside the box, but indistinguishable at double precision).
    """
    z = np.empty(len(coords))
    for i, c in enumerate(coords):
        v = targets[c.name]
        z[i] = _Z_SATURATED if v == math.inf else c.z_of(v)
    return z


def _embedding_targets(variant: str, fit: VariantFit) -> dict[str, float] | None:
    """Express ``fit``'s solution as parameter targets for ``variant``.

    Returns None when the solution has no representation inside the richer
    variant's box (a positive kernel gain maps to negative lag constants).
    """
    targets = {"p0": fit.p0, "k1": fit.k1, "k2": fit.k2}
    for side_name in ("fitness", "fatigue"):
        side = getattr(fit, side_name)
        targets[f"{side_name}.tau_decay"] = side.tau_decay
        if variant == "kernel":
            if not isinstance(side, (FirstOrderParams,)):
                return None
            targets[f"{side_name}.tau5"] = 0.0
            continue
        # target variant is single_delay or three_delay: fill lag constants
        if isinstance(side, FirstOrderParams):
            lags = (math.inf, math.inf, math.inf)
        elif isinstance(side, SingleDelayParams):
            lags = (side.tau_lag1, math.inf, math.inf)
        elif isinstance(side, KernelParams):
            if side.tau5 > 0.0:
                return None
            mapped = kernel_to_three_delay(side)
            lags = (mapped.tau_lag1, mapped.tau_lag2, mapped.tau_lag3)
        else:
            lags = (side.tau_lag1, side.tau_lag2, side.tau_lag3)
        targets[f"{side_name}.tau_lag1"] = lags[0]
        if variant == "three_delay":
            targets[f"{side_name}.tau_lag2"] = lags[1]
            targets[f"{side_name}.tau_lag3"] = lags[2]
    return targets


def compare_variants(
    w: LoadSeries,
    obs: ObservationSet,
    bounds: ParamBounds,
    config: FitConfig,
) -> list[VariantFit]:
    """Fit all four variants on the same data.

    Every variant's start list is seeded with the solutions of the variants it
    contains as parameter specializations (classical for all; classical and
    single_delay and kernel for three_delay), with the extra delay terms
    switched off. The simplex never returns a value worse than its start, so a
    containing variant cannot report a worse SSE than the contained fit.
    """
    classical = fit_variant(w, obs, bounds, config, "classical")
    by_name = {"classical": classical}
    for variant, contained in (
        ("single_delay", ("classical",)),
        ("kernel", ("classical",)),
        ("three_delay", ("classical", "single_delay", "kernel")),
    ):
        coords = _coords_for(variant, bounds, config.fix_p0)
        seeds = []
        for name in contained:
            targets = _embedding_targets(variant, by_name[name])
            if targets is not None:
                seeds.append(_embed_start(coords, targets))
        by_name[variant] = fit_variant(
            w, obs, bounds, config, variant, extra_starts=seeds
        )
    return [by_name[v] for v in VARIANTS]
