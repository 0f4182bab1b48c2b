"""Fitness-fatigue impulse-response modeling with delayed adaptation.

Library layout:

* :mod:`ffdelay.models`     -- the four state-model variants and performance
* :mod:`ffdelay.oracle`     -- fine-grid method-of-steps integrator
* :mod:`ffdelay.estimation` -- least-squares fitting (Nelder-Mead, multi-start)
* :mod:`ffdelay.dataio`     -- CSV/YAML/JSON ingestion and SVG charts
* :mod:`ffdelay.cli`        -- the ``ffdelay`` command
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    CsvError,
    DuplicateDayError,
    FfdelayError,
    MetricError,
    ObservationError,
    ParameterError,
    SeriesLengthError,
)
from .models import (
    INF,
    FirstOrderParams,
    KernelParams,
    LoadSeries,
    PerformanceParams,
    SingleDelayParams,
    StateSeries,
    ThreeDelayParams,
    eval_classical,
    eval_kernel_recursive,
    eval_performance,
    eval_single_delay_convolution,
    eval_single_delay_recursive,
    eval_three_delay_convolution,
    eval_three_delay_recursive,
    kernel_to_three_delay,
)
from .oracle import GridSolution, StepLoad, convergence_probe, integrate_single_delay, integrate_three_delay
from .estimation import (
    FitConfig,
    FitResult,
    ObservationSet,
    ParamBounds,
    VariantFit,
    compare_variants,
    fit,
    fit_variant,
    nelder_mead,
    predict,
    predict_performance,
    r_squared,
    sse_objective,
)

__all__ = [
    "__version__",
    "INF",
    "ConfigError",
    "CsvError",
    "DuplicateDayError",
    "FfdelayError",
    "MetricError",
    "ObservationError",
    "ParameterError",
    "SeriesLengthError",
    "FirstOrderParams",
    "KernelParams",
    "LoadSeries",
    "PerformanceParams",
    "SingleDelayParams",
    "StateSeries",
    "ThreeDelayParams",
    "eval_classical",
    "eval_kernel_recursive",
    "eval_performance",
    "eval_single_delay_convolution",
    "eval_single_delay_recursive",
    "eval_three_delay_convolution",
    "eval_three_delay_recursive",
    "kernel_to_three_delay",
    "GridSolution",
    "StepLoad",
    "convergence_probe",
    "integrate_single_delay",
    "integrate_three_delay",
    "FitConfig",
    "FitResult",
    "ObservationSet",
    "ParamBounds",
    "VariantFit",
    "compare_variants",
    "fit",
    "fit_variant",
    "nelder_mead",
    "predict",
    "predict_performance",
    "r_squared",
    "sse_objective",
]
