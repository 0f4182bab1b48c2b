"""Ingestion and emission: CSV series, YAML run configuration, fitted-parameter
documents (JSON) and standalone SVG charts.

Schemas
-------
Load CSV          header ``day,load``; day a non-negative base-10 integer,
                  load a non-negative decimal; missing days are rest days
                  (load 0); day 0 must carry load 0.
Performance CSV   header ``day,performance``; rows in any order, one per day.
Prediction CSV    header ``day,load,predicted,observed``; one row per day from
                  day 0; ``observed`` empty when the day was not measured.
Run config        YAML mapping with keys ``variant``, ``horizon``,
                  ``bounds.*``, ``fit.*``, ``chart.*``; unknown keys are
                  errors. Every omitted key takes the documented default.
Params document   JSON mapping with ``variant``, ``p0``, ``k1``, ``k2`` and a
                  parameter mapping per side (``fitness``/``fatigue``).

Numbers in emitted CSV use the shortest decimal form that round-trips, so
emit/parse is an exact identity.
"""

from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import NamedTuple

import yaml

from .errors import ConfigError, CsvError, DuplicateDayError, ParameterError
from .estimation import VARIANTS, FitConfig, ObservationSet, ParamBounds, VariantFit
from .models import (
    FirstOrderParams,
    KernelParams,
    LoadSeries,
    SingleDelayParams,
    ThreeDelayParams,
)


def format_number(x: float) -> str:
    """Shortest decimal representation that parses back to exactly ``x``."""
    x = float(x)
    if x != x or math.isinf(x):
        raise ParameterError(f"cannot format non-finite value {x!r}")
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


# ---------------------------------------------------------------------------
# CSV parsing
# ---------------------------------------------------------------------------


def _csv_rows(text: str) -> list[tuple[int, list[str]]]:
    """(line-number, cells) pairs, blank lines skipped, csv errors wrapped."""
    rows = []
    reader = csv.reader(io.StringIO(text))
    try:
        for line, cells in enumerate(reader, start=1):
            if not cells or all(c.strip() == "" for c in cells):
                continue
            rows.append((line, [c.strip() for c in cells]))
    except csv.Error as exc:
        raise CsvError(f"malformed CSV: {exc}", line=reader.line_num) from exc
    return rows


def _check_header(rows: list[tuple[int, list[str]]], expected: list[str]) -> None:
    if not rows:
        raise CsvError(f"empty document, expected header {','.join(expected)!r}")
    line, cells = rows[0]
    if [c.lower() for c in cells] != expected:
        raise CsvError(
            f"expected header {','.join(expected)!r}, got {','.join(cells)!r}", line=line
        )


def _parse_day(cell: str, line: int) -> int:
    try:
        day = int(cell, 10)
    except ValueError:
        raise CsvError(f"day must be a base-10 integer, got {cell!r}", line=line) from None
    if day < 0:
        raise CsvError(f"day must be non-negative, got {day}", line=line)
    return day


def _parse_value(cell: str, name: str, line: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise CsvError(f"{name} must be a number, got {cell!r}", line=line) from None
    if not math.isfinite(value):
        raise CsvError(f"{name} must be finite, got {cell!r}", line=line)
    return value


def parse_load_csv(text: str) -> LoadSeries:
    """Parse a ``day,load`` document into a dense day-0-based LoadSeries.

    Days absent from the file are rest days (load 0). Negative loads and a
    non-zero load on day 0 are rejected.
    """
    rows = _csv_rows(text)
    _check_header(rows, ["day", "load"])
    by_day: dict[int, float] = {}
    for line, cells in rows[1:]:
        if len(cells) != 2:
            raise CsvError(f"expected 2 fields (day,load), got {len(cells)}", line=line)
        day = _parse_day(cells[0], line)
        load = _parse_value(cells[1], "load", line)
        if load < 0.0:
            raise CsvError(f"load must be non-negative, got {load!r}", line=line)
        if day in by_day:
            raise DuplicateDayError(f"duplicate day {day}", line=line)
        if day == 0 and load != 0.0:
            raise CsvError(
                f"load at day 0 must be 0 (the model assumes w(0) = 0), got {load!r}",
                line=line,
            )
        by_day[day] = load
    if not by_day:
        raise CsvError("no data rows")
    horizon = max(by_day) + 1
    return LoadSeries(tuple(by_day.get(d, 0.0) for d in range(horizon)))


def parse_performance_csv(text: str) -> ObservationSet:
    """Parse a ``day,performance`` document; rows may arrive in any order."""
    rows = _csv_rows(text)
    _check_header(rows, ["day", "performance"])
    entries: list[tuple[int, float]] = []
    seen: set[int] = set()
    for line, cells in rows[1:]:
        if len(cells) != 2:
            raise CsvError(
                f"expected 2 fields (day,performance), got {len(cells)}", line=line
            )
        day = _parse_day(cells[0], line)
        value = _parse_value(cells[1], "performance", line)
        if day in seen:
            raise DuplicateDayError(f"duplicate day {day}", line=line)
        seen.add(day)
        entries.append((day, value))
    if not entries:
        raise CsvError("no data rows")
    return ObservationSet(tuple(entries))


# ---------------------------------------------------------------------------
# Prediction tables
# ---------------------------------------------------------------------------


class PredictionRow(NamedTuple):
    day: int
    load: float
    predicted: float
    observed: float | None


@dataclass(frozen=True)
class PredictionTable:
    """One row per day from day 0: load, model prediction, optional observation."""

    rows: tuple[PredictionRow, ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise ParameterError("prediction table must not be empty")
        for i, row in enumerate(self.rows):
            if row.day != i:
                raise ParameterError(
                    f"days must be contiguous from 0; row {i} has day {row.day}"
                )


def build_prediction_table(
    w: LoadSeries, predicted, obs: ObservationSet | None = None
) -> PredictionTable:
    observed = dict(obs.entries) if obs is not None else {}
    rows = tuple(
        PredictionRow(day, w.values[day], float(p), observed.get(day))
        for day, p in enumerate(predicted)
    )
    return PredictionTable(rows)


def emit_prediction_csv(table: PredictionTable) -> str:
    lines = ["day,load,predicted,observed"]
    for row in table.rows:
        observed = "" if row.observed is None else format_number(row.observed)
        lines.append(
            f"{row.day},{format_number(row.load)},{format_number(row.predicted)},{observed}"
        )
    return "\n".join(lines) + "\n"


def parse_prediction_csv(text: str) -> PredictionTable:
    rows = _csv_rows(text)
    _check_header(rows, ["day", "load", "predicted", "observed"])
    out: list[PredictionRow] = []
    for line, cells in rows[1:]:
        # A trailing empty observed field may be dropped by lenient editors.
        if len(cells) == 3:
            cells = cells + [""]
        if len(cells) != 4:
            raise CsvError(f"expected 4 fields, got {len(cells)}", line=line)
        day = _parse_day(cells[0], line)
        load = _parse_value(cells[1], "load", line)
        predicted = _parse_value(cells[2], "predicted", line)
        observed = None if cells[3] == "" else _parse_value(cells[3], "observed", line)
        out.append(PredictionRow(day, load, predicted, observed))
    if not out:
        raise CsvError("no data rows")
    return PredictionTable(tuple(out))


# ---------------------------------------------------------------------------
# Run configuration (YAML)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartOptions:
    width: float = 900.0
    height: float = 600.0
    title: str = ""

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ConfigError("chart dimensions must be positive")


@dataclass(frozen=True)
class RunConfig:
    variant: str = "single_delay"
    horizon: int | None = None  # None: use the full load series
    bounds: ParamBounds = ParamBounds()
    fit: FitConfig = FitConfig()
    chart: ChartOptions = ChartOptions()

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"unknown variant {self.variant!r}; valid variants: {', '.join(VARIANTS)}"
            )
        if self.horizon is not None and self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")


_BOUND_KEYS = ("p0", "k1", "k2", "tau1", "tau2", "tau3", "tau4", "tau5")
_FIT_KEYS = ("starts", "max_iterations", "tolerance", "simplex_tolerance", "seed", "fix_p0")
_CHART_KEYS = ("width", "height", "title")


def _as_float(value, key: str) -> float:
    if isinstance(value, bool) or value is None:
        raise ConfigError(f"{key} must be a number, got {value!r}")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _as_int(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    return value


def _require_mapping(value, key: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{key} must be a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(section: dict, allowed, where: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(
            f"unknown key(s) in {where}: {', '.join(map(str, unknown))}; "
            f"valid keys: {', '.join(allowed)}"
        )


def load_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration; unknown keys are errors."""
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    if data is None:
        data = {}
    data = _require_mapping(data, "configuration")
    _reject_unknown(data, ("variant", "horizon", "bounds", "fit", "chart"), "configuration")

    variant = data.get("variant", "single_delay")
    if not isinstance(variant, str) or variant not in VARIANTS:
        raise ConfigError(
            f"unknown variant {variant!r}; valid variants: {', '.join(VARIANTS)}"
        )
    horizon = data.get("horizon")
    if horizon is not None:
        horizon = _as_int(horizon, "horizon")

    bounds_kwargs = {}
    if "bounds" in data:
        section = _require_mapping(data["bounds"], "bounds")
        _reject_unknown(section, _BOUND_KEYS, "bounds")
        for key, pair in section.items():
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(f"bounds.{key} must be a [lower, upper] pair, got {pair!r}")
            bounds_kwargs[key] = (
                _as_float(pair[0], f"bounds.{key}[0]"),
                _as_float(pair[1], f"bounds.{key}[1]"),
            )
    fit_kwargs = {}
    if "fit" in data:
        section = _require_mapping(data["fit"], "fit")
        _reject_unknown(section, _FIT_KEYS, "fit")
        for key in ("starts", "max_iterations", "seed"):
            if key in section:
                fit_kwargs[key] = _as_int(section[key], f"fit.{key}")
        for key in ("tolerance", "simplex_tolerance"):
            if key in section:
                fit_kwargs[key] = _as_float(section[key], f"fit.{key}")
        if "fix_p0" in section and section["fix_p0"] is not None:
            fit_kwargs["fix_p0"] = _as_float(section["fix_p0"], "fit.fix_p0")
    chart_kwargs = {}
    if "chart" in data:
        section = _require_mapping(data["chart"], "chart")
        _reject_unknown(section, _CHART_KEYS, "chart")
        for key in ("width", "height"):
            if key in section:
                chart_kwargs[key] = _as_float(section[key], f"chart.{key}")
        if "title" in section:
            if not isinstance(section["title"], str):
                raise ConfigError(f"chart.title must be a string, got {section['title']!r}")
            chart_kwargs["title"] = section["title"]

    try:
        return RunConfig(
            variant=variant,
            horizon=horizon,
            bounds=ParamBounds(**bounds_kwargs),
            fit=FitConfig(**fit_kwargs),
            chart=ChartOptions(**chart_kwargs),
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Fitted-parameter documents (JSON)
# ---------------------------------------------------------------------------


def _side_to_doc(side) -> dict:
    if isinstance(side, FirstOrderParams):
        return {"tau_decay": side.tau_decay}
    if isinstance(side, SingleDelayParams):
        return {"tau_decay": side.tau_decay, "tau_lag1": side.tau_lag1}
    if isinstance(side, ThreeDelayParams):
        return {
            "tau_decay": side.tau_decay,
            "tau_lag1": side.tau_lag1,
            "tau_lag2": side.tau_lag2,
            "tau_lag3": side.tau_lag3,
        }
    if isinstance(side, KernelParams):
        return {"tau_decay": side.tau_decay, "tau5": side.tau5, "weights": list(side.weights)}
    raise ParameterError(f"unsupported side parameter object {type(side).__name__}")


def params_document(fit: VariantFit) -> dict:
    """JSON-ready mapping describing a fitted model."""
    return {
        "variant": fit.variant,
        "p0": fit.p0,
        "k1": fit.k1,
        "k2": fit.k2,
        "fitness": _side_to_doc(fit.fitness),
        "fatigue": _side_to_doc(fit.fatigue),
    }


def dumps_params(fit: VariantFit) -> str:
    return json.dumps(params_document(fit), indent=2, sort_keys=True) + "\n"


def _doc_float(value, key: str) -> float:
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def _side_from_doc(variant: str, doc: dict, where: str):
    doc = _require_mapping(doc, where)
    try:
        if variant == "classical":
            _reject_unknown(doc, ("tau_decay",), where)
            return FirstOrderParams(_doc_float(doc["tau_decay"], f"{where}.tau_decay"))
        if variant == "single_delay":
            _reject_unknown(doc, ("tau_decay", "tau_lag1"), where)
            return SingleDelayParams(
                _doc_float(doc["tau_decay"], f"{where}.tau_decay"),
                _doc_float(doc.get("tau_lag1", math.inf), f"{where}.tau_lag1"),
            )
        if variant == "three_delay":
            _reject_unknown(doc, ("tau_decay", "tau_lag1", "tau_lag2", "tau_lag3"), where)
            return ThreeDelayParams(
                _doc_float(doc["tau_decay"], f"{where}.tau_decay"),
                _doc_float(doc.get("tau_lag1", math.inf), f"{where}.tau_lag1"),
                _doc_float(doc.get("tau_lag2", math.inf), f"{where}.tau_lag2"),
                _doc_float(doc.get("tau_lag3", math.inf), f"{where}.tau_lag3"),
            )
        _reject_unknown(doc, ("tau_decay", "tau5", "weights"), where)
        weights = doc.get("weights", [0.5, 0.3, 0.2])
        if not isinstance(weights, (list, tuple)) or len(weights) != 3:
            raise ConfigError(f"{where}.weights must be a 3-element list")
        return KernelParams(
            _doc_float(doc["tau_decay"], f"{where}.tau_decay"),
            _doc_float(doc["tau5"], f"{where}.tau5"),
            tuple(_doc_float(x, f"{where}.weights") for x in weights),
        )
    except KeyError as exc:
        raise ConfigError(f"{where} is missing required key {exc.args[0]!r}") from exc
    except ParameterError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


class ParamsDocument(NamedTuple):
    """A parsed fitted-parameter document, ready for prediction."""

    variant: str
    p0: float
    k1: float
    k2: float
    fitness: FirstOrderParams | SingleDelayParams | ThreeDelayParams | KernelParams
    fatigue: FirstOrderParams | SingleDelayParams | ThreeDelayParams | KernelParams


def parse_params(text: str) -> ParamsDocument:
    """Parse a params JSON document (fit output or hand-written)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    data = _require_mapping(data, "params document")
    _reject_unknown(data, ("variant", "p0", "k1", "k2", "fitness", "fatigue"), "params document")
    try:
        variant = data["variant"]
        if variant not in VARIANTS:
            raise ConfigError(
                f"unknown variant {variant!r}; valid variants: {', '.join(VARIANTS)}"
            )
        p0 = _doc_float(data["p0"], "p0")
        k1 = _doc_float(data["k1"], "k1")
        k2 = _doc_float(data["k2"], "k2")
        fitness = _side_from_doc(variant, data["fitness"], "fitness")
        fatigue = _side_from_doc(variant, data["fatigue"], "fatigue")
    except KeyError as exc:
        raise ConfigError(f"params document is missing required key {exc.args[0]!r}") from exc
    if not math.isfinite(p0):
        raise ConfigError(f"p0 must be finite, got {p0!r}")
    try:
        if not (k1 > 0 and k2 > 0 and math.isfinite(k1) and math.isfinite(k2)):
            raise ConfigError("k1 and k2 must be finite and > 0")
    except TypeError:  # pragma: no cover
        raise ConfigError("k1 and k2 must be numbers") from None
    return ParamsDocument(variant, p0, k1, k2, fitness, fatigue)


# ---------------------------------------------------------------------------
# SVG charts
# ---------------------------------------------------------------------------

_MARGIN_LEFT = 70.0
_MARGIN_RIGHT = 25.0
_MARGIN_TOP = 45.0
_MARGIN_BOTTOM = 55.0

_PREDICTION_COLOR = "#1f77b4"  # blue curve
_OBSERVATION_COLOR = "#d62728"  # red markers
_BAR_COLOR = "#4d4d4d"


def _fmt(x: float) -> str:
    return f"{x:.2f}"


class _Frame:
    """Maps data coordinates onto the inner plot rectangle (y inverted)."""

    def __init__(self, options: ChartOptions, x_range, y_range) -> None:
        self.width = float(options.width)
        self.height = float(options.height)
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.plot_w = self.width - _MARGIN_LEFT - _MARGIN_RIGHT
        self.plot_h = self.height - _MARGIN_TOP - _MARGIN_BOTTOM

    def x(self, v: float) -> float:
        return _MARGIN_LEFT + (v - self.x0) / (self.x1 - self.x0) * self.plot_w

    def y(self, v: float) -> float:
        return _MARGIN_TOP + (1.0 - (v - self.y0) / (self.y1 - self.y0)) * self.plot_h


def _svg_root(options: ChartOptions) -> ET.Element:
    return ET.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "width": _fmt(options.width),
            "height": _fmt(options.height),
            "viewBox": f"0 0 {_fmt(options.width)} {_fmt(options.height)}",
        },
    )


def _add_axes(root: ET.Element, frame: _Frame, options: ChartOptions,
              x_label: str, y_label: str) -> None:
    axes = ET.SubElement(root, "g", {"class": "axes", "stroke": "#000000"})
    x_axis_y = _fmt(frame.height - _MARGIN_BOTTOM)
    ET.SubElement(axes, "line", {
        "x1": _fmt(_MARGIN_LEFT), "y1": x_axis_y,
        "x2": _fmt(frame.width - _MARGIN_RIGHT), "y2": x_axis_y,
    })
    ET.SubElement(axes, "line", {
        "x1": _fmt(_MARGIN_LEFT), "y1": _fmt(_MARGIN_TOP),
        "x2": _fmt(_MARGIN_LEFT), "y2": x_axis_y,
    })
    labels = ET.SubElement(root, "g", {"class": "labels", "font-size": "14"})
    if options.title:
        title = ET.SubElement(labels, "text", {
            "x": _fmt(frame.width / 2.0), "y": _fmt(_MARGIN_TOP / 2.0),
            "text-anchor": "middle", "class": "title",
        })
        title.text = options.title
    xl = ET.SubElement(labels, "text", {
        "x": _fmt(_MARGIN_LEFT + frame.plot_w / 2.0),
        "y": _fmt(frame.height - 12.0),
        "text-anchor": "middle", "class": "x-label",
    })
    xl.text = x_label
    yl = ET.SubElement(labels, "text", {
        "x": "18", "y": _fmt(_MARGIN_TOP + frame.plot_h / 2.0),
        "text-anchor": "middle", "class": "y-label",
        "transform": f"rotate(-90 18 {_fmt(_MARGIN_TOP + frame.plot_h / 2.0)})",
    })
    yl.text = y_label
    ticks = ET.SubElement(root, "g", {"class": "ticks", "font-size": "12"})
    for value, anchor in ((frame.x0, "start"), (frame.x1, "end")):
        t = ET.SubElement(ticks, "text", {
            "x": _fmt(frame.x(value)), "y": _fmt(frame.height - _MARGIN_BOTTOM + 18.0),
            "text-anchor": anchor,
        })
        t.text = format_number(round(value, 6))
    for value in (frame.y0, frame.y1):
        t = ET.SubElement(ticks, "text", {
            "x": _fmt(_MARGIN_LEFT - 6.0), "y": _fmt(frame.y(value) + 4.0),
            "text-anchor": "end",
        })
        t.text = format_number(round(value, 6))


def _serialize(root: ET.Element) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        + ET.tostring(root, encoding="unicode")
        + "\n"
    )


def render_fit_chart(table: PredictionTable, options: ChartOptions | None = None,
                     y_label: str = "performance") -> str:
    """SVG with the predicted trajectory as a blue polyline and one red circle
    per observation, axes labeled day/performance."""
    options = options or ChartOptions()
    days = [row.day for row in table.rows]
    predicted = [row.predicted for row in table.rows]
    observed = [(row.day, row.observed) for row in table.rows if row.observed is not None]
    all_y = predicted + [v for _, v in observed]
    y_lo, y_hi = min(all_y), max(all_y)
    pad = 0.05 * (y_hi - y_lo) if y_hi > y_lo else 1.0
    frame = _Frame(options, (days[0], days[-1]), (y_lo - pad, y_hi + pad))

    root = _svg_root(options)
    _add_axes(root, frame, options, "day", y_label)
    points = " ".join(f"{_fmt(frame.x(d))},{_fmt(frame.y(p))}" for d, p in zip(days, predicted))
    ET.SubElement(root, "polyline", {
        "class": "prediction",
        "points": points,
        "fill": "none",
        "stroke": _PREDICTION_COLOR,
        "stroke-width": "2",
    })
    if observed:
        marks = ET.SubElement(root, "g", {"class": "observations", "fill": _OBSERVATION_COLOR})
        for day, value in observed:
            ET.SubElement(marks, "circle", {
                "class": "observation",
                "cx": _fmt(frame.x(day)),
                "cy": _fmt(frame.y(value)),
                "r": "4",
            })
    return _serialize(root)


def render_load_chart(w: LoadSeries, options: ChartOptions | None = None) -> str:
    """SVG bar chart of the daily load, one bar per day; the maximum load spans
    the full inner plot height."""
    options = options or ChartOptions()
    values = w.values
    max_load = max(values)
    frame = _Frame(options, (0.0, float(len(values))), (0.0, max_load if max_load > 0 else 1.0))
    root = _svg_root(options)
    _add_axes(root, frame, options, "day", "load")
    bars = ET.SubElement(root, "g", {"class": "bars", "fill": _BAR_COLOR})
    slot = frame.plot_w / len(values)
    bar_w = max(slot * 0.8, 0.5)
    base_y = frame.height - _MARGIN_BOTTOM
    for day, value in enumerate(values):
        height = (value / max_load) * frame.plot_h if max_load > 0 else 0.0
        ET.SubElement(bars, "rect", {
            "class": "bar",
            "x": _fmt(_MARGIN_LEFT + day * slot + (slot - bar_w) / 2.0),
            "y": _fmt(base_y - height),
            "width": _fmt(bar_w),
            "height": _fmt(height),
        })
    return _serialize(root)
