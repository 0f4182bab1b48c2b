"""data-io tests: CSV parsers/emitters, config loading, SVG structure."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

import ffdelay as ff
from ffdelay.dataio import (
    ChartOptions,
    PredictionRow,
    PredictionTable,
    build_prediction_table,
    dumps_params,
    emit_prediction_csv,
    format_number,
    load_config,
    parse_load_csv,
    parse_params,
    parse_performance_csv,
    parse_prediction_csv,
    render_fit_chart,
    render_load_chart,
)
from ffdelay.errors import ConfigError, CsvError, DuplicateDayError, FfdelayError, ParameterError

SVG = "{http://www.w3.org/2000/svg}"


def svg_find(doc: str, tag: str) -> list[ET.Element]:
    return list(ET.fromstring(doc).iter(f"{SVG}{tag}"))


class TestFormatNumber:
    def test_integral_values_drop_the_point(self):
        assert format_number(0.0) == "0"
        assert format_number(500.0) == "500"
        assert format_number(-3.0) == "-3"

    def test_round_trip_property(self):
        rng = np.random.default_rng(40)
        values = list(rng.uniform(-1e6, 1e6, size=200))
        values += [0.1, 1 / 3, 1e-17, 2**53 + 1.0, 6.02e23, -0.0]
        for v in values:
            assert float(format_number(v)) == v


class TestParseLoadCsv:
    def test_direct_mapping(self):
        w = parse_load_csv("day,load\n0,0\n1,100\n2,80\n")
        assert w.values == (0.0, 100.0, 80.0)

    def test_gap_fill(self):
        w = parse_load_csv("day,load\n0,0\n3,50\n")
        assert w.values == (0.0, 0.0, 0.0, 50.0)

    def test_negative_load_rejected(self):
        with pytest.raises(CsvError) as err:
            parse_load_csv("day,load\n0,0\n1,-5\n")
        assert err.value.line == 3

    def test_nonzero_day0_rejected_with_reason(self):
        with pytest.raises(CsvError, match="w\\(0\\) = 0"):
            parse_load_csv("day,load\n0,7\n")

    def test_missing_day0_filled_with_rest(self):
        w = parse_load_csv("day,load\n2,10\n")
        assert w.values == (0.0, 0.0, 10.0)

    def test_duplicate_day(self):
        with pytest.raises(DuplicateDayError):
            parse_load_csv("day,load\n0,0\n1,5\n1,6\n")

    def test_malformed_row_cites_line(self):
        with pytest.raises(CsvError) as err:
            parse_load_csv("day,load\n0,0\nbanana,5\n")
        assert err.value.line == 3
        with pytest.raises(CsvError) as err:
            parse_load_csv("day,load\n0,0\n1,5,9\n")
        assert err.value.line == 3

    def test_header_required(self):
        with pytest.raises(CsvError):
            parse_load_csv("jour,charge\n0,0\n")
        with pytest.raises(CsvError):
            parse_load_csv("")

    def test_fuzz_never_raises_anything_else(self):
        rng = np.random.default_rng(41)
        alphabet = list("day,lo0123456789.\n\r\t eE+-;\"'x\x00")
        for _ in range(300):
            n = int(rng.integers(0, 60))
            text = "".join(rng.choice(alphabet) for _ in range(n))
            try:
                parse_load_csv(text)
                parse_performance_csv(text)
            except FfdelayError:
                pass  # structured failure is the contract


class TestParsePerformanceCsv:
    def test_basic(self):
        obs = parse_performance_csv("day,performance\n7,512\n14,498\n")
        assert obs.entries == ((7, 512.0), (14, 498.0))

    def test_unsorted_rows_sorted(self):
        obs = parse_performance_csv("day,performance\n14,498\n7,512\n")
        assert obs.days == (7, 14)

    def test_duplicate_day(self):
        with pytest.raises(DuplicateDayError):
            parse_performance_csv("day,performance\n7,512\n7,400\n")

    def test_day0_allowed(self):
        obs = parse_performance_csv("day,performance\n0,500\n9,505\n")
        assert obs.days == (0, 9)

    def test_non_numeric_value(self):
        with pytest.raises(CsvError):
            parse_performance_csv("day,performance\n7,fast\n")


class TestRunConfig:
    def test_minimal_config_applies_defaults(self):
        config = load_config("variant: single_delay\n")
        assert config.variant == "single_delay"
        assert config.horizon is None
        assert config.fit == ff.FitConfig()
        assert config.bounds == ff.ParamBounds()
        assert config.chart == ChartOptions()

    def test_empty_document_is_all_defaults(self):
        assert load_config("") == load_config("variant: single_delay\n")

    def test_unknown_variant_lists_valid_ones(self):
        with pytest.raises(ConfigError, match="classical.*single_delay.*three_delay.*kernel"):
            load_config("variant: banana\n")

    def test_bound_inversion(self):
        with pytest.raises(ConfigError):
            load_config("bounds:\n  k1: [10.0, 0.1]\n")

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            load_config("variant: kernel\nturbo: true\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config("fit:\n  optimizer: adam\n")
        with pytest.raises(ConfigError, match="unknown key"):
            load_config("bounds:\n  tau9: [1, 2]\n")

    def test_full_config(self):
        text = (
            "variant: kernel\n"
            "horizon: 90\n"
            "fit:\n  starts: 5\n  seed: 42\n  max_iterations: 300\n"
            "  tolerance: 1.0e-8\n  simplex_tolerance: 1.0e-6\n  fix_p0: 480.0\n"
            "bounds:\n  p0: [100, 900]\n  tau5: [-0.5, 0.5]\n"
            "chart:\n  width: 640\n  height: 480\n  title: demo\n"
        )
        config = load_config(text)
        assert config.variant == "kernel"
        assert config.horizon == 90
        assert config.fit.starts == 5
        assert config.fit.seed == 42
        assert config.fit.fix_p0 == 480.0
        assert config.bounds.p0 == (100.0, 900.0)
        assert config.bounds.tau5 == (-0.5, 0.5)
        assert config.chart == ChartOptions(640.0, 480.0, "demo")

    def test_invalid_yaml(self):
        with pytest.raises(ConfigError):
            load_config("variant: [unterminated\n")
        with pytest.raises(ConfigError):
            load_config("- just\n- a\n- list\n")


class TestPredictionCsv:
    def test_single_row_fixture(self):
        table = PredictionTable((PredictionRow(0, 0.0, 500.0, None),))
        assert emit_prediction_csv(table) == "day,load,predicted,observed\n0,0,500,\n"

    def test_observed_field_present_when_measured(self):
        w = ff.LoadSeries((0.0,) * 9)
        obs = ff.ObservationSet(((7, 512.25),))
        table = build_prediction_table(w, [500.0] * 9, obs)
        lines = emit_prediction_csv(table).splitlines()
        assert lines[8] == "7,0,500,512.25"
        assert lines[1] == "0,0,500,"

    def test_round_trip_identity(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            n = int(rng.integers(1, 40))
            rows = []
            for day in range(n):
                observed = float(rng.normal(500, 40)) if rng.random() < 0.3 else None
                rows.append(
                    PredictionRow(
                        day,
                        float(rng.uniform(0, 150)),
                        float(rng.normal(500, 40)),
                        observed,
                    )
                )
            table = PredictionTable(tuple(rows))
            assert parse_prediction_csv(emit_prediction_csv(table)) == table

    def test_days_must_be_contiguous(self):
        with pytest.raises(ParameterError):
            PredictionTable((PredictionRow(1, 0.0, 1.0, None),))
        with pytest.raises(ParameterError):
            PredictionTable(())


class TestParamsDocument:
    def test_round_trip_each_variant(self, load_120, clean_observations):
        config = ff.FitConfig(starts=1, max_iterations=30, seed=0)
        for variant in ("classical", "single_delay", "three_delay", "kernel"):
            fit = ff.fit_variant(load_120, clean_observations, ff.ParamBounds(), config, variant)
            doc = parse_params(dumps_params(fit))
            assert doc.variant == variant
            assert doc.p0 == fit.p0
            assert doc.k1 == fit.k1
            assert doc.fitness == fit.fitness
            assert doc.fatigue == fit.fatigue

    def test_hand_written_with_inf_lag(self):
        text = (
            '{"variant": "single_delay", "p0": 500, "k1": 0.1, "k2": 0.12,'
            ' "fitness": {"tau_decay": 45, "tau_lag1": "inf"},'
            ' "fatigue": {"tau_decay": 15, "tau_lag1": 10}}'
        )
        doc = parse_params(text)
        assert doc.fitness.tau_lag1 == math.inf
        assert doc.fatigue.tau_lag1 == 10.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_params('{"variant": "classical", "p0": 1, "k1": 1, "k2": 1, "exotic": 2}')

    def test_missing_key_rejected(self):
        with pytest.raises(ConfigError, match="missing"):
            parse_params('{"variant": "classical", "p0": 1, "k1": 1, "k2": 1}')

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            parse_params("not json at all")


class TestFitChart:
    def test_marker_and_polyline_counts(self):
        w = ff.LoadSeries((0.0, 10.0, 0.0))
        obs = ff.ObservationSet(((1, 501.0),))
        doc = render_fit_chart(build_prediction_table(w, [500.0, 501.0, 500.5], obs))
        assert len(svg_find(doc, "polyline")) == 1
        assert len(svg_find(doc, "circle")) == 1

    def test_no_observations_polyline_only(self):
        w = ff.LoadSeries((0.0, 10.0, 0.0))
        doc = render_fit_chart(build_prediction_table(w, [500.0, 501.0, 500.5]))
        assert len(svg_find(doc, "polyline")) == 1
        assert len(svg_find(doc, "circle")) == 0

    def test_monotone_predictions_monotone_svg_y(self):
        w = ff.LoadSeries((0.0,) * 6)
        predicted = [100.0, 105.0, 112.0, 120.0, 129.0, 140.0]
        doc = render_fit_chart(build_prediction_table(w, predicted))
        points = svg_find(doc, "polyline")[0].get("points").split()
        ys = [float(p.split(",")[1]) for p in points]
        # increasing data maps to decreasing pixel y (origin is top-left)
        assert all(b < a for a, b in zip(ys, ys[1:]))

    def test_axis_labels(self):
        w = ff.LoadSeries((0.0, 1.0))
        doc = render_fit_chart(build_prediction_table(w, [500.0, 501.0]))
        texts = [t.text for t in svg_find(doc, "text")]
        assert "day" in texts and "performance" in texts

    def test_well_formed_for_random_tables(self):
        rng = np.random.default_rng(43)
        for _ in range(10):
            n = int(rng.integers(1, 80))
            w = ff.LoadSeries((0.0,) + tuple(rng.uniform(0, 100, size=n - 1)))
            predicted = list(rng.normal(500, 30, size=n))
            obs_days = [d for d in range(n) if rng.random() < 0.2]
            obs = (
                ff.ObservationSet(tuple((d, float(rng.normal(500, 30))) for d in obs_days))
                if obs_days
                else None
            )
            doc = render_fit_chart(build_prediction_table(w, predicted, obs))
            ET.fromstring(doc)  # raises if malformed


class TestLoadChart:
    def test_bar_per_day_and_zero_height_first_bar(self):
        doc = render_load_chart(ff.LoadSeries((0.0, 100.0)))
        bars = svg_find(doc, "rect")
        assert len(bars) == 2
        assert float(bars[0].get("height")) == 0.0
        assert float(bars[1].get("height")) > 0.0

    def test_all_zero_loads_valid_document(self):
        doc = render_load_chart(ff.LoadSeries((0.0, 0.0, 0.0)))
        bars = svg_find(doc, "rect")
        assert len(bars) == 3
        assert all(float(b.get("height")) == 0.0 for b in bars)

    def test_max_load_spans_plot_height(self):
        options = ChartOptions(900.0, 600.0)
        w = ff.LoadSeries((0.0, 37.0, 120.0, 64.0))
        doc = render_load_chart(w, options)
        heights = [float(b.get("height")) for b in svg_find(doc, "rect")]
        plot_height = 600.0 - 45.0 - 55.0  # top/bottom margins
        assert abs(max(heights) - plot_height) <= 1.0
        # heights proportional to loads
        assert heights[1] / heights[2] == pytest.approx(37.0 / 120.0, abs=1e-3)

    def test_axis_labels(self):
        doc = render_load_chart(ff.LoadSeries((0.0, 5.0)))
        texts = [t.text for t in svg_find(doc, "text")]
        assert "day" in texts and "load" in texts
