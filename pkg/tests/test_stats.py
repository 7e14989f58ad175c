"""Kernel densities, correlations, and the per-delta summary."""

from __future__ import annotations

import math

import numpy as np
import pytest

from voho.stats import (
    StudyRow,
    correlation_matrix,
    delta_summary,
    format_summary_table,
    kernel_density,
    parse_delta_variant,
    pearson,
    silverman_bandwidth,
    variant_name,
)


class TestKernelDensity:
    def test_single_point_unit_bandwidth(self):
        grid, density = kernel_density([0.0], grid=np.array([0.0]), bandwidth=1.0)
        assert density[0] == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), abs=1e-12)

    def test_integrates_to_one_on_wide_grid(self, rng):
        values = rng.normal(0.3, 0.05, size=80)
        h = silverman_bandwidth(values)
        grid = np.linspace(values.min() - 5 * h, values.max() + 5 * h, 2001)
        _, density = kernel_density(values, grid=grid)
        assert np.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-3)

    def test_default_grid_shape_and_mass(self, rng):
        values = rng.normal(size=60)
        grid, density = kernel_density(values)
        assert grid.size == 512
        h = silverman_bandwidth(values)
        assert grid[0] == pytest.approx(values.min() - 3 * h)
        assert grid[-1] == pytest.approx(values.max() + 3 * h)
        assert np.trapezoid(density, grid) == pytest.approx(1.0, abs=1e-3)

    def test_translation_equivariance(self, rng):
        values = rng.normal(size=40)
        grid = np.linspace(-3.0, 3.0, 101)
        _, base = kernel_density(values, grid=grid, bandwidth=0.4)
        _, moved = kernel_density(values + 1.5, grid=grid + 1.5, bandwidth=0.4)
        assert np.allclose(base, moved, rtol=0, atol=1e-12)

    def test_density_non_negative(self, rng):
        _, density = kernel_density(rng.normal(size=25))
        assert np.all(density >= 0.0)

    def test_silverman_formula(self):
        values = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        sd = np.std(values, ddof=1)
        iqr = np.percentile(values, 75) - np.percentile(values, 25)
        expected = 0.9 * min(sd, iqr / 1.34) * 5 ** (-0.2)
        assert silverman_bandwidth(values) == pytest.approx(expected, rel=1e-12)

    def test_identical_values_need_explicit_bandwidth(self):
        with pytest.raises(ValueError, match="bandwidth"):
            kernel_density([2.0, 2.0, 2.0])
        grid, density = kernel_density([2.0, 2.0, 2.0], bandwidth=0.5)
        assert np.all(np.isfinite(density))

    def test_bad_inputs(self):
        with pytest.raises(ValueError, match="at least one"):
            kernel_density([])
        with pytest.raises(ValueError, match="finite"):
            kernel_density([1.0, float("nan")])
        with pytest.raises(ValueError, match="at least 2"):
            kernel_density([1.0])  # auto bandwidth needs spread
        with pytest.raises(ValueError, match="positive"):
            kernel_density([1.0, 2.0], bandwidth=0.0)


class TestPearson:
    def test_exact_antirelation(self):
        assert pearson([1.0, 2.0, 3.0], [6.0, 4.0, 2.0]) == pytest.approx(-1.0, abs=1e-15)

    def test_direct_formula_value(self):
        expected = 3.0 / math.sqrt(2.0 * 14.0 / 3.0)
        assert pearson([1.0, 2.0, 3.0], [1.0, 2.0, 4.0]) == pytest.approx(expected, abs=1e-12)

    def test_self_correlation_is_one(self, rng):
        x = rng.normal(size=20)
        assert pearson(x, x) == pytest.approx(1.0, abs=1e-15)

    def test_affine_invariance(self, rng):
        x = rng.normal(size=50)
        y = rng.normal(size=50)
        base = pearson(x, y)
        assert pearson(3.0 * x + 7.0, y) == pytest.approx(base, abs=1e-12)
        assert pearson(x, 0.2 * y - 4.0) == pytest.approx(base, abs=1e-12)

    def test_matches_numpy(self, rng):
        for _ in range(20):
            x = rng.normal(size=30)
            y = 0.4 * x + rng.normal(size=30)
            assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1], abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError, match="equal length"):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError, match="zero variance"):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(ValueError, match="at least 2"):
            pearson([1.0], [1.0])


def rows_from(table: dict[str, dict[str, float]]) -> list[StudyRow]:
    rows = []
    for instrument, variants in table.items():
        for variant, value in variants.items():
            rows.append(StudyRow(instrument, variant, value, 100))
    return rows


class TestCorrelationMatrix:
    def test_identical_and_negated_variants(self):
        table = {
            f"I{i}": {"a": v, "b": v, "c": -v}
            for i, v in enumerate([0.1, 0.5, 0.9, 0.3])
        }
        matrix, kept, dropped = correlation_matrix(rows_from(table), ["a", "b", "c"])
        assert matrix[0, 1] == pytest.approx(1.0, abs=1e-15)
        assert matrix[0, 2] == pytest.approx(-1.0, abs=1e-15)
        assert kept == ["I0", "I1", "I2", "I3"]
        assert dropped == []

    def test_matches_pairwise_calls(self, rng):
        names = [f"I{i}" for i in range(12)]
        series = {v: rng.normal(size=12) for v in ("a", "b", "c")}
        table = {
            name: {v: float(series[v][i]) for v in series} for i, name in enumerate(names)
        }
        matrix, kept, _ = correlation_matrix(rows_from(table), ["a", "b", "c"])
        for i, va in enumerate(("a", "b", "c")):
            for j, vb in enumerate(("a", "b", "c")):
                if i == j:
                    assert matrix[i, j] == 1.0
                else:
                    assert matrix[i, j] == pytest.approx(pearson(series[va], series[vb]))

    def test_symmetric_with_exact_unit_diagonal(self, rng):
        table = {f"I{i}": {"a": rng.normal(), "b": rng.normal()} for i in range(9)}
        matrix, _, _ = correlation_matrix(rows_from(table))
        assert np.array_equal(matrix, matrix.T)
        assert np.all(np.diag(matrix) == 1.0)
        assert np.all(np.abs(matrix) <= 1.0)

    def test_incomplete_instruments_dropped_and_reported(self):
        table = {
            "FULL1": {"a": 0.1, "b": 0.7},
            "PART": {"a": 0.2},
            "FULL2": {"a": 0.9, "b": 0.2},
        }
        matrix, kept, dropped = correlation_matrix(rows_from(table), ["a", "b"])
        assert kept == ["FULL1", "FULL2"]
        assert dropped == ["PART"]

    def test_fewer_than_two_common_instruments_rejected(self):
        table = {"ONLY": {"a": 0.1, "b": 0.2}, "PART": {"a": 0.3}}
        with pytest.raises(ValueError, match="fewer than 2"):
            correlation_matrix(rows_from(table), ["a", "b"])

    def test_fewer_than_two_variants_rejected(self):
        with pytest.raises(ValueError, match="2 variants"):
            correlation_matrix(rows_from({"I": {"a": 0.5}}), ["a"])


class TestDeltaSummary:
    def test_variant_name_round_trip(self):
        for delta in (0.05, 0.1, 0.25, 0.5, 0.75, 1.0):
            assert parse_delta_variant(variant_name(delta)) == delta
        assert parse_delta_variant("orig2") is None

    def test_single_instrument_means_are_values(self):
        rows = [
            StudyRow("I", "delta_0.05", 0.13, 500),
            StudyRow("I", "delta_1", 0.32, 40),
            StudyRow("I", "orig2", 0.99, 1000),
        ]
        assert delta_summary(rows) == [(0.05, 0.13), (1.0, 0.32)]

    def test_mean_over_instruments(self):
        rows = [
            StudyRow("A", "delta_0.5", 0.2, 10),
            StudyRow("B", "delta_0.5", 0.4, 10),
        ]
        assert delta_summary(rows) == [(0.5, pytest.approx(0.3))]

    def test_table_layout(self):
        text = format_summary_table([(0.05, 0.13), (1.0, 0.32)])
        lines = text.splitlines()
        assert lines[0].split() == ["delta", "mean_entropy"]
        assert lines[1].split() == ["0.05", "0.13"]
        assert lines[2].split() == ["1", "0.32"]
