import math

import numpy as np
import pytest

import isacrd as ir


def binary_surface(q=0.5, d0_grid=(0.1, 0.25), n_mu=12):
    model = ir.build_binary_multiplicative_channel(q)
    grid = ir.default_mu_grid(n_mu, include_zero=True)
    return model, ir.sweep_region(model, np.asarray(d0_grid, dtype=float), mu_grid=grid)


class TestSweepRegion:
    def test_unconstraining_budget_matches_closed_forms(self):
        model, surface = binary_surface(q=0.5, d0_grid=(0.25,), n_mu=20)
        group = surface.groups[0]
        assert group.c_bits == pytest.approx(0.5, abs=1e-6)
        np.testing.assert_allclose(group.px_star, [0.5, 0.5], atol=1e-6)
        for point in group.points:
            expected = ir.binary_mult_rate(0.5, 0.5, point.d)
            assert point.r_bits == pytest.approx(expected, abs=1e-4)

    def test_minimum_budget_concentrates_on_revealing_input(self):
        model, surface = binary_surface(q=0.5, d0_grid=(0.0,), n_mu=8)
        group = surface.groups[0]
        assert group.px_star[1] == pytest.approx(1.0, abs=1e-9)
        assert group.c_bits == pytest.approx(0.0, abs=1e-9)
        assert group.d_min == pytest.approx(0.0, abs=1e-12)

    def test_steep_end_meets_deterministic_estimator(self):
        model = ir.build_binary_multiplicative_channel(0.3)
        surface = ir.sweep_region(model, np.array([0.05, 0.15]),
                                  mu_grid=ir.default_mu_grid(10))
        for group in surface.groups:
            steepest = group.points[0]
            assert steepest.d == pytest.approx(group.d_min, abs=1e-3)
            assert math.isfinite(steepest.r_bits)

    def test_infeasible_budgets_skipped_with_record(self):
        model = ir.build_binary_multiplicative_channel(0.5)
        with pytest.warns(UserWarning):
            surface = ir.sweep_region(model, np.array([-0.2, 0.2, 0.9]),
                                      mu_grid=np.array([-1.0, 0.0]))
        assert len(surface.groups) == 1
        assert len(surface.skipped) == 2
        skipped_budgets = sorted(d0 for d0, _ in surface.skipped)
        assert skipped_budgets == [-0.2, 0.9]

    def test_curve_matches_trace_curve_exactly(self):
        model, surface = binary_surface(q=0.5, d0_grid=(0.15,), n_mu=10)
        group = surface.groups[0]
        redo = ir.trace_curve(model, group.px_star, group.curve.mu_grid)
        assert redo.content_hash() == group.curve.content_hash()

    def test_triples_satisfy_the_outer_bounds(self):
        model, surface = binary_surface(q=0.3, d0_grid=(0.1,), n_mu=10)
        group = surface.groups[0]
        # capacity bound: recompute the objective at the maximizer
        assert group.c_bits == pytest.approx(
            ir.conditional_mi_xy_given_s(model, group.px_star), abs=1e-9
        )
        # rate and distortion bounds: every point dominates the swept curve
        for point in group.points:
            assert point.d >= group.d_min - 1e-9
            assert point.r_bits >= -1e-12
            floor = ir.rate_at_distortion(model, group.px_star,
                                          min(point.d, ir.zero_rate_distortion(model)),
                                          tol=1e-6)
            assert point.r_bits >= floor.rate_bits - 1e-3

    def test_rate_monotone_within_groups(self):
        _, surface = binary_surface(q=0.3, d0_grid=(0.05, 0.15, 0.3), n_mu=15)
        for group in surface.groups:
            rates = [p.r_bits for p in group.points]
            assert all(b <= a + 1e-8 for a, b in zip(rates, rates[1:]))


class TestExportRegion:
    def test_singleton_two_line_csv(self):
        model = ir.build_binary_multiplicative_channel(0.5)
        surface = ir.sweep_region(model, np.array([0.25]), mu_grid=np.array([0.0]))
        text = ir.export_region(surface)
        lines = text.strip().split("\n")
        assert len(lines) == 2
        assert lines[0] == "D0,B,C_bits,Dmin,D,R_bits,converged"

    def test_rows_sorted_and_round_trip(self):
        _, surface = binary_surface(q=0.5, d0_grid=(0.25, 0.1), n_mu=8)
        text = ir.export_region(surface)
        lines = text.strip().split("\n")[1:]
        parsed = [tuple(float(tok) for tok in line.split(",")) for line in lines]
        keys = [(row[0], row[4]) for row in parsed]
        assert keys == sorted(keys)
        by_budget = {}
        for row in parsed:
            by_budget.setdefault(row[0], []).append(row)
        for group in surface.groups:
            rows = by_budget[float(f"{group.d0:.12g}")]
            for row, point in zip(rows, group.points):
                assert row[2] == pytest.approx(point.c_bits, rel=1e-11, abs=1e-11)
                assert row[4] == pytest.approx(point.d, rel=1e-11, abs=1e-11)
                assert row[5] == pytest.approx(point.r_bits, rel=1e-11, abs=1e-11)

    def test_empty_surface_rejected(self):
        model = ir.build_binary_multiplicative_channel(0.5)
        with pytest.warns(UserWarning):
            surface = ir.sweep_region(model, np.array([-1.0]), mu_grid=np.array([0.0]))
        with pytest.raises(ValueError):
            ir.export_region(surface)

    def test_product_dmc_sweep(self):
        model = ir.build_product_dmc([1 / 3, 1 / 4, 1 / 4, 1 / 6])
        surface = ir.sweep_region(model, np.array([0.1, 0.4]),
                                  mu_grid=ir.default_mu_grid(8))
        assert len(surface.groups) == 2
        assert surface.all_converged
        text = ir.export_region(surface)
        assert text.count("\n") == 1 + len(surface.points)
