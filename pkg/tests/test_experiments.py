import numpy as np
import pytest

from swarmrank import (
    ExperimentResult,
    SweepSpec,
    benchmark_speedup,
    iteration_trend_check,
    pearson,
    run_sweep,
    theoretical_speedup,
)


class TestPearson:
    def test_identity(self):
        a = np.array([0.1, 0.4, 0.2, 0.3])
        assert pearson(a, a) == pytest.approx(1.0)

    def test_affine_invariance(self):
        a = np.array([1.0, 5.0, 2.0, 7.0])
        assert pearson(a, 2.0 * a + 3.0) == pytest.approx(1.0)

    def test_reversal(self):
        assert pearson([1.0, 2.0, 3.0], [3.0, 2.0, 1.0]) == pytest.approx(-1.0)

    def test_constant_vector_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_short_vector_rejected(self):
        with pytest.raises(ValueError):
            pearson([1.0], [2.0])

    def test_mismatched_length_rejected(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0, 2.0, 3.0])


class TestTheoreticalSpeedup:
    def test_reported_optimum(self):
        assert theoretical_speedup(2575, 22.7, 0.45, 1000, 1, 8) == pytest.approx(
            14.43, abs=0.01
        )

    def test_full_seeding_twenty_iterations(self):
        assert theoretical_speedup(2575, 20, 1.0, 1000, 1, 20) == pytest.approx(
            2.45, abs=0.01
        )

    def test_zero_iteration_limit(self):
        assert theoretical_speedup(100, 10, 0.5, 10, 2, 0) == pytest.approx(
            100 * 10 / (0.5 * 10 * 2)
        )

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            theoretical_speedup(0, 10, 0.5, 10, 1, 5)
        with pytest.raises(ValueError):
            theoretical_speedup(100, 10, 0.0, 10, 1, 5)
        with pytest.raises(ValueError):
            theoretical_speedup(100, 10, 0.5, 10, 1, -1)


class TestSweeps:
    def test_unknown_experiment_rejected(self):
        with pytest.raises(ValueError, match="unknown experiment"):
            SweepSpec("FIG9")

    def test_row_shape_and_reproducibility(self):
        spec = SweepSpec("FIG3A", node_count=250, trials=2, rng_seed=7,
                         iteration_grid=(2, 5))
        first = run_sweep(spec)
        second = run_sweep(spec)
        assert first.columns == ["iterations", "alpha", "trial", "pearson",
                                 "reference_iterations", "wall_time", "error"]
        assert len(first.rows) == 4
        for a, b in zip(first.rows, second.rows):
            assert a[:4] == b[:4]  # identical up to wall-clock jitter

    def test_more_iterations_help(self):
        spec = SweepSpec("FIG3A", node_count=500, trials=3, rng_seed=1,
                         iteration_grid=(1, 12))
        result = run_sweep(spec)
        assert result.mean_pearson(iterations=12) > result.mean_pearson(iterations=1)

    def test_error_rows_do_not_abort(self):
        # phi low enough to select zero nodes on a small graph
        spec = SweepSpec("FIG3B", node_count=50, trials=1, rng_seed=2,
                         phi_grid=(0.001, 0.5))
        result = run_sweep(spec)
        errors = [row for row in result.rows if row[-1]]
        clean = [row for row in result.rows if not row[-1]]
        assert len(errors) == 1 and "ValueError" in errors[0][-1]
        assert len(clean) == 1

    def test_csv_round_trip(self, tmp_path):
        spec = SweepSpec("FIG1A", node_count=200, trials=1, rng_seed=3,
                         dampening_grid=(0.15, 0.9))
        result = run_sweep(spec)
        path = tmp_path / "out.csv"
        result.write_csv(path)
        loaded = ExperimentResult.read_csv("FIG1A", path)
        assert loaded.columns == result.columns
        assert len(loaded.rows) == len(result.rows)
        np.testing.assert_allclose(
            [row[loaded.columns.index("pearson")] for row in loaded.rows],
            [row[result.columns.index("pearson")] for row in result.rows],
        )

    def test_parallel_matches_serial(self):
        spec = SweepSpec("FIG3A", node_count=200, trials=2, rng_seed=5,
                         iteration_grid=(3,))
        serial = run_sweep(spec)
        parallel = run_sweep(spec, parallel=True, max_workers=2)
        for a, b in zip(serial.rows, parallel.rows):
            assert a[:4] == b[:4]

    def test_fig2b_runs_matched_roots(self):
        spec = SweepSpec("FIG2B", node_count=300, trials=2, rng_seed=11,
                         beta_grid=(0.5, 1.0))
        result = run_sweep(spec)
        assert len(result.rows) == 8
        # matched high back-probability pins both methods to the same roots
        assert result.mean_pearson(beta_swarm=1.0, beta_reference=1.0) >= 0.99

    def test_fig1b_and_fig2a_diagonals(self):
        spec = SweepSpec("FIG2A", node_count=400, trials=2, rng_seed=13,
                         delta_grid=(0.15,), dampening_grid=(0.15,))
        result = run_sweep(spec)
        assert result.mean_pearson(delta=0.15, dampening=0.15) >= 0.95


class TestBenchmark:
    def test_single_trial_report(self):
        report = benchmark_speedup(node_count=400, trials=1, rng_seed=3)
        assert report.trial_count == 1
        assert len(report.rows) == 1
        assert report.measured_ratio > 0
        assert report.theoretical > 0

    def test_theoretical_uses_measured_inputs(self):
        report = benchmark_speedup(node_count=400, trials=2, rng_seed=4)
        recomputed = theoretical_speedup(
            report.mean_edge_count, report.mean_reference_iterations,
            report.phi, 400, report.alpha, report.swarm_iterations,
        )
        assert report.theoretical == pytest.approx(recomputed)

    def test_csv_output(self, tmp_path):
        report = benchmark_speedup(node_count=300, trials=2, rng_seed=5)
        path = tmp_path / "speedup.csv"
        report.write_csv(path)
        text = path.read_text()
        assert "measured_ratio" in text and "theoretical" in text


class TestIterationTrend:
    def test_invalid_gamma_rejected(self):
        with pytest.raises(ValueError):
            iteration_trend_check([0.5], node_count=100, trials=1)

    def test_trend_at_desk_scale(self):
        table = iteration_trend_check([2.0, 3.0], trials=5, rng_seed=9)
        by_gamma = {row["gamma"]: row for row in table}
        assert 2 <= by_gamma[2.0]["swarm_iterations"] <= 5
        assert 4 <= by_gamma[3.0]["swarm_iterations"] <= 9
        for row in table:
            assert 0.1 <= row["ratio"] <= 0.5


class TestCostSurface:
    def test_optimum_sits_at_moderate_settings(self):
        # coarse scan of the seeding/iteration trade-off
        spec = SweepSpec(
            "FIG4", trials=4, rng_seed=21,
            phi_grid=(0.05, 0.1, 0.2, 0.35, 0.5, 0.7),
            iteration_grid=(1, 2, 4, 6, 8, 10, 14, 18, 25),
        )
        result = run_sweep(spec)
        best = None
        for phi in spec.phi_grid:
            for t in spec.iteration_grid:
                mean = result.mean_pearson(phi=phi, iterations=t)
                if mean >= 0.95:
                    cost = phi * t
                    if best is None or cost < best[0]:
                        best = (cost, phi, t)
        assert best is not None
        _, phi_star, t_star = best
        assert 0.2 <= phi_star <= 0.7
        assert 4 <= t_star <= 15
