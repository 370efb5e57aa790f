import json

import numpy as np
import pytest

from cli.config import ExperimentConfig
from cli.experiments import point_mass_trial, run_experiment, sandwich_trial, symmetric_trial
from cli.preprocess import preprocess_trial, run_preprocess
from cli.theory_runner import run_theory
from utils.exceptions import ConfigError
from tests.helpers import requires_mnist


class TestConfig:

    def test_defaults(self):
        config = ExperimentConfig("mnist")
        assert (config.m, config.L, config.K, config.trials) == (500, 10, 4, 10)
        assert config.seeds == list(range(10))

    def test_seed_base(self):
        assert ExperimentConfig("sandwich", seed_base=7, trials=3).seeds == [7, 8, 9]

    def test_theory_runs_once(self):
        config = ExperimentConfig("moments")
        assert config.trials == 1 and config.samples == 1_000_000

    @pytest.mark.parametrize("fields", [{"m": 0}, {"variant": "both"}, {"workers": 0},
                                        {"seeds": [1, 2], "trials": 3}])
    def test_invalid(self, fields):
        with pytest.raises(ConfigError):
            ExperimentConfig("sandwich", **fields).validate()

    def test_symmetric_needs_pairs(self):
        with pytest.raises(ConfigError):
            ExperimentConfig("symmetric", m=41).validate()

    @pytest.mark.parametrize("fields", [{"angle12": 2.0}, {"angle12": 0.0}, {"count1": 0}])
    def test_invalid_point_masses(self, fields):
        with pytest.raises(ConfigError):
            ExperimentConfig("point-mass", **fields).validate()

    def test_missing_mnist(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ExperimentConfig("mnist", data_dir=tmp_path).validate()


class TestTrials:

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_sandwich_first_application(self, seed):
        """Every pattern holds at least as many red as blue points, so everything is called red"""
        result = sandwich_trial(ExperimentConfig("sandwich", K=1), seed)
        assert result["accuracies"] == [pytest.approx(2 / 3)]

    @pytest.mark.parametrize("seed", range(5))
    def test_point_mass_closed_form(self, seed):
        result = point_mass_trial(ExperimentConfig("point-mass", K=3), seed)
        assert result["max_error"] <= 1e-12
        assert len(result["accuracies"]) == 3

    def test_equal_point_masses(self):
        config = ExperimentConfig("point-mass", count1=6, count2=6, angle12=np.pi / 4)
        for seed in range(3):
            result = point_mass_trial(config, seed)
            assert result["max_error"] <= 1e-12
            if result["j"] >= 1:
                assert result["angle"] == pytest.approx(np.pi / 2)
                assert result["accuracies"] == [1.0] * 5

    @pytest.mark.parametrize("seed", range(10))
    def test_symmetric_margin(self, seed):
        result = symmetric_trial(ExperimentConfig("symmetric"), seed)
        assert result["max_error"] <= 1e-10
        assert result["accuracy_separated"] == 1.0

    def test_preprocess_trial(self):
        result = preprocess_trial(ExperimentConfig("preprocess"), 0, 100, 1)
        assert 0.5 <= result["raw_svm_test_accuracy"] <= 0.8
        assert not result["raw_separable"]
        assert result["features"]["train"].shape == (2, 200)


class TestReports:

    def test_point_mass_report(self, tmp_path):
        summary = run_experiment(ExperimentConfig("point-mass", trials=4, out_dir=tmp_path, check=True))
        assert all(summary["checks"].values())
        assert (tmp_path / "point_mass.csv").exists()
        assert json.loads((tmp_path / "summary.json").read_text())["experiment"] == "point-mass"

    def test_worker_count_does_not_change_output(self, tmp_path):
        run_experiment(ExperimentConfig("sandwich", K=2, trials=3, out_dir=tmp_path / "one"))
        run_experiment(ExperimentConfig("sandwich", K=2, trials=3, out_dir=tmp_path / "two", workers=2))
        assert (tmp_path / "one" / "accuracy.csv").read_bytes() == (tmp_path / "two" / "accuracy.csv").read_bytes()

    def test_separation_report(self, tmp_path):
        summary = run_theory(ExperimentConfig("separation", out_dir=tmp_path, check=True))
        assert all(summary["checks"].values())
        assert (tmp_path / "separation.csv").exists()

    def test_moment_report(self, tmp_path):
        summary = run_theory(ExperimentConfig("moments", samples=100_000, out_dir=tmp_path))
        assert summary["constants"]["C1"] == pytest.approx(2 * np.log(2) - 1)
        assert (tmp_path / "moments.csv").exists()


@pytest.mark.slow
class TestAcceptance:

    def test_sandwich_improves_with_iterations(self, tmp_path):
        summary = run_experiment(ExperimentConfig("sandwich", out_dir=tmp_path, check=True))
        means = summary["mean_accuracy"]
        assert means[0] == pytest.approx(2 / 3)
        assert 0.87 <= means[6] <= 1.0
        assert len(summary["checks"]) == 3 and all(summary["checks"].values())

    def test_bound_grid(self, tmp_path):
        summary = run_theory(ExperimentConfig("bounds", out_dir=tmp_path, check=True))
        assert all(summary["checks"].values())

    def test_score_features_beat_raw_points(self, tmp_path):
        summary = run_preprocess(ExperimentConfig("preprocess", trials=5, out_dir=tmp_path, check=True))
        assert len(summary["checks"]) == 3 and all(summary["checks"].values())

    @requires_mnist
    def test_mnist_second_layer(self, tmp_path):
        config = ExperimentConfig("mnist", trials=3, train_per_class=200, out_dir=tmp_path, check=True)
        means = run_experiment(config)["mean_accuracy"]
        assert means[0] >= 0.80 and means[1] >= means[0]

    @requires_mnist
    def test_rhat_overfits_rtilde_does_not(self, tmp_path):
        config = ExperimentConfig("rhat-vs-rtilde", trials=3, train_per_class=200, out_dir=tmp_path, check=True)
        summary = run_experiment(config)
        assert all(summary["checks"].values())
