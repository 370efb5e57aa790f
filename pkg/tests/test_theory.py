import math

import numpy as np
import pytest
from scipy import integrate

from theory import bounds
from theory.bounds import CONSTANTS, WedgeConfig
from utils.exceptions import ConfigError, UndefinedAngleError

LN2 = math.log(2.0)


class TestConstants:

    def test_closed_forms(self):
        assert CONSTANTS.C1 == pytest.approx(2 * LN2 - 1, abs=1e-15)
        assert CONSTANTS.C2 == pytest.approx(10 * LN2 ** 2 - 14 * LN2 + 5, abs=1e-15)
        assert CONSTANTS.C3 == pytest.approx(4 * (1 - LN2) * (3 * LN2 - 2), abs=1e-15)
        assert CONSTANTS.C4 == pytest.approx(-10 * LN2 ** 2 + 8 * LN2 - 2 / 3, abs=1e-15)

    def test_rounded_values(self):
        assert CONSTANTS.C1 == pytest.approx(0.38629, abs=1e-5)
        assert CONSTANTS.C2 == pytest.approx(0.1005, abs=1e-3)
        assert CONSTANTS.C3 == pytest.approx(0.0975, abs=1e-3)
        assert CONSTANTS.C4 == pytest.approx(0.0740, abs=1e-3)


class TestAngle:

    def test_orthogonal(self):
        assert bounds.angle([1, 0], [0, 1]) == pytest.approx(np.pi / 2)
        assert bounds.angle([7, 0], [0, 7]) == pytest.approx(np.pi / 2)

    def test_unequal_point_mass_example(self):
        assert bounds.angle([16 / 3, 2 / 3], [4 / 3, 14 / 3]) == pytest.approx(1.168, abs=1e-3)

    def test_symmetric_and_parallel(self, rng):
        v1, v2 = rng.random(4), rng.random(4)
        assert bounds.angle(v1, v2) == pytest.approx(bounds.angle(v2, v1))
        assert bounds.angle(v1, 3 * v1) == pytest.approx(0.0, abs=1e-7)
        assert bounds.angle(v1, v2) <= np.pi / 2

    def test_zero_vector(self):
        with pytest.raises(UndefinedAngleError):
            bounds.angle([0, 0], [1, 0])


class TestPointMassScores:

    def test_equal(self):
        g1, g2 = bounds.equal_point_mass_scores(5)
        np.testing.assert_array_equal(g1, [5, 0])
        np.testing.assert_array_equal(g2, [0, 5])
        assert bounds.angle(g1, g2) == pytest.approx(np.pi / 2)

    def test_no_separation(self):
        g1, g2 = bounds.equal_point_mass_scores(0)
        with pytest.raises(UndefinedAngleError):
            bounds.angle(g1, g2)

    def test_unequal(self):
        g1, g2 = bounds.unequal_point_mass_scores(10, 4, 2, 1)
        np.testing.assert_allclose(g1, [16 / 3, 2 / 3], atol=1e-12)
        np.testing.assert_allclose(g2, [4 / 3, 14 / 3], atol=1e-12)

    def test_equal_masses_reduce_to_equal_case(self):
        for j in range(6):
            for got, expected in zip(bounds.unequal_point_mass_scores(10, j, 3, 3), bounds.equal_point_mass_scores(j)):
                np.testing.assert_array_equal(got, expected)

    def test_no_separating_hyperplane_collapses(self):
        g1, g2 = bounds.unequal_point_mass_scores(10, 0, 2, 1)
        assert bounds.angle(g1, g2) == pytest.approx(0.0, abs=1e-7)
        np.testing.assert_allclose(g1 / g1[1], [2, 1])


class TestSecondIterationSeparation:

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 5.0])
    def test_all_separating(self, c):
        assert bounds.second_iteration_separation(1.0, c) == pytest.approx(np.pi / 2)

    def test_equal_masses_constant(self):
        for frac in np.linspace(0.05, 1.0, 20):
            assert bounds.second_iteration_separation(frac, 1.0) == pytest.approx(np.pi / 2)

    def test_known_value(self):
        assert bounds.second_iteration_separation(0.3, 2.0) == pytest.approx(1.0112, abs=1e-3)
        assert bounds.separation_finite(10, 3, 2, 1) == pytest.approx(bounds.second_iteration_separation(0.3, 2.0))

    @pytest.mark.parametrize("c", [1.2, 2.0, 5.0])
    def test_increasing_in_fraction(self, c):
        curve = [bounds.second_iteration_separation(f, c) for f in np.linspace(0.05, 1.0, 20)]
        assert np.all(np.diff(curve) > 0)

    def test_curve_marks_undefined(self):
        rows = bounds.separation_curve([0.0, 0.5], [1.0])
        assert math.isnan(rows[0]["angle"])
        assert rows[1]["angle"] == pytest.approx(np.pi / 2)


class TestSymmetricMargin:

    def test_example(self):
        assert bounds.symmetric_margin(10, 2, (3, 5)) == pytest.approx(2 + (7 / 13) ** 2 + (5 / 15) ** 2)
        assert bounds.symmetric_margin(10, 2, (3, 5)) == pytest.approx(2.401, abs=1e-3)

    def test_no_inner_hyperplanes(self):
        assert bounds.symmetric_margin(10, 0, []) == 0.0

    def test_full_counts(self):
        assert bounds.symmetric_margin(6, 3, (6, 6, 6)) == 3.0

    def test_at_least_j(self, rng):
        for _ in range(50):
            j = int(rng.integers(1, 6))
            s = rng.integers(0, 11, size=j)
            assert bounds.symmetric_margin(10, j, s) >= j

    def test_count_mismatch(self):
        with pytest.raises(ValueError):
            bounds.symmetric_margin(10, 2, (1,))


class TestWedgeScores:

    def test_no_intersecting_hyperplanes(self):
        g1, g2 = bounds.sample_wedge_scores(WedgeConfig(0, 0, 7), seed=0)
        np.testing.assert_array_equal(g1, [7, 0])
        np.testing.assert_array_equal(g2, [0, 7])
        assert bounds.angle(g1, g2) == pytest.approx(np.pi / 2)

    def test_forced_unit_positions(self):
        cfg = WedgeConfig(4, 3, 5)
        g1, g2 = bounds.sample_wedge_scores(cfg, seed=0, u=np.ones(4), u_prime=np.ones(3))
        np.testing.assert_array_equal(g1, [5, 0])
        np.testing.assert_array_equal(g2, [0, 5])

    def test_simulation_matches_single_draw_formula(self):
        sums = bounds.simulate_wedge_sums(3, 2, 5, seed=1)
        g1, g2 = sums.scores(4)
        assert g1.shape == (5, 2) and np.all(g1 >= 0) and np.all(g2 >= 0)
        np.testing.assert_allclose(g1[:, 0] - g2[:, 0], 4.0)

    def test_simulation_is_deterministic(self):
        a = bounds.simulate_wedge(WedgeConfig(10, 10, 50), n=1000, seed=3)
        b = bounds.simulate_wedge(WedgeConfig(10, 10, 50), n=1000, seed=3)
        np.testing.assert_array_equal(a.angles, b.angles)

    def test_angle_trends(self):
        def mean_angle(k, j):
            return bounds.simulate_wedge(WedgeConfig(k, k, j), n=20_000, seed=0).angles.mean()
        assert mean_angle(10, 50) > mean_angle(50, 50)
        assert mean_angle(10, 100) > mean_angle(10, 50)

    def test_zero_separating_simulation(self):
        with pytest.raises(ConfigError):
            bounds.simulate_wedge(WedgeConfig(3, 3, 0), n=10)


class TestBounds:

    def test_expected_cos_bound_example(self):
        assert bounds.expected_cos_bound(WedgeConfig(10, 10, 50)) == pytest.approx(0.1674, abs=1e-3)

    def test_no_intersecting_hyperplanes(self):
        assert bounds.expected_cos_bound(WedgeConfig(0, 0, 10)) == 0.0
        assert bounds.theorem1_bound(WedgeConfig(0, 0, 10), np.pi / 8) == 0.0

    def test_angle_bound_example(self):
        assert bounds.theorem1_bound(WedgeConfig(10, 10, 50), np.pi / 4) == pytest.approx(0.2368, abs=1e-3)

    def test_clamping(self):
        cfg = WedgeConfig(100, 100, 10)
        assert bounds.theorem1_bound(cfg, np.pi / 4) == 1.0
        assert bounds.theorem1_bound(cfg, np.pi / 4, clamp=False) > 1.0

    def test_requires_equal_wedges(self):
        with pytest.raises(ConfigError):
            bounds.expected_cos_bound(WedgeConfig(5, 5, 10, a1=0.1, a2=0.2))

    def test_angle_range(self):
        with pytest.raises(ValueError):
            bounds.theorem1_bound(WedgeConfig(5, 5, 10), np.pi / 2)

    @pytest.mark.parametrize("k,j", [(10, 50), (50, 100), (5, 10)])
    def test_cosine_right_hand_side_mean(self, k, j):
        cfg = WedgeConfig(k, k, j)
        rhs = bounds.simulate_wedge(cfg, n=100_000, seed=4).cos_rhs
        stderr = rhs.std(ddof=1) / np.sqrt(len(rhs))
        assert abs(rhs.mean() - bounds.expected_cos_bound(cfg)) <= 4 * stderr

    def test_dominance_on_small_grid(self):
        rows = bounds.bound_table((0, 10, 50), (10, 50), (np.pi / 8, np.pi / 4), samples=20_000, seed=0)
        assert len(rows) == 12
        assert all(row["dominated"] for row in rows)
        assert all(row["bound"] == 0 and row["empirical"] == 0 for row in rows if row["k"] == 0)


class TestMomentIntegrals:

    def test_closed_forms(self):
        np.testing.assert_allclose(bounds.appendix_expectations(),
                                   [3 * LN2 - 2, 1 - LN2, 25 / 6 - 6 * LN2, 1 / 6], atol=1e-15)

    def test_quadrature(self):
        for (_, f), exact in zip(bounds.INTEGRANDS, bounds.appendix_expectations()):
            value, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
            assert abs(value - exact) < 1e-10

    def test_report(self):
        rows = bounds.moment_report(samples=200_000, seed=1)
        assert len(rows) == 6
        for row in rows[:4]:
            assert abs(row["quadrature"] - row["closed_form"]) < 1e-10
        for row in rows:
            assert abs(row["mc_mean"] - row["closed_form"]) <= 4 * row["mc_stderr"]
