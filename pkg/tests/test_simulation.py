import math
import unittest
from unittest import TestCase
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from models.params import ModelParams, WeightMode
from simulation.lpp_sim import (
    DKW_ALPHA, MIN_CDF_SAMPLES, draw, dkw_band, empirical_cdf, gen_weights, increment_tests, lpp_time,
    lpp_time_brute, path_increment_test, quantile_grid, sample_cdf, sample_values, site_law, staircase_path,
)
from utils.exceptions import ParameterDomainError


def stationary(N: int = 4, n: int = 0, alpha: float = 0.1) -> ModelParams:
    return ModelParams(mode=WeightMode.STATIONARY, N=N, n=n, alpha=alpha)


class TestWeights(TestCase):

    def test_site_laws(self):
        m = stationary()
        self.assertEqual(site_law(m, 1, 1), ("zero", 0.0))
        self.assertEqual(site_law(m, 3, 1), ("exp", 0.4))
        self.assertEqual(site_law(m, 3, 3), ("exp", 0.6))
        self.assertEqual(site_law(m, 3, 2), ("exp", 1.0))
        two = ModelParams(mode=WeightMode.TWO_PARAM, N=4, alpha=0.1, beta=0.3)
        self.assertAlmostEqual(site_law(two, 1, 1)[1], 0.4)
        self.assertAlmostEqual(site_law(two, 2, 1)[1], 0.8)

    def test_geometric_site_laws(self):
        m = ModelParams(mode=WeightMode.GEOMETRIC, N=3, a=0.5, b=0.6, q=0.25)
        self.assertAlmostEqual(site_law(m, 1, 1)[1], 0.3)
        self.assertAlmostEqual(site_law(m, 2, 2)[1], 0.25)
        self.assertAlmostEqual(site_law(m, 2, 1)[1], 0.3)
        self.assertAlmostEqual(site_law(m, 3, 2)[1], 0.25)

    def test_draw_means(self):
        rng = np.random.default_rng(3)
        self.assertAlmostEqual(float(np.mean(draw("exp", 2.0, 200_000, rng))), 0.5, delta=0.01)
        geom = draw("geom", 0.5, 200_000, rng)
        self.assertTrue(np.all(geom == np.floor(geom)))
        self.assertAlmostEqual(float(np.mean(geom)), 1.0, delta=0.02)
        self.assertTrue(np.all(draw("zero", 0.0, 5, rng) == 0.0))

    def test_weight_field(self):
        W = gen_weights(stationary(N=4), seed=1)
        self.assertEqual(W[0, 0], 0.0)
        self.assertTrue(np.isnan(W[0, 1]))
        self.assertTrue(np.all(W[np.tril_indices(4)] >= 0.0))

    def test_invalid_model(self):
        with self.assertRaises(ParameterDomainError):
            gen_weights(stationary(alpha=0.6), seed=1)


class TestLastPassageTime(TestCase):

    def test_two_by_two(self):
        W = np.array([[0.0, np.nan], [3.0, 5.0]])
        self.assertEqual(lpp_time(W), 8.0)
        self.assertEqual(lpp_time(W, end=(2, 1)), 3.0)

    def test_single_site(self):
        self.assertEqual(lpp_time(np.array([[2.5]])), 2.5)

    def test_endpoint_must_be_in_half_space(self):
        W = np.zeros((3, 3))
        with self.assertRaises(ParameterDomainError):
            lpp_time(W, end=(1, 2))
        with self.assertRaises(ParameterDomainError):
            lpp_time(W, end=(4, 1))

    def test_dynamic_programming_matches_enumeration(self):
        rng = np.random.default_rng(11)
        for N in (2, 3, 5):
            W = np.tril(rng.exponential(size=(N, N)))
            for i in range(1, N + 1):
                for j in range(1, i + 1):
                    self.assertAlmostEqual(lpp_time(W, (i, j)), lpp_time_brute(W, (i, j)), places=12)


class TestSampling(TestCase):

    def test_same_seed_same_samples(self):
        m = stationary(N=5, n=1)
        first = sample_values(m, samples=3000, seed=7, threads=1, chunk_size=1000)
        again = sample_values(m, samples=3000, seed=7, threads=1, chunk_size=1000)
        np.testing.assert_array_equal(first, again)
        other = sample_values(m, samples=3000, seed=8, threads=1, chunk_size=1000)
        self.assertFalse(np.array_equal(first, other))

    def test_worker_count_does_not_change_samples(self):
        m = stationary(N=5)
        serial = sample_values(m, samples=3000, seed=7, threads=1, chunk_size=1000)
        parallel = sample_values(m, samples=3000, seed=7, threads=2, chunk_size=1000)
        np.testing.assert_array_equal(serial, parallel)

    def test_corner_coupling(self):
        m = ModelParams(mode=WeightMode.TWO_PARAM, N=4, alpha=0.1, beta=0.3)
        full = sample_values(m, "L_pf", samples=2000, seed=5, threads=1)
        reduced = sample_values(m, "L_pf_minus_corner", samples=2000, seed=5, threads=1)
        self.assertTrue(np.all(reduced <= full))
        self.assertTrue(np.any(reduced < full))

    def test_target_needs_two_param_model(self):
        with self.assertRaises(ParameterDomainError):
            sample_values(stationary(), "L_pf", samples=100, threads=1)
        with self.assertRaises(ParameterDomainError):
            sample_values(stationary(), "M", samples=100, threads=1)

    def test_sampling_budget_validated(self):
        with self.assertRaises(ParameterDomainError):
            sample_values(stationary(), samples=0, threads=1)

    def test_cdf_needs_enough_samples(self):
        with self.assertRaises(ParameterDomainError):
            sample_cdf(stationary(), samples=MIN_CDF_SAMPLES - 1, threads=1)

    def test_sample_cdf(self):
        summary = sample_cdf(stationary(N=4, n=1), samples=MIN_CDF_SAMPLES, seed=2, threads=1)
        self.assertEqual(len(summary.grid), 33)
        self.assertTrue(np.all(np.diff(summary.empirical_cdf) >= 0.0))
        self.assertAlmostEqual(summary.dkw_band, dkw_band(MIN_CDF_SAMPLES))
        self.assertLess(abs(summary.ks_stats["mean_z"]), 5.0)
        self.assertEqual(summary.mode, "stationary")

    def test_geometric_samples_are_integers(self):
        m = ModelParams(mode=WeightMode.GEOMETRIC, N=3, a=0.5, b=0.6, q=0.3)
        values = sample_values(m, samples=1000, seed=1, threads=1)
        np.testing.assert_array_equal(values, np.floor(values))


class TestEmpiricalCdf(TestCase):

    def test_empirical_cdf(self):
        np.testing.assert_allclose(empirical_cdf(np.array([3.0, 1.0, 2.0]), [0.0, 2.0, 5.0]), [0.0, 2.0 / 3.0, 1.0])

    def test_dkw_band(self):
        self.assertAlmostEqual(dkw_band(10_000), math.sqrt(math.log(2.0 / DKW_ALPHA) / 20_000.0))

    def test_discrete_quantile_grid(self):
        grid = quantile_grid(np.array([0.0, 1.0, 1.0, 2.0, 3.0] * 10), points=9, discrete=True)
        self.assertEqual(grid, sorted(set(grid)))
        self.assertTrue(all(float(s).is_integer() for s in grid))


class TestIncrements(TestCase):

    def test_increment_report_layout(self):
        report = increment_tests(stationary(), 1, 3, samples=2000, seed=4, threads=1)
        self.assertEqual(report.sites, ["H(4,2)", "V(4,2)", "X(3,1)"])
        self.assertEqual(set(report.ks_pvalues), {"H", "V", "X"})
        self.assertEqual(set(report.correlations), {"H,V", "H,X", "V,X"})
        self.assertAlmostEqual(report.corr_bound, 3.0 / math.sqrt(2000))

    def test_increment_vertex_validation(self):
        with self.assertRaises(ParameterDomainError):
            increment_tests(stationary(), 3, 3, samples=100, threads=1)
        two = ModelParams(mode=WeightMode.TWO_PARAM, N=4, alpha=0.1, beta=0.3)
        with self.assertRaises(ParameterDomainError):
            increment_tests(two, 1, 3, samples=100, threads=1)

    def test_staircase_path(self):
        self.assertEqual(staircase_path(3), [(3, 3), (4, 3), (4, 2), (5, 2), (5, 1)])
        with self.assertRaises(ParameterDomainError):
            staircase_path(1)

    def test_path_report_layout(self):
        report = path_increment_test(stationary(), K=2, samples=2000, seed=4, threads=1)
        self.assertEqual(report.sites, ["H0", "V1"])
        self.assertEqual(list(report.chi2_pvalues), ["H0,V1"])
        self.assertEqual(list(report.correlations), ["H0,V1"])
        self.assertTrue(all(value > 0.0 for value in report.ks_pvalues.values()))


if __name__ == "__main__":
    unittest.main()
