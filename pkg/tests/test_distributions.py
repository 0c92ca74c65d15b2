import math
import unittest
from unittest import TestCase
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from distributions import cdf_geo, cdf_stationary_finite, cdf_two_param, corner_cdf, curve_mean, f_gue
from distributions.baik_rains import br_limit_check, f_br
from distributions.derivatives import CachedFunction, derivative, five_point
from distributions.finite import continuation_check
from distributions.limit import cdf_limit, moments_limit, pf_limit, scaling_convergence
from models.params import AsympParams, FiniteParams, GeoParams
from models.results import CurvePoint, DistributionCurve
from utils.exceptions import ParameterDomainError
from utils.io import curve_from_csv, curve_from_json, curve_to_csv, curve_to_json


def make_curve(pairs) -> DistributionCurve:
    return DistributionCurve(points=[CurvePoint(s=s, F=F, err=err) for s, F, err in pairs])


class TestDerivatives(TestCase):

    def test_five_point_exact_on_cubics(self):
        self.assertAlmostEqual(five_point(lambda s: s ** 3 - 2.0 * s, 2.0, 0.1), 10.0, places=10)

    def test_richardson(self):
        d = derivative(math.sin, 0.3, 0.1)
        self.assertAlmostEqual(d.value, math.cos(0.3), places=8)
        self.assertFalse(d.unstable)
        self.assertLess(d.err, 1e-6)

    def test_jump_is_flagged(self):
        d = derivative(lambda s: 0.0 if s < 0 else 1.0, 0.0, 0.1)
        self.assertTrue(d.unstable)

    def test_step_must_be_positive(self):
        with self.assertRaises(ValueError):
            derivative(math.sin, 0.0, 0.0)

    def test_cached_function(self):
        calls = []

        def G(s):
            calls.append(s)
            return s * s

        cached = CachedFunction(G)
        five_point(cached, 1.0, 0.1)
        five_point(cached, 1.1, 0.1)
        # the two stencils share 0.9 and 1.2
        self.assertEqual(cached.calls, 6)
        self.assertEqual(len(calls), 6)


class TestCurves(TestCase):

    def test_cdf_violations(self):
        good = make_curve([(0.0, 0.1, 0.0), (1.0, 0.5, 0.0), (2.0, 0.9, 0.0)])
        self.assertEqual(good.cdf_violations(), [])
        bad = make_curve([(0.0, 0.6, 0.0), (1.0, 0.5, 0.0), (2.0, 1.2, 0.0)])
        problems = bad.cdf_violations()
        self.assertEqual(len(problems), 2)
        self.assertTrue(any("decreases" in msg for msg in problems))
        self.assertEqual(bad.cdf_violations(slack=0.25), [])

    def test_error_bars_absorb_small_dips(self):
        curve = make_curve([(0.0, 0.5, 0.01), (1.0, 0.49, 0.01)])
        self.assertEqual(curve.cdf_violations(), [])

    def test_json_round_trip(self):
        curve = make_curve([(0.0, 0.25, 1e-9), (0.5, 0.75, 0.0)])
        curve.params["N"] = 4
        back = curve_from_json(curve_to_json(curve, config={"command": "cdf-finite"}))
        self.assertEqual(back.params, {"N": 4})
        self.assertEqual(back.F_values, curve.F_values)

    def test_csv_round_trip(self):
        curve = make_curve([(0.0, 0.25, 0.0), (0.5, 1.0 / 3.0, 0.0)])
        text = curve_to_csv(curve)
        self.assertTrue(text.startswith("s,F,err\n"))
        self.assertAlmostEqual(curve_from_csv(text).F_values[1], 1.0 / 3.0, places=14)

    def test_curve_mean(self):
        """Exp(1) has mean 1"""
        s = np.linspace(0.05, 40.0, 2000)
        curve = make_curve([(x, 1.0 - math.exp(-x), 0.0) for x in s])
        self.assertAlmostEqual(curve_mean(curve), 1.0, places=3)


class TestFiniteDistributions(TestCase):

    def test_negative_s_rejected(self):
        with self.assertRaises(ParameterDomainError):
            cdf_two_param([-1.0, 2.0], FiniteParams(N=2, alpha=0.1, beta=0.3), threads=1)

    def test_stationary_takes_no_beta(self):
        with self.assertRaises(ParameterDomainError):
            cdf_stationary_finite([1.0], FiniteParams(N=2, alpha=0.1, beta=0.3), threads=1)

    def test_two_param_curve_is_a_cdf(self):
        curve = cdf_two_param([6.0, 1.0, 3.0], FiniteParams(N=2, alpha=0.1, beta=0.3), threads=1)
        self.assertEqual(curve.s_values, [1.0, 3.0, 6.0])
        self.assertEqual(curve.cdf_violations(slack=1e-6), [])
        self.assertEqual(curve.method["formula"], "two_param")

    def test_continuation_runs_for_both_signs_of_alpha(self):
        for alpha in (0.1, -0.2):
            p = FiniteParams(N=3, n=1, alpha=alpha)
            result = continuation_check(p.mean(), p)
            self.assertEqual(result.check, "continuation")
            self.assertTrue(math.isfinite(result.value))
            self.assertLess(result.value, 0.1)


class TestLimitDistribution(TestCase):

    def setUp(self):
        self.p = AsympParams(delta=0.0, u=0.5)

    def test_left_tail_pfaffian(self):
        far = pf_limit(-6.0, self.p)
        self.assertGreater(far, 0.0)
        self.assertLess(far, 1e-3)
        near = pf_limit(-1.0, self.p)
        self.assertGreater(near, far)
        self.assertLess(near, 1.0)

    def test_limit_curve_is_a_cdf(self):
        curve = cdf_limit([-3.0, -1.0, 0.0, 1.0, 3.0], self.p, threads=1)
        self.assertEqual(curve.cdf_violations(slack=1e-4), [])
        self.assertTrue(all(-1e-4 <= F <= 1.0 + 1e-4 for F in curve.F_values))
        self.assertLess(curve.F_values[0], curve.F_values[1])

    def test_second_moment(self):
        m2 = moments_limit(self.p, 2)
        self.assertTrue(math.isfinite(m2))
        self.assertGreater(m2 - self.p.mean() ** 2, 0.0)

    def test_negative_delta_variants_agree(self):
        p = AsympParams(delta=-0.5, u=1.0)
        standard = cdf_limit([-1.0], p, "standard", threads=1).F_values[0]
        simplified = cdf_limit([-1.0], p, "delta_neg", threads=1).F_values[0]
        self.assertAlmostEqual(standard, simplified, delta=5e-4)

    def test_scaling_convergence_small_sizes(self):
        result = scaling_convergence(self.p, N_values=(20, 40), tolerance=1.0)
        self.assertEqual(result.check, "scaling_convergence")
        self.assertTrue(math.isfinite(result.value))


class TestBaikRains(TestCase):

    def test_reference_values(self):
        for s, expected in ((-2.0, 0.0204), (0.0, 0.5235), (2.0, 0.9599)):
            self.assertAlmostEqual(f_br(s), expected, delta=2e-3)

    def test_tau_symmetry(self):
        self.assertAlmostEqual(f_br(0.5, 0.5), f_br(0.5, -0.5), delta=1e-6)

    def test_stationary_path_tends_to_baik_rains(self):
        result = br_limit_check(3.0, 0.0)
        self.assertEqual(result.status, "pass", result.details)


class TestGeometricDistribution(TestCase):

    def test_single_site_closed_form(self):
        p = GeoParams(a=0.5, b=0.6, q=0.3, N=1)
        curve = cdf_geo([0, 1, 2, 4], p, threads=1)
        for point in curve.points:
            self.assertAlmostEqual(point.F, corner_cdf(int(point.s), p), delta=1e-6)

    def test_s_must_be_nonnegative_integer(self):
        p = GeoParams(a=0.5, b=0.6, q=0.3, N=2)
        with self.assertRaises(ParameterDomainError) as context:
            cdf_geo([-1, 1.5], p, threads=1)
        self.assertEqual(len(context.exception.errors), 2)


class TestGue(TestCase):

    def test_gue_at_zero(self):
        self.assertAlmostEqual(f_gue(0.0), 0.9694, delta=5e-4)


if __name__ == "__main__":
    unittest.main()
