import math
import unittest
from unittest import TestCase
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
from scipy import special

from models.params import AsympParams, ContourSettings, FiniteParams
from numerics.contours import (
    ContourKind, PoleSpec, airy_node_count, check_separation, integrate, integrate2, make_airy, make_circle,
    make_origin_circle, make_pair, make_pole_contour, make_vertical, refine_until,
)
from numerics.special_funcs import (
    airy_transform, asymp_func, br_func, e_alpha, eps, f_pm, f_scal, g_finite, phi_cap, sinh_ratio,
)
from utils.exceptions import (
    ContourCollisionError, InfeasiblePoleSpecError, NoConvergenceError, NonFiniteIntegrandError,
    ParameterDomainError,
)


class TestContours(TestCase):

    def test_circle_winds_once(self):
        c = make_circle(PoleSpec(enclosed=(0.5,), excluded=(0.0,)), node_count=64)
        self.assertAlmostEqual(c.winding(0.5), 1.0, places=10)
        self.assertAlmostEqual(c.winding(0.0), 0.0, places=10)
        self.assertEqual(c.kind, ContourKind.CIRCLE)

    def test_residue_integral(self):
        c = make_circle(PoleSpec(enclosed=(0.5,), excluded=(0.0,)), node_count=64)
        value = integrate(lambda z: np.exp(z) / (z - 0.5), c)
        self.assertAlmostEqual(value.real, math.exp(0.5), places=10)
        self.assertAlmostEqual(value.imag, 0.0, places=10)

    def test_enclosed_and_excluded_point_is_infeasible(self):
        with self.assertRaises(InfeasiblePoleSpecError):
            make_circle(PoleSpec(enclosed=(0.5,), excluded=(0.5,)))
        with self.assertRaises(InfeasiblePoleSpecError):
            make_origin_circle(0.0)

    def test_separated_clusters_get_separate_circles(self):
        """An excluded point between two enclosed points splits the group"""
        c = make_pole_contour(PoleSpec(enclosed=(-1.0, 1.0), excluded=(0.0,)))
        self.assertEqual(len(c.geometry["circles"]), 2)
        self.assertAlmostEqual(c.winding(0.0), 0.0, places=8)
        value = integrate(lambda z: 1.0 / (z - 1.0) + 1.0 / (z + 1.0) + 1.0 / z, c)
        self.assertAlmostEqual(value.real, 2.0, places=8)

    def test_pair_is_disjoint(self):
        cz, cw = make_pair(PoleSpec(enclosed=(1.0,)), PoleSpec(enclosed=(-1.0,)))
        self.assertGreater(check_separation(cz, cw), 0.0)
        value = integrate2(lambda z, w: 1.0 / ((z - 1.0) * (w + 1.0) * (z - w)), cz, cw, singular=True)
        self.assertAlmostEqual(value.real, 0.5, places=8)

    def test_collision_detected(self):
        c = make_origin_circle(1.0, 32)
        with self.assertRaises(ContourCollisionError) as context:
            check_separation(c, c)
        self.assertEqual(context.exception.min_distance, 0.0)

    def test_non_finite_integrand(self):
        c = make_origin_circle(1.0, 8)
        with self.assertRaises(NonFiniteIntegrandError):
            integrate(lambda z: np.full(z.shape, np.nan), c)

    def test_airy_contour_gives_airy_function(self):
        """The down contour is oriented against the usual Airy integral"""
        xs = np.array([-2.0, 0.0, 1.0, 2.5])
        values = airy_transform(xs, 0.0, lambda z: np.ones_like(z), 0.5)
        np.testing.assert_allclose(-values, special.airy(xs)[0], atol=1e-7)

    def test_airy_nodes_follow_the_phase(self):
        base = airy_node_count(5.0)
        self.assertGreaterEqual(base, ContourSettings().airy_nodes)
        self.assertEqual(base % 4, 0)
        self.assertGreater(airy_node_count(5.0, anchor=-2.0), airy_node_count(5.0, anchor=-0.5))
        self.assertGreater(airy_node_count(5.0, anchor=1.0, quad=0.5), airy_node_count(5.0, anchor=1.0))
        self.assertGreater(airy_node_count(40.0), base)

    def test_airy_transform_with_distant_anchor(self):
        """Moving the ray start does not change the integral once the nodes follow the anchor"""
        xs = np.array([-6.0, -2.0, 0.0, 3.0])
        for anchor in (0.5, 1.0):
            values = airy_transform(xs, 0.0, lambda z: np.ones_like(z), anchor)
            np.testing.assert_allclose(-values, special.airy(xs)[0], atol=1e-9)

    def test_airy_direction_validation(self):
        with self.assertRaises(ValueError):
            make_airy("sideways", 0.0)

    def test_vertical_line_gaussian(self):
        c = make_vertical(0.5, 10.0, 96)
        x = 0.3
        value = integrate(lambda z: np.exp(z * z / 2.0 - x * z), c)
        self.assertAlmostEqual(value.real, math.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi), places=9)

    def test_refine_until(self):
        value, delta = refine_until(lambda n: 1.0 + 2.0 ** (-n), 1e-8)
        self.assertAlmostEqual(value.real, 1.0, places=8)
        self.assertLess(delta, 1e-8)
        with self.assertRaises(NoConvergenceError) as context:
            refine_until(lambda n: float(n), 1e-8, cap=256)
        self.assertIsNotNone(context.exception.achieved_tol)

    def test_contour_dump(self):
        data = make_origin_circle(0.5, 4).to_dict()
        self.assertEqual(data["kind"], "circle")
        self.assertEqual(len(data["nodes"]), 4)
        self.assertEqual(set(data["nodes"][0]), {"re", "im", "wre", "wim"})


class TestFiniteFunctions(TestCase):

    def test_phi_pole(self):
        with self.assertRaises(ParameterDomainError):
            phi_cap(1.0, 0.5, 3)
        self.assertAlmostEqual(abs(phi_cap(0.0, 0.5, 1)), 1.0)

    def test_f_pm_closed_form(self):
        p = FiniteParams(N=2, n=1, alpha=0.1)
        x = np.array([0.0, 1.0, 3.0])
        np.testing.assert_allclose(f_pm("plus", 0.2, x, p), np.exp(-0.2 * x) * 0.7, rtol=1e-12)
        np.testing.assert_allclose(f_pm("minus", 0.2, x, p), np.exp(-0.2 * x) * 0.7 / 0.3 / 0.7, rtol=1e-12)
        with self.assertRaises(ParameterDomainError):
            f_pm("plus", 0.5, x, p)

    def test_g2_single_site(self):
        """N = 1 leaves only the pole at alpha"""
        p = FiniteParams(N=1, alpha=0.2)
        x = np.linspace(0.0, 4.0, 9)
        np.testing.assert_allclose(g_finite("g2", x, p), np.exp(-0.2 * x), atol=1e-10)

    def test_g1_simple_pole(self):
        p = FiniteParams(N=2, alpha=0.1)
        x = np.linspace(0.0, 4.0, 9)
        np.testing.assert_allclose(g_finite("g1", x, p), -(0.5 + 0.1) * np.exp(-x / 2.0), atol=1e-10)

    def test_g_needs_beta(self):
        with self.assertRaises(ParameterDomainError):
            g_finite("g3", 1.0, FiniteParams(N=2, alpha=0.1))
        with self.assertRaises(ValueError):
            g_finite("g9", 1.0, FiniteParams(N=2, alpha=0.1))

    def test_e_alpha_single_site(self):
        p = FiniteParams(N=1, alpha=0.15)
        self.assertAlmostEqual(e_alpha(2.5, p), 2.5, places=9)

    def test_sinh_ratio_continuous_at_zero(self):
        t = np.array([-1.0, 0.5, 2.0])
        np.testing.assert_allclose(sinh_ratio(0.0, t), t)
        np.testing.assert_allclose(sinh_ratio(1e-9, t), t, rtol=1e-12)
        np.testing.assert_allclose(sinh_ratio(0.3, t), np.sinh(0.3 * t) / 0.3)

    def test_step_kernels_antisymmetric(self):
        p = FiniteParams(N=3, n=1, alpha=0.1)
        for kind in ("e0", "e1", "e2"):
            self.assertAlmostEqual(eps(kind, 1.0, 2.5, p), -eps(kind, 2.5, 1.0, p), places=10)
            self.assertEqual(eps(kind, 1.0, 1.0, p), 0.0)


class TestAsymptoticFunctions(TestCase):

    def test_f_scal(self):
        self.assertAlmostEqual(f_scal(1.0, 0.5, 0.2), math.exp(-0.125 / 3.0 - 0.05 + 0.5))

    def test_E0_antisymmetric(self):
        p = AsympParams(delta=0.3, u=0.5)
        self.assertAlmostEqual(asymp_func("E0", p, X=1.0, Y=-0.5), -asymp_func("E0", p, X=-0.5, Y=1.0))

    def test_E1_vanishes_on_the_diagonal(self):
        self.assertEqual(asymp_func("E1", AsympParams(delta=0.3, u=0.5), X=0.7, Y=0.7), 0.0)

    def test_unknown_name(self):
        with self.assertRaises(ValueError):
            asymp_func("g9_scal", AsympParams(delta=0.0, u=0.5))


class TestBaikRainsFunctions(TestCase):

    def test_airy_kernel_diagonal(self):
        """K_Ai(x, x) = Ai'(x)^2 - x Ai(x)^2"""
        for x in (-1.0, 0.0, 1.5):
            ai, aip, _, _ = special.airy(x)
            self.assertAlmostEqual(br_func("K_Ai_shift", 0.0, 0.0, x, x), aip ** 2 - x * ai ** 2, places=6)

    def test_airy_kernel_symmetric(self):
        k = br_func("K_Ai_shift", 0.0, 0.0, np.array([0.2, 1.1]), np.array([0.2, 1.1]))
        self.assertAlmostEqual(k[0, 1], k[1, 0], places=8)

    def test_unknown_name(self):
        with self.assertRaises(ValueError):
            br_func("Q_tau", 0.0, 0.0)


if __name__ == "__main__":
    unittest.main()
