import unittest
from unittest import TestCase
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from kernels.asymptotic import AsympKernel, kernel_abar
from kernels.baik_rains import BrPathKernel, h2_anchor, kernel_br_path
from kernels.base import ConjugatedKernel, FunctionKernel, KernelFamily, conjugate, conjugation_exponents
from kernels.finite import FiniteKernel, kernel_bar, kernel_int
from kernels.geometric import GeoKernel, geo_E, scaled_kernel, scaling_error
from distributions.geometric import antisymmetry_defect as geo_antisymmetry_defect
from models.params import AsympParams, ContourSettings, FiniteParams, GeoParams
from utils.exceptions import ParameterDomainError
from utils.io import kernel_grid_to_csv
from utils.validators import ParameterValidator


def transpose_defect(K: np.ndarray) -> float:
    """max |K(x, y) + K(y, x)^T| over the evaluated grid"""
    return float(np.max(np.abs(K + np.transpose(K, (1, 0, 3, 2)))))


class TestKernelBase(TestCase):

    def test_conjugation_exponents(self):
        out = conjugation_exponents(np.array([1.0, 2.0]), np.array([0.0]), 0.5, 0.0)
        self.assertEqual(out.shape, (2, 2, 2, 1))
        self.assertAlmostEqual(out[0, 0, 1, 0], 1.0)
        self.assertAlmostEqual(out[1, 1, 1, 0], -1.0)
        self.assertAlmostEqual(out[0, 1, 0, 0], 0.5)

    def test_conjugate_zero_is_identity(self):
        kern = FunctionKernel(lambda x, y: np.eye(2))
        self.assertIs(conjugate(kern, 0.0), kern)
        self.assertIsInstance(conjugate(kern, 0.2), ConjugatedKernel)

    def test_conjugated_kernel_values(self):
        kern = FunctionKernel(lambda x, y: np.array([[x - y, 1.0], [-1.0, y - x]]))
        xs = np.array([0.5, 1.5])
        expected = kern.block(xs, xs, mu=0.3, center=1.0)
        np.testing.assert_allclose(conjugate(kern, 0.3, 1.0).block(xs, xs), expected)
        self.assertAlmostEqual(conjugate(kern, 0.3).conj_exponent, -0.3)

    def test_describe(self):
        info = FunctionKernel(lambda x, y: np.zeros((2, 2)), family=KernelFamily.GEO).describe()
        self.assertEqual(info["family"], "geo")
        self.assertEqual(set(info["growth"]), {"11", "12", "21", "22"})


class TestFiniteKernel(TestCase):

    def test_unknown_mode(self):
        with self.assertRaises(ParameterDomainError):
            FiniteKernel(FiniteParams(N=3, alpha=0.1), mode="bogus")
        with self.assertRaises(ParameterDomainError):
            kernel_bar(1.0, 2.0, FiniteParams(N=3, alpha=0.1, beta=0.3), mode="int")

    def test_two_param_requires_beta(self):
        with self.assertRaises(ParameterDomainError):
            FiniteKernel(FiniteParams(N=3, alpha=0.1), mode="int")

    def test_stationary_kernel_antisymmetric(self):
        kern = FiniteKernel(FiniteParams(N=3, n=1, alpha=0.1), mode="limit")
        xs = np.array([0.5, 1.0, 2.5, 4.0])
        K = kern.block(xs, xs)
        self.assertLess(transpose_defect(K), 1e-7 * max(1.0, float(np.max(np.abs(K)))))
        self.assertEqual(kern.family, KernelFamily.FINITE_KBAR_LIMIT)

    def test_stationary_kernel_antisymmetry_is_tight(self):
        p = FiniteParams(N=3, n=1, alpha=0.1)
        xs = np.array([0.3, 1.0, 2.5, 5.0, 9.0])
        K = FiniteKernel(p, mode="limit").block(xs, xs)
        scale = max(1.0, float(np.max(np.abs(K))))
        self.assertLess(transpose_defect(K), 1e-8 * scale)
        finer = FiniteKernel(p, mode="limit", settings=ContourSettings(nodes=256)).block(xs, xs)
        np.testing.assert_allclose(finer, K, atol=1e-8 * scale)

    def test_step_profile_is_the_diagonal_jump(self):
        """K22(x + h, x) - K22(x - h, x) -> 2 E(x, x)"""
        kern = FiniteKernel(FiniteParams(N=3, n=0, alpha=0.1, beta=0.3), mode="int")
        x, h = 1.5, 1e-7
        K = kern.block(np.array([x - h, x + h]), np.array([x]), mu=kern.conj_exponent)
        jump = K[1, 1, 1, 0] - K[1, 1, 0, 0]
        E = kern.step_profile(x, x, mu=kern.conj_exponent)
        self.assertAlmostEqual(jump, 2.0 * float(E), delta=1e-5)
        self.assertLess(float(E), 0.0)

    def test_conjugated_entries_match_plain_entries(self):
        kern = FiniteKernel(FiniteParams(N=3, n=1, alpha=0.1), mode="limit")
        xs = np.array([0.5, 2.0])
        plain = kern.block(xs, xs)
        mu = kern.conj_exponent
        factors = np.exp(conjugation_exponents(xs, xs, mu, 0.0))
        np.testing.assert_allclose(kern.block(xs, xs, mu=mu), plain * factors, rtol=1e-8, atol=1e-10)

    def test_kernel_split(self):
        """K = K-bar + (alpha + beta) R"""
        p = FiniteParams(N=3, n=1, alpha=0.1, beta=0.3)
        split = FiniteKernel(p, mode="two_param")
        for x, y in ((1.0, 2.0), (0.4, 1.7)):
            expected = kernel_bar(x, y, p) + (p.alpha + p.beta) * split.remainder([x], [y])[:, :, 0, 0]
            np.testing.assert_allclose(kernel_int(x, y, p), expected, atol=1e-8)

    def test_stationary_kernel_has_no_remainder(self):
        with self.assertRaises(ParameterDomainError):
            FiniteKernel(FiniteParams(N=3, alpha=0.1)).remainder([1.0], [2.0])

    def test_describe(self):
        info = FiniteKernel(FiniteParams(N=3, n=1, alpha=0.1, beta=0.3), mode="two_param").describe()
        self.assertEqual(info["mode"], "two_param")
        self.assertEqual(info["family"], "finite_Kbar")
        self.assertGreater(info["decay"], 0.0)


class TestLimitKernels(TestCase):

    def test_limit_kernel_antisymmetric(self):
        kern = AsympKernel(AsympParams(delta=0.3, u=0.5))
        xs = np.array([-1.0, 0.0, 1.5])
        K = kern.block(xs, xs)
        self.assertLess(transpose_defect(K), 1e-7 * max(1.0, float(np.max(np.abs(K)))))

    def test_limit_kernel_step_profile(self):
        kern = AsympKernel(AsympParams(delta=0.3, u=0.5))
        x, h = 0.4, 1e-7
        K = kern.block(np.array([x - h, x + h]), np.array([x]))
        self.assertAlmostEqual(K[1, 1, 1, 0] - K[1, 1, 0, 0], 2.0 * float(kern.step_profile(x, x)), delta=1e-5)

    def test_limit_kernel_against_longer_rays(self):
        p = AsympParams(delta=-0.5, u=1.0)
        finer = ContourSettings(airy_nodes=512, ray_length=16.0, vertical_nodes=192)
        for X, Y in ((-1.0, 0.5), (2.0, -3.0), (-6.0, -6.0)):
            np.testing.assert_allclose(kernel_abar(X, Y, p), kernel_abar(X, Y, p, settings=finer),
                                       rtol=1e-7, atol=1e-8)

    def test_br_path_kernel(self):
        kern = BrPathKernel(3.0, 0.0)
        xs = np.array([-2.0, 0.0, 1.5, 4.0])
        K = kern.block(xs, xs)
        self.assertTrue(np.all(np.isfinite(K)))
        self.assertLess(transpose_defect(K), 1e-7 * max(1.0, float(np.max(np.abs(K)))))

    def test_kernel_br_path_values(self):
        value, border = kernel_br_path(0.5, 1.0, 0.0, 0.0, 3.0)
        self.assertEqual(value.shape, (2, 2))
        self.assertTrue(np.all(np.isfinite(value)))
        self.assertTrue(all(np.isfinite(v) for v in border.values()))
        with self.assertRaises(ParameterDomainError):
            kernel_br_path(0.5, 1.0, 0.0, 1.0, 0.5)

    def test_h2_anchor(self):
        self.assertAlmostEqual(h2_anchor(3.0, 0.0), -0.5)
        self.assertAlmostEqual(h2_anchor(0.3, 0.0), -0.3)
        self.assertAlmostEqual(h2_anchor(3.0, 1.0), -1.5)
        # right of tau - 2u and left of -tau
        for u, tau in ((3.0, 0.0), (0.3, 0.0), (3.0, 1.0), (2.0, -1.0)):
            self.assertGreater(h2_anchor(u, tau), tau - 2.0 * u)
            self.assertLess(h2_anchor(u, tau), -tau)

    def test_limit_kernel_domain(self):
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.build(AsympParams, delta=0.3, u=-1.0)
        with self.assertRaises(ParameterDomainError):
            AsympKernel(AsympParams(delta=float("nan"), u=0.5))


class TestGeoKernel(TestCase):

    def setUp(self):
        self.p = GeoParams(a=0.5, b=0.6, q=0.3, N=3)

    def test_antisymmetric(self):
        self.assertLess(geo_antisymmetry_defect(self.p), 1e-8)

    def test_representations_agree(self):
        sites = np.array([1.0, 2.0, 4.0])
        poles = GeoKernel(GeoParams(a=0.4, b=0.6, q=0.3, N=3), "poles").block(sites, sites)
        circles = GeoKernel(GeoParams(a=0.4, b=0.6, q=0.3, N=3), "circles").block(sites, sites)
        np.testing.assert_allclose(poles, circles, atol=1e-7)

    def test_pole_representation_at_default_parameters(self):
        sites = np.array([1.0, 2.0, 4.0])
        poles = GeoKernel(self.p, "poles").block(sites, sites)
        circles = GeoKernel(self.p, "circles").block(sites, sites)
        np.testing.assert_allclose(poles, circles, atol=1e-7)
        self.assertLess(transpose_defect(poles), 1e-8 * max(1.0, float(np.max(np.abs(poles)))))

    def test_E_vanishes_on_the_diagonal(self):
        for k in (1, 3, 7):
            self.assertEqual(geo_E(k, k, self.p), 0.0)
        self.assertAlmostEqual(geo_E(3, 1, self.p), -geo_E(1, 3, self.p), places=10)

    def test_exponential_scaling(self):
        """The rescaled kernel approaches the exponential one at first order in eps"""
        coarse = scaling_error(1.0, 2.0, 0.1, 0.3, 0.1, 2, 0)
        fine = scaling_error(1.0, 2.0, 0.1, 0.3, 0.01, 2, 0)
        self.assertTrue(np.all(np.isfinite(scaled_kernel(1.0, 2.0, 0.1, 0.3, 0.01, 2, 0))))
        self.assertGreaterEqual(coarse / fine, 5.0)
        self.assertLessEqual(coarse / fine, 15.0)

    def test_sites_start_at_one(self):
        with self.assertRaises(ParameterDomainError):
            GeoKernel(self.p).block([0.0], [1.0])

    def test_kernel_grid_csv(self):
        sites = np.array([1.0, 2.0])
        text = kernel_grid_to_csv(sites, sites, GeoKernel(self.p).block(sites, sites))
        lines = text.strip().split("\n")
        self.assertEqual(lines[0], "x,y,k11,k12,k21,k22")
        self.assertEqual(len(lines), 5)


if __name__ == "__main__":
    unittest.main()
