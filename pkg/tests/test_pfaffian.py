import unittest
from unittest import TestCase
import sys
import os
import tempfile
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from kernels.base import FunctionKernel, Kernel2x2
from numerics.pfaffian import (
    barycentric_weights, bracket_det, bracket_pf, dump_matrix, fredholm_det, fredholm_det_block, fredholm_pf,
    j_matrix, lagrange_matrix, make_discrete_grid, make_graded_grid, make_grid, pf, pfaffian_dense,
    resolvent_inner, scalar_matrix, step_correction,
)
from utils.exceptions import AntisymmetryError, ParameterDomainError
from utils.io import read_matrix


def antisymmetric(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n, n))
    return B - B.T


def sample_kernel_values(x: float, y: float) -> np.ndarray:
    e = np.exp(-x - y)
    return np.array([[(x - y) * e, 0.3 * e * x],
                     [-0.3 * e * y, 0.2 * (x - y) * e]])


def step_magnitude(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return -0.4 * np.exp(-0.5 * (x + y) - np.abs(x - y) / 3.0)


class PlainStepKernel(Kernel2x2):
    """Smooth 12 entry and a 22 entry jumping across the diagonal"""

    def entries(self, xs, ys, mu, center):
        X, Y = xs[:, None], ys[None, :]
        out = np.zeros((2, 2, xs.size, ys.size))
        out[0, 1] = 0.3 * np.exp(-X - 0.5 * Y)
        out[1, 0] = -0.3 * np.exp(-Y - 0.5 * X)
        out[1, 1] = np.sign(X - Y) * step_magnitude(X, Y)
        return out


class StepKernel(PlainStepKernel):

    def step_profile(self, xs, ys, mu=0.0, center=0.0):
        return step_magnitude(np.asarray(xs), np.asarray(ys))


class TestDensePfaffian(TestCase):

    def test_closed_forms(self):
        self.assertAlmostEqual(pf(np.array([[0.0, 7.0], [-7.0, 0.0]])), 7.0)
        A = np.zeros((4, 4))
        A[0, 1], A[0, 2], A[0, 3], A[1, 2], A[1, 3], A[2, 3] = 1.0, 2.0, 3.0, 4.0, 5.0, 6.0
        A = A - A.T
        # a12 a34 - a13 a24 + a14 a23
        self.assertAlmostEqual(pf(A), 8.0, places=12)

    def test_square_is_determinant(self):
        for n, seed in ((6, 1), (10, 2), (20, 3)):
            A = antisymmetric(n, seed)
            self.assertAlmostEqual(pf(A) ** 2 / np.linalg.det(A), 1.0, places=9)

    def test_log_scale_and_sign(self):
        A = antisymmetric(8, 4)
        result = pfaffian_dense(A)
        self.assertAlmostEqual(result.sign * np.exp(result.log_scale), result.value, places=10)
        self.assertGreaterEqual(result.pivot_growth, 1.0)

    def test_empty_matrix(self):
        self.assertEqual(pf(np.zeros((0, 0))), 1.0)

    def test_rejects_odd_dimension(self):
        with self.assertRaises(AntisymmetryError):
            pf(np.zeros((3, 3)))

    def test_rejects_symmetric_input(self):
        with self.assertRaises(AntisymmetryError) as context:
            pf(np.ones((2, 2)))
        self.assertGreater(context.exception.defect, 0.0)

    def test_singular_matrix(self):
        self.assertEqual(pf(np.zeros((4, 4))), 0.0)


class TestGrids(TestCase):

    def test_gauss_grid(self):
        grid = make_grid(2.0, 5.0, 12)
        self.assertAlmostEqual(float(grid.weights.sum()), 5.0, places=12)
        self.assertTrue(np.all((grid.nodes > 2.0) & (grid.nodes < 7.0)))
        with self.assertRaises(ParameterDomainError) as context:
            make_grid(0.0, -1.0, 2)
        self.assertEqual(len(context.exception.errors), 2)

    def test_graded_grid_covers_interval(self):
        grid = make_graded_grid(1.0, 2.0, 40.0, 60)
        self.assertAlmostEqual(float(grid.weights.sum()), 40.0, places=10)
        self.assertAlmostEqual(float(np.sum(grid.weights * np.exp(-(grid.nodes - 1.0)))), 1.0 - np.exp(-40.0),
                               places=4)

    def test_discrete_grid(self):
        grid = make_discrete_grid(3, 4)
        np.testing.assert_array_equal(grid.nodes, [4.0, 5.0, 6.0, 7.0])
        with self.assertRaises(ParameterDomainError):
            make_discrete_grid(3, 0)

    def test_balanced_moves_center(self):
        grid = make_grid(1.0, 4.0, 8).balanced(0.5, 1.0)
        self.assertAlmostEqual(grid.conj_center, -1.0)
        self.assertEqual(make_grid(1.0, 4.0, 8).with_mu(0.5).conj_center, 1.0)


class TestFredholmPfaffian(TestCase):

    def setUp(self):
        self.kern = FunctionKernel(sample_kernel_values)
        self.grid = make_grid(0.0, 12.0, 24)

    def test_zero_kernel(self):
        zero = FunctionKernel(lambda x, y: np.zeros((2, 2)))
        self.assertAlmostEqual(fredholm_pf(zero, self.grid), 1.0, places=14)

    def test_square_matches_block_determinant(self):
        value = fredholm_pf(self.kern, self.grid)
        self.assertAlmostEqual(value ** 2, fredholm_det_block(self.kern, self.grid), places=10)

    def test_conjugation_invariance(self):
        """diag(e^{mu x}, e^{-mu x}) on both sides leaves pf(J - K) unchanged"""
        base = fredholm_pf(self.kern, self.grid)
        for mu in (0.1, 0.3):
            self.assertAlmostEqual(fredholm_pf(self.kern, self.grid.with_mu(mu)), base, places=10)
            self.assertAlmostEqual(fredholm_pf(self.kern, self.grid.balanced(mu, 2.0)), base, places=10)

    def test_j_matrix(self):
        J = j_matrix(2)
        self.assertAlmostEqual(pf(J), 1.0)
        np.testing.assert_array_equal(J @ -J, np.eye(4))

    def test_bracket_matches_linear_solve(self):
        nodes = self.grid.nodes
        left = (np.exp(-nodes), 0.5 * np.exp(-2.0 * nodes))
        right = (np.exp(-0.5 * nodes), np.exp(-nodes))
        base, scaled = bracket_pf(self.kern, left, right, self.grid)
        self.assertAlmostEqual(base, fredholm_pf(self.kern, self.grid), places=12)
        self.assertAlmostEqual(scaled / base, resolvent_inner(self.kern, left, right, self.grid), places=9)

    def test_dump_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "matrix.bin")
            M = dump_matrix(self.kern, make_grid(0.0, 4.0, 5), path)
            loaded = read_matrix(path)
        self.assertEqual(loaded.shape, (10, 10))
        np.testing.assert_array_equal(loaded, M)
        np.testing.assert_allclose(loaded, -loaded.T, atol=1e-15)


class TestStepCorrection(TestCase):

    def test_grid_panels(self):
        grid = make_grid(2.0, 5.0, 12)
        self.assertEqual(grid.panels, ((0, 12, 2.0, 7.0),))
        graded = make_graded_grid(1.0, 2.0, 40.0, 60)
        self.assertEqual(graded.panels[0][0], 0)
        self.assertEqual(graded.panels[-1][1], graded.size)
        for (start, stop, lo, hi), (nxt, _, nxt_lo, _) in zip(graded.panels, graded.panels[1:]):
            self.assertEqual(stop, nxt)
            self.assertAlmostEqual(hi, nxt_lo)
        for start, stop, lo, hi in graded.panels:
            nodes = graded.nodes[start:stop]
            self.assertTrue(np.all((nodes > lo) & (nodes < hi)))
        self.assertEqual(graded.with_mu(0.3).panels, graded.panels)
        self.assertEqual(make_discrete_grid(0, 4).panels, ())

    def test_lagrange_matrix_reproduces_polynomials(self):
        grid = make_grid(1.0, 2.0, 10)
        points = np.array([1.0, 1.37, grid.nodes[3], 2.9, 3.0])
        L = lagrange_matrix(grid.nodes, barycentric_weights(grid.nodes), points)
        cubic = lambda t: t ** 3 - 2.0 * t + 0.5
        np.testing.assert_allclose(L @ cubic(grid.nodes), cubic(points), atol=1e-12)
        self.assertAlmostEqual(L[2, 3], 1.0)

    def test_no_correction_without_a_jump(self):
        grid = make_grid(0.0, 4.0, 8)
        self.assertIsNone(step_correction(FunctionKernel(sample_kernel_values), grid))
        self.assertIsNone(step_correction(StepKernel(), make_discrete_grid(0, 4)))

    def test_correction_is_antisymmetric(self):
        correction = step_correction(StepKernel(), make_graded_grid(0.0, 3.0, 20.0, 40))
        np.testing.assert_allclose(correction, -correction.T, atol=1e-15)

    def test_jump_no_longer_limits_convergence(self):
        corrected = [fredholm_pf(StepKernel(), make_grid(0.0, 12.0, m)) for m in (32, 64)]
        plain = [fredholm_pf(PlainStepKernel(), make_grid(0.0, 12.0, m)) for m in (32, 64)]
        corrected_change = abs(corrected[1] - corrected[0])
        self.assertLess(corrected_change, 1e-9)
        self.assertGreater(abs(plain[1] - plain[0]), 100.0 * corrected_change)
        self.assertAlmostEqual(plain[1], corrected[1], delta=1e-2)

    def test_graded_grid_agrees_with_single_panel(self):
        single = fredholm_pf(StepKernel(), make_grid(0.0, 30.0, 96))
        graded = fredholm_pf(StepKernel(), make_graded_grid(0.0, 4.0, 30.0, 72))
        self.assertAlmostEqual(graded, single, places=7)


class TestFredholmDeterminant(TestCase):

    def test_rank_one_kernel(self):
        """det(1 - c |phi><phi|) = 1 - c |phi|^2"""
        grid = make_grid(0.0, 20.0, 40)
        value = fredholm_det(lambda x, y: 0.5 * np.exp(-x[:, None] - y[None, :]), grid)
        self.assertAlmostEqual(value, 0.75, places=8)

    def test_bracket_det(self):
        grid = make_grid(0.0, 6.0, 16)

        def kernel(x, y):
            return 0.3 * np.exp(-np.abs(x[:, None] - y[None, :]) - x[:, None])

        left = np.exp(-grid.nodes)
        right = np.cos(grid.nodes) * np.exp(-grid.nodes / 2.0)
        base, scaled = bracket_det(kernel, left, right, grid)
        sw = grid.sqrt_weights()
        expected = (sw * left) @ np.linalg.solve(np.eye(grid.size) - scalar_matrix(kernel, grid), sw * right)
        self.assertAlmostEqual(base, fredholm_det(kernel, grid), places=12)
        self.assertAlmostEqual(scaled / base, expected, places=10)


if __name__ == "__main__":
    unittest.main()
