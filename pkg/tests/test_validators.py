import unittest
from unittest import TestCase
import sys
import os
import tempfile
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from models.params import AsympParams, FiniteParams, GeoParams, ModelParams, RunConfig, WeightMode
from utils.validators import ParameterValidator
from utils.exceptions import ParameterDomainError
from utils.settings import THREADS_ENV, load_config_file, resolve_threads


class TestParameterValidator(TestCase):

    def test_build_valid_record(self):
        p = ParameterValidator.build(FiniteParams, N=4, n=1, alpha=0.1)
        self.assertEqual(p.N, 4)
        self.assertFalse(p.two_param)

    def test_build_collects_field_errors(self):
        """Pydantic failures surface as one domain error listing every field"""
        with self.assertRaises(ParameterDomainError) as context:
            ParameterValidator.build(FiniteParams, N=0, alpha=0.6)
        self.assertEqual(len(context.exception.errors), 2)
        self.assertTrue(any(err.startswith("N:") for err in context.exception.errors))
        self.assertTrue(any(err.startswith("alpha:") for err in context.exception.errors))

    def test_n_beyond_lattice(self):
        p = FiniteParams(N=3, n=3, alpha=0.1)
        with self.assertRaises(ParameterDomainError) as context:
            ParameterValidator.validate_finite(p)
        self.assertIn("n must satisfy", context.exception.errors[0])

    def test_two_param_requires_beta(self):
        p = FiniteParams(N=3, alpha=0.1)
        with self.assertRaises(ParameterDomainError) as context:
            ParameterValidator.validate_finite(p, require_beta=True)
        self.assertIn("beta is required for the two-parameter model", context.exception.errors)

    def test_stationary_forbids_beta(self):
        p = FiniteParams(N=3, alpha=0.1, beta=0.2)
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_finite(p, forbid_beta=True)

    def test_negative_beta_needs_continuation(self):
        p = FiniteParams(N=3, alpha=0.3, beta=-0.1)
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_finite(p, require_beta=True)
        # alpha + beta > 0, so the continued formula accepts it
        ParameterValidator.validate_finite(p, require_beta=True, continuation=True)

    def test_alpha_plus_beta_must_be_positive(self):
        p = FiniteParams(N=3, alpha=-0.3, beta=0.1)
        with self.assertRaises(ParameterDomainError) as context:
            ParameterValidator.validate_finite(p, require_beta=True, continuation=True)
        self.assertTrue(any("alpha + beta" in err for err in context.exception.errors))

    def test_alpha_equal_beta_rejected(self):
        p = FiniteParams(N=3, alpha=0.2, beta=0.2)
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_finite(p, require_beta=True)

    def test_geometric_domain(self):
        ParameterValidator.validate_geo(GeoParams(a=0.5, b=0.6, q=0.3, N=3))
        with self.assertRaises(ParameterDomainError) as context:
            ParameterValidator.validate_geo(GeoParams(a=2.5, b=0.6, q=0.3, N=3))
        self.assertTrue(any("a*sqrt(q)" in err for err in context.exception.errors))
        self.assertTrue(any("a*b" in err for err in context.exception.errors))

    def test_geometric_kernel_needs_positive_a(self):
        p = GeoParams(a=0.0, b=0.6, q=0.3, N=3)
        ParameterValidator.validate_geo(p, for_kernel=False)
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_geo(p)

    def test_model_validation_per_mode(self):
        ParameterValidator.validate_model(ModelParams(mode=WeightMode.STATIONARY, N=5, n=2, alpha=0.1))
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_model(ModelParams(mode=WeightMode.STATIONARY, N=5, alpha=0.6))
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_model(ModelParams(mode=WeightMode.TWO_PARAM, N=5, alpha=0.1))
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_model(ModelParams(mode=WeightMode.GEOMETRIC, N=5, a=0.5, q=0.3))

    def test_baik_rains_path_domain(self):
        ParameterValidator.validate_br(3.0, 0.0)
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.validate_br(0.5, 1.0)

    def test_sampling_domain(self):
        with self.assertRaises(ParameterDomainError) as context:
            ParameterValidator.validate_sampling(0, 0)
        self.assertEqual(len(context.exception.errors), 2)

    def test_describe_uses_mode_codes(self):
        m = ModelParams(mode=WeightMode.TWO_PARAM, N=4, alpha=0.1, beta=0.3)
        self.assertEqual(ParameterValidator.describe(m)["mode"], "two_param")


class TestParameterModels(TestCase):

    def test_weight_mode_codes(self):
        self.assertEqual(WeightMode.from_code("stationary"), WeightMode.STATIONARY)
        self.assertEqual(WeightMode.from_code("TWO_PARAM"), WeightMode.TWO_PARAM)
        self.assertEqual(WeightMode.GEOMETRIC.display_name, "Geometric")
        with self.assertRaises(ValueError):
            WeightMode.from_code("poisson")

    def test_stationary_mean(self):
        """N - 1 first-row steps and N - n - 1 vertical steps; the corner weight is zero"""
        p = FiniteParams(N=10, n=2, alpha=0.1)
        self.assertAlmostEqual(p.mean(), 9 / 0.4 + 7 / 0.6, places=12)
        self.assertAlmostEqual(FiniteParams(N=1, alpha=0.2).mean(), 0.0)

    def test_with_beta_and_stationary(self):
        p = FiniteParams(N=3, alpha=0.1)
        q = p.with_beta(0.3)
        self.assertTrue(q.two_param)
        self.assertFalse(q.stationary().two_param)

    def test_scaling_map(self):
        p = AsympParams(delta=0.0, u=0.5)
        finite, s = p.scaled_finite(100)
        self.assertEqual(finite.n, 34)
        self.assertAlmostEqual(finite.alpha, 0.0)
        self.assertAlmostEqual(s, 400.0 - 2.0 * 200.0 ** (2.0 / 3.0), places=9)

    def test_limit_mean_and_shift(self):
        p = AsympParams(delta=0.3, u=0.5)
        self.assertAlmostEqual(p.mean(), 0.3 * 1.3)
        self.assertAlmostEqual(p.shifted(1.0), 1.0 + 0.39)

    def test_geometric_parameters(self):
        p = GeoParams(a=0.5, b=0.6, q=0.25, N=3)
        self.assertEqual(p.x_params(), [0.6, 0.5, 0.5])
        self.assertFalse(p.distinct())
        self.assertTrue(GeoParams(a=0.4, b=0.6, q=0.25, N=3).distinct())

    def test_exponential_limit_parameters(self):
        p = GeoParams.exponential_limit(0.1, 0.3, 1e-2, N=3)
        self.assertAlmostEqual(p.a, 0.999)
        self.assertAlmostEqual(p.b, 0.997)
        self.assertAlmostEqual(p.q, 0.99)

    def test_run_config_defaults(self):
        cfg = RunConfig(command="sim")
        self.assertEqual(cfg.samples, 100000)
        self.assertEqual(cfg.fmt, "json")
        with self.assertRaises(ParameterDomainError):
            ParameterValidator.build(RunConfig, command="sim", fmt="xml")


class TestSettings(TestCase):

    def test_explicit_threads_win(self):
        self.assertEqual(resolve_threads(3), 3)

    def test_threads_from_environment(self):
        old = os.environ.get(THREADS_ENV)
        try:
            os.environ[THREADS_ENV] = "2"
            self.assertEqual(resolve_threads(None), 2)
            os.environ[THREADS_ENV] = "many"
            self.assertGreaterEqual(resolve_threads(None), 1)
        finally:
            if old is None:
                os.environ.pop(THREADS_ENV, None)
            else:
                os.environ[THREADS_ENV] = old

    def test_config_file(self):
        with tempfile.NamedTemporaryFile("w", suffix=".conf", delete=False) as fh:
            fh.write("# stationary run\nN = 10\nalpha=0.1\n\nmode = stationary\ns-min = 2\nnot a pair\n")
            path = fh.name
        try:
            values = load_config_file(path)
        finally:
            os.unlink(path)
        self.assertEqual(values, {"N": 10, "alpha": 0.1, "mode": "stationary", "s_min": 2})


if __name__ == "__main__":
    unittest.main()
