import asyncio
import unittest
from unittest import TestCase
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from agents import MasterAgent, SimulationAgent, DistributionAgent, VerificationAgent
from agents.verification_agent import SUITES, check_grid_convergence, check_two_param_vs_mc
from data.reference_configs import REFERENCE_CONFIGS
from models.params import RunConfig
from models.results import CheckResult, CurvePoint, DistributionCurve, IncrementReport, McSummary
from utils.exceptions import CurveInvariantError, NoConvergenceError, ParameterDomainError


def stationary_sim(**overrides):
    config = {
        "command": "sim",
        "params": {"mode": "stationary", "N": 3, "n": 0, "alpha": 0.1},
        "samples": 10000,
        "seed": 1,
        "threads": 1,
    }
    config.update(overrides)
    return {"config": config}


def failing_check(cfg, tol):
    return CheckResult(check="always_fails", status="fail", value=1.0, tolerance=tol)


def passing_check(cfg, tol):
    return CheckResult(check="always_passes", status="pass", value=0.0, tolerance=tol)


def diverging_check(cfg, tol):
    raise NoConvergenceError("did not settle", achieved_tol=1.0)


def bad_parameter_check(cfg, tol):
    raise ParameterDomainError("bad", errors=["alpha"])


class TestSimulationAgent(TestCase):
    def setUp(self):
        self.agent = SimulationAgent()

    def test_empirical_cdf_run(self):
        result = asyncio.run(self.agent.process(stationary_sim()))

        self.assertIsInstance(result, McSummary)
        self.assertEqual(result.samples, 10000)
        self.assertEqual(result.params["mode"], "stationary")
        metrics = self.agent.get_metrics()
        self.assertEqual(metrics["runs"], 1)
        self.assertEqual(metrics["completed"], 1)
        self.assertEqual(metrics["success_rate"], 100.0)

    def test_explicit_window(self):
        payload = stationary_sim()
        payload["config"]["s_values"] = [1.0, 3.0, 5.0]
        result = asyncio.run(self.agent.process(payload))
        self.assertEqual(result.grid, [1.0, 3.0, 5.0])

    def test_increment_run(self):
        payload = stationary_sim(samples=2000)
        payload["config"]["params"].update({"kind": "increments", "i": 1, "j": 2})
        result = asyncio.run(self.agent.process(payload))
        self.assertIsInstance(result, IncrementReport)
        self.assertEqual(len(result.sites), 3)

    def test_unknown_kind(self):
        payload = stationary_sim()
        payload["config"]["params"]["kind"] = "histogram"
        with self.assertRaises(ParameterDomainError):
            asyncio.run(self.agent.process(payload))
        self.assertEqual(self.agent.get_metrics()["failures"], 1)

    def test_reset_metrics(self):
        asyncio.run(self.agent.process(stationary_sim()))
        self.agent.reset_metrics()
        metrics = self.agent.get_metrics()
        self.assertEqual(metrics["runs"], 0)
        self.assertEqual(metrics["min_seconds"], 0.0)

    def test_missing_config(self):
        with self.assertRaises(ParameterDomainError):
            asyncio.run(self.agent.process({}))


class TestDistributionAgent(TestCase):
    def setUp(self):
        self.agent = DistributionAgent()

    def test_geometric_corner_curve(self):
        entry = REFERENCE_CONFIGS["geometric_corner"]
        curve = asyncio.run(self.agent.process({"config": dict(entry["config"], threads=1)}))
        for point, expected in zip(curve.points, entry["expected"]["F"]):
            self.assertAlmostEqual(point.F, expected, delta=1e-6)

    def test_invalid_curve_rejected(self):
        curve = DistributionCurve(points=[CurvePoint(s=0.0, F=0.7), CurvePoint(s=1.0, F=0.2)])
        with self.assertRaises(CurveInvariantError) as context:
            DistributionAgent.check_curve(curve, "cdf-finite")
        self.assertEqual(len(context.exception.violations), 1)

    def test_unknown_command(self):
        with self.assertRaises(ParameterDomainError):
            asyncio.run(self.agent.process({"config": {"command": "cdf-poisson"}}))

    def test_tabulate_e_alpha(self):
        cfg = RunConfig(command="tabulate", params={"N": 1, "alpha": 0.15, "s_min": 0.0, "s_max": 2.0, "points": 3})
        header, rows = self.agent.tabulate("e_alpha", cfg)
        self.assertEqual(header, ["x", "e_alpha"])
        for x, value in rows:
            self.assertAlmostEqual(value, x, places=8)

    def test_tabulate_unknown_name(self):
        with self.assertRaises(ParameterDomainError):
            self.agent.tabulate("g9", RunConfig(command="tabulate", params={"N": 2, "alpha": 0.1}))

    def test_dump_contour(self):
        cfg = RunConfig(command="dump", params={"what": "contour", "name": "g2", "N": 3, "alpha": 0.1})
        data = self.agent.dump(cfg)
        self.assertEqual(data["kind"], "circle")
        self.assertGreater(len(data["nodes"]), 0)

    def test_dump_geometric_kernel(self):
        cfg = RunConfig(command="dump", params={"what": "kernel", "mode": "geometric", "a": 0.5, "b": 0.6,
                                                "q": 0.3, "N": 3, "s_min": 0.0, "s_max": 2.0, "points": 3})
        data = self.agent.dump(cfg)
        self.assertEqual(data["header"], ["x", "y", "k11", "k12", "k21", "k22"])
        self.assertEqual(len(data["rows"]), 4)

    def test_dump_validation(self):
        with self.assertRaises(ParameterDomainError):
            self.agent.dump(RunConfig(command="dump", params={"what": "spectrum"}))
        with self.assertRaises(ParameterDomainError):
            self.agent.dump(RunConfig(command="dump", params={"what": "matrix", "N": 3, "alpha": 0.1}))


class TestVerificationAgent(TestCase):

    def test_numerical_failure_becomes_failed_check(self):
        agent = VerificationAgent(suites={"mini": [
            {"name": "passes", "check": passing_check, "tolerance": 0.0},
            {"name": "diverges", "check": diverging_check, "tolerance": 1e-8},
        ]})
        report = asyncio.run(agent.process({"config": {"command": "verify", "suite": "mini"}}))
        self.assertFalse(report.passed)
        self.assertEqual(report.failed_checks, ["diverges"])
        self.assertIn("NoConvergenceError", report.checks[1].details)

    def test_parameter_errors_propagate(self):
        agent = VerificationAgent(suites={"mini": [{"name": "bad", "check": bad_parameter_check, "tolerance": 0.0}]})
        with self.assertRaises(ParameterDomainError):
            asyncio.run(agent.process({"config": {"command": "verify", "suite": "mini"}}))

    def test_unknown_suite(self):
        with self.assertRaises(ParameterDomainError):
            asyncio.run(VerificationAgent().process({"config": {"command": "verify", "suite": "nope"}}))

    def test_list_suites(self):
        suites = VerificationAgent().list_suites()
        self.assertIn("geo_corner_closed_form", suites["geometric"])
        self.assertIn("dp_vs_enumeration", suites["simulator"])

    def test_new_suite_rules(self):
        suites = VerificationAgent().list_suites()
        self.assertEqual(suites["two-param-vs-mc"], ["two_param_vs_mc"])
        self.assertIn("variant_equivalence", suites["moments"])
        tolerances = {rule["name"]: rule["tolerance"] for rule in SUITES["pfaffian"]}
        self.assertEqual(tolerances["conjugation_invariance"], 1e-9)
        self.assertEqual(tolerances["grid_convergence"], 1e-7)

    def test_grid_convergence(self):
        result = check_grid_convergence(RunConfig(command="verify"), 1e-7)
        self.assertEqual(result.status, "pass", result.details)

    def test_two_param_against_simulation(self):
        cfg = RunConfig(command="verify", samples=20000, seed=4, threads=1)
        result = check_two_param_vs_mc(cfg, 0.005)
        self.assertEqual(result.check, "two_param_vs_mc")
        self.assertIn("N=4", result.details)
        self.assertEqual(result.status, "pass", result.details)


class TestMasterAgent(TestCase):
    def setUp(self):
        self.master = MasterAgent()

    def test_sim_routing(self):
        result = asyncio.run(self.master.process(stationary_sim()))
        self.assertEqual(result.command, "sim")
        self.assertEqual(result.status, "completed")
        self.assertEqual(result.config["seed"], 1)
        self.assertEqual(result.config["samples"], 10000)

    def test_failed_suite_marks_result(self):
        self.master.verification_agent = VerificationAgent(
            suites={"mini": [{"name": "always_fails", "check": failing_check, "tolerance": 0.0}]})
        result = asyncio.run(self.master.process({"command": "verify", "suite": "mini"}))
        self.assertEqual(result.status, "failed")
        self.assertEqual(result.errors, ["always_fails"])

    def test_tabulate_routing(self):
        payload = {"command": "tabulate",
                   "params": {"name": "e_alpha", "N": 1, "alpha": 0.2, "s_min": 1.0, "s_max": 1.0, "points": 1}}
        result = asyncio.run(self.master.process(payload))
        self.assertEqual(result.output["header"], ["x", "e_alpha"])
        self.assertAlmostEqual(result.output["rows"][0][1], 1.0, places=8)

    def test_unknown_command(self):
        with self.assertRaises(ParameterDomainError):
            asyncio.run(self.master.process({"command": "plot"}))
        self.assertEqual(self.master.get_metrics()["failures"], 1)

    def test_invalid_config_fields(self):
        with self.assertRaises(ParameterDomainError) as context:
            asyncio.run(self.master.process({"command": "sim", "samples": 0, "fmt": "xml"}))
        self.assertEqual(len(context.exception.errors), 2)

    def test_reference_runs(self):
        with self.assertRaises(ParameterDomainError):
            asyncio.run(self.master.run_reference("missing"))
        result = asyncio.run(self.master.run_reference("geometric_corner"))
        self.assertEqual(result.status, "completed")
        self.assertEqual(result.command, "cdf-geo")


if __name__ == "__main__":
    unittest.main()
