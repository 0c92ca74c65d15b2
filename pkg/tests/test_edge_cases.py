import asyncio
import unittest
from unittest import TestCase
import sys
import os
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np

from agents import MasterAgent, SimulationAgent
from agents.base_agent import BaseAgent
from agents.config import window_grid
from kernels.geometric import pick_representation
from models.params import GeoParams, ModelParams, RunConfig, WeightMode
from simulation.lpp_sim import gen_weights, lpp_time, sample_values
from utils.exceptions import ParameterDomainError


class TestEdgeCases(TestCase):
    """Boundary inputs and error conditions"""

    def setUp(self):
        self.master_agent = MasterAgent()

    def test_single_site_stationary_lattice(self):
        """N = 1: the only site is the zero corner"""
        m = ModelParams(mode=WeightMode.STATIONARY, N=1, alpha=0.2)
        values = sample_values(m, samples=500, seed=1, threads=1)
        self.assertTrue(np.all(values == 0.0))

    def test_endpoint_on_first_column(self):
        """n = N - 1 puts the endpoint at (N, 1)"""
        m = ModelParams(mode=WeightMode.STATIONARY, N=4, n=3, alpha=0.1)
        W = gen_weights(m, seed=2)
        self.assertAlmostEqual(lpp_time(W, (4, 1)), float(np.nansum(W[:, 0])), places=12)
        values = sample_values(m, samples=500, seed=2, threads=1)
        self.assertTrue(np.all(values > 0.0))

    def test_alpha_at_the_boundary(self):
        for alpha in (0.5, -0.5):
            with self.assertRaises(ParameterDomainError):
                asyncio.run(self.master_agent.process({
                    "command": "cdf-finite",
                    "params": {"N": 3, "alpha": alpha},
                    "s_values": [1.0],
                }))

    def test_empty_window(self):
        cfg = RunConfig(command="cdf-finite", params={"s_min": 2.0, "s_max": 1.0})
        with self.assertRaises(ParameterDomainError):
            window_grid(cfg)
        with self.assertRaises(ParameterDomainError):
            window_grid(RunConfig(command="cdf-finite", params={"points": 0}))

    def test_explicit_s_values_sorted(self):
        cfg = RunConfig(command="cdf-finite", s_values=[3.0, -1.0, 2.0])
        self.assertEqual(window_grid(cfg), [-1.0, 2.0, 3.0])

    def test_single_point_window(self):
        cfg = RunConfig(command="cdf-finite", params={"s_min": 1.5, "s_max": 1.5, "points": 1})
        self.assertEqual(window_grid(cfg), [1.5])

    def test_payload_config_must_be_mapping(self):
        with self.assertRaises(ParameterDomainError):
            BaseAgent.config_from({"config": "N=3"})
        with self.assertRaises(ParameterDomainError):
            BaseAgent.config_from({"config": {"command": "sim", "fmt": "xml"}})

    def test_circles_need_a_below_one(self):
        p = GeoParams(a=1.2, b=0.5, q=0.3, N=3)
        with self.assertRaises(ParameterDomainError):
            pick_representation(p, "circles")
        self.assertEqual(pick_representation(p, "auto"), "poles")

    def test_unknown_representation(self):
        with self.assertRaises(ParameterDomainError):
            pick_representation(GeoParams(a=0.5, b=0.6, q=0.3, N=3), "spline")

    def test_failed_run_is_counted(self):
        agent = SimulationAgent()
        payload = {"config": {"command": "sim", "params": {"mode": "stationary", "N": 3, "n": 5, "alpha": 0.1},
                              "samples": 100, "threads": 1}}
        with self.assertRaises(ParameterDomainError):
            asyncio.run(agent.process(payload))
        metrics = agent.get_metrics()
        self.assertEqual(metrics["runs"], 1)
        self.assertEqual(metrics["success_rate"], 0.0)


if __name__ == "__main__":
    unittest.main()
