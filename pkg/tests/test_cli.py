import json
import os
import sys
import tempfile
import unittest
from unittest import TestCase
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from click.testing import CliRunner

from cli import EXIT_BAD_PARAMETERS, EXIT_OK, cli, raise_for_status
from models.results import RunResult
from utils.exceptions import VerificationError


SIM_ARGS = ["sim", "--mode", "stationary", "--N", "3", "--alpha", "0.1",
            "--samples", "10000", "--seed", "3", "--threads", "1"]


class TestCli(TestCase):

    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def path(self, name: str) -> str:
        return os.path.join(self.tmp.name, name)

    def read(self, name: str) -> str:
        with open(self.path(name)) as f:
            return f.read()

    def test_list_configs_json(self):
        result = self.runner.invoke(cli, ["list-configs", "--output-json"])
        self.assertEqual(result.exit_code, EXIT_OK)
        configs = json.loads(result.output)
        self.assertIn("gue_at_zero", configs)
        self.assertEqual(configs["geometric_corner"]["config"]["command"], "cdf-geo")

    def test_alpha_out_of_range(self):
        result = self.runner.invoke(cli, ["sim", "--mode", "stationary", "--N", "3", "--alpha", "0.6"])
        self.assertEqual(result.exit_code, EXIT_BAD_PARAMETERS)

    def test_sim_is_reproducible(self):
        out = self.path("sim.json")
        first = self.runner.invoke(cli, SIM_ARGS + ["--out", out])
        self.assertEqual(first.exit_code, EXIT_OK)
        text = self.read("sim.json")
        again = self.runner.invoke(cli, SIM_ARGS + ["--out", out])
        self.assertEqual(again.exit_code, EXIT_OK)
        self.assertEqual(self.read("sim.json"), text)

        payload = json.loads(text)
        self.assertEqual(payload["samples"], 10000)
        self.assertEqual(payload["config"]["seed"], 3)
        self.assertEqual(payload["config"]["params"]["alpha"], 0.1)

    def test_sim_csv(self):
        out = self.path("sim.csv")
        result = self.runner.invoke(cli, SIM_ARGS + ["--format", "csv", "--out", out])
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertTrue(self.read("sim.csv").startswith("s,F_hat,band\n"))

    def test_matrix_dump_needs_out(self):
        result = self.runner.invoke(cli, ["dump", "matrix", "--N", "3", "--alpha", "0.1"])
        self.assertEqual(result.exit_code, EXIT_BAD_PARAMETERS)

    def test_contour_dump(self):
        out = self.path("contour.json")
        result = self.runner.invoke(cli, ["dump", "contour", "--N", "3", "--alpha", "0.1", "--out", out])
        self.assertEqual(result.exit_code, EXIT_OK)
        payload = json.loads(self.read("contour.json"))
        self.assertEqual(payload["kind"], "circle")
        self.assertEqual(payload["config"]["command"], "dump")

    def test_tabulate_csv(self):
        out = self.path("e_alpha.csv")
        result = self.runner.invoke(cli, ["tabulate", "e_alpha", "--N", "1", "--alpha", "0.15", "--x-min", "0",
                                          "--x-max", "2", "--points", "3", "--format", "csv", "--out", out])
        self.assertEqual(result.exit_code, EXIT_OK)
        lines = self.read("e_alpha.csv").strip().split("\n")
        self.assertEqual(lines[0], "x,e_alpha")
        self.assertEqual(len(lines), 4)

    def test_config_file_merged_under_flags(self):
        config = self.path("run.cfg")
        with open(config, "w") as f:
            f.write("N=1\nalpha=0.15\npoints=2\ns_min=1\ns_max=2\n")
        out = self.path("table.json")
        result = self.runner.invoke(cli, ["tabulate", "e_alpha", "--config", config, "--points", "3", "--out", out])
        self.assertEqual(result.exit_code, EXIT_OK)
        payload = json.loads(self.read("table.json"))
        self.assertEqual(len(payload["rows"]), 3)

    def test_threads_from_environment(self):
        out = self.path("sim.json")
        args = [a for a in SIM_ARGS if a not in ("--threads", "1")] + ["--out", out]
        result = self.runner.invoke(cli, args, env={"LPP_LAB_THREADS": "2"})
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(json.loads(self.read("sim.json"))["config"]["threads"], 2)
        help_text = self.runner.invoke(cli, ["sim", "--help"]).output
        self.assertIn("LPP_LAB_THREADS", help_text)

    def test_limit_cdf_over_both_tails(self):
        out = self.path("asymp.json")
        result = self.runner.invoke(cli, ["cdf-asymp", "--delta", "0", "--u", "0.5", "--s-min", "-5", "--s-max", "5",
                                          "--points", "9", "--threads", "1", "--out", out])
        self.assertEqual(result.exit_code, EXIT_OK, result.output)
        payload = json.loads(self.read("asymp.json"))
        self.assertEqual(len(payload["points"]), 9)

    def test_failed_run_raises(self):
        raise_for_status(RunResult(command="verify", status="completed"))
        with self.assertRaises(VerificationError) as context:
            raise_for_status(RunResult(command="verify", status="failed", errors=["pf_squared"]))
        self.assertEqual(context.exception.failed_checks, ["pf_squared"])


if __name__ == "__main__":
    unittest.main()
