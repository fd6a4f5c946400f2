"""End-to-end checks of the metroflow command-line tool.

Usage: python3 cli_tests.py /path/to/metroflow
"""

import csv
import json
import os
import subprocess
import sys
import tempfile
import unittest
from pathlib import Path

BIN = None


def run(*args, check=None):
    proc = subprocess.run([BIN, *map(str, args)], capture_output=True, text=True)
    if check is not None and proc.returncode != check:
        raise AssertionError(
            f"exit {proc.returncode} (wanted {check}) for {args}\nstdout:\n{proc.stdout}\nstderr:\n{proc.stderr}"
        )
    return proc


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class CliTest(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def test_usage_errors_exit_2(self):
        run(check=2)
        run("no-such-command", check=2)
        run("simulate", check=2)  # --out missing
        run("simulate", "--scenario", "nope", "--out", self.tmp / "x", check=2)
        run("pipeline", "--out", self.tmp / "p", check=2)
        run("pipeline", "--synthetic", "prince-edward-down", "--simulate", "no-control", "--out", self.tmp / "p",
            check=2)
        run("estimate", "--samples", self.tmp / "missing.csv", "--out", self.tmp / "e", check=2)
        run("estimate", "--samples", "x.csv", "--mode", "sideways", "--out", self.tmp / "e", check=2)

    def test_empty_and_malformed_samples_exit_2(self):
        empty = self.tmp / "empty.csv"
        empty.write_text("")
        run("estimate", "--samples", empty, "--out", self.tmp / "e", check=2)
        header_only = self.tmp / "header.csv"
        header_only.write_text("q,n,z\n")
        run("estimate", "--samples", header_only, "--out", self.tmp / "e", check=2)
        no_z = self.tmp / "noz.csv"
        no_z.write_text("q,n\n1,2\n3,4\n")
        proc = run("estimate", "--samples", no_z, "--out", self.tmp / "e", check=2)
        self.assertIn("z", proc.stderr)

    def test_events_without_calendar_exit_2(self):
        out = self.tmp / "syn"
        run("pipeline", "--synthetic", "mong-kok-up", "--days", 3, "--out", out, check=0)
        proc = run("pipeline", "--events", out / "events.csv", "--out", self.tmp / "again", check=2)
        self.assertIn("--calendar", proc.stderr)

    def test_simulate_outputs_and_optimal_cap(self):
        out = self.tmp / "sim"
        run("simulate", "--scenario", "no-control", "--scenario", "optimal-cap", "--jobs", 2, "--out", out, check=0)
        for name in ("no-control", "optimal-cap"):
            for f in ("trajectory.csv", "events.csv", "flow.csv", "metrics.csv", "time_space.svg", "flow_diagram.svg"):
                self.assertTrue((out / name / f).is_file(), f"{name}/{f}")
        nc = read_csv(out / "no-control" / "metrics.csv")[0]
        oc = read_csv(out / "optimal-cap" / "metrics.csv")[0]
        self.assertEqual(oc["queueing_detected"], "false")
        self.assertEqual(nc["queueing_detected"], "true")
        self.assertGreater(float(oc["throughput_per_hour"]), float(nc["throughput_per_hour"]))
        traj = read_csv(out / "no-control" / "trajectory.csv")
        self.assertEqual(list(traj[0].keys())[:2], ["t", "train"])
        manifest = json.loads((out / "manifest.json").read_text())
        self.assertEqual(manifest["command"], "simulate")
        paths = [o["path"] for o in manifest["outputs"]]
        self.assertEqual(paths, sorted(paths))
        self.assertNotIn("manifest.json", paths)

    def test_simulate_config_errors(self):
        run("simulate", "--config", self.tmp / "absent.cfg", "--out", self.tmp / "x", check=2)
        bad = self.tmp / "bad.cfg"
        bad.write_text("name = mine\nline.length = oops\n")
        proc = run("simulate", "--config", bad, "--out", self.tmp / "x", check=2)
        self.assertIn("line 2", proc.stderr)

    def test_simulate_is_deterministic_and_replays(self):
        a, b = self.tmp / "a", self.tmp / "b"
        run("simulate", "--scenario", "headway-control", "--seed", 7, "--out", a, check=0)
        run("simulate", "--scenario", "headway-control", "--seed", 7, "--out", b, check=0)
        self.assertEqual((a / "trajectory.csv").read_bytes(), (b / "trajectory.csv").read_bytes())
        proc = run("replay", a / "manifest.json", "--out", self.tmp / "r", check=0)
        self.assertIn("matches", proc.stdout)

    def test_replay_detects_changed_input(self):
        syn = self.tmp / "syn"
        run("pipeline", "--synthetic", "kowloon-tong-up", "--days", 4, "--out", syn, check=0)
        out = self.tmp / "re"
        run("pipeline", "--events", syn / "events.csv", "--calendar", syn / "calendar.txt", "--origin", 21600,
            "--out", out, check=0)
        run("replay", out / "manifest.json", "--out", self.tmp / "re2", check=0)
        with open(syn / "events.csv", "a") as f:
            f.write("Kowloon Tong,up,2030-01-01,1,1\n")
        run("replay", out / "manifest.json", "--out", self.tmp / "re3", check=2)

    def test_pipeline_file_contracts(self):
        out = self.tmp / "pipe"
        run("pipeline", "--synthetic", "prince-edward-down", "--days", 10, "--seed", 4, "--out", out, check=0)
        rows = read_csv(out / "instruments.csv")
        self.assertEqual(list(rows[0].keys()), ["station", "direction", "date", "day", "interval", "q", "n", "z"])
        self.assertTrue(all(int(r["day"]) >= 1 for r in rows))
        intervals = read_csv(out / "intervals.csv")
        self.assertTrue(all(int(r["arrivals"]) >= 2 for r in intervals))
        days = [l for l in (out / "calendar.txt").read_text().split() if l]
        self.assertEqual(len(days), 10)

    def test_prince_edward_moments(self):
        out = self.tmp / "pe"
        run("pipeline", "--synthetic", "prince-edward-down", "--days", 60, "--out", out, check=0)
        n = [float(r["movements"]) for r in read_csv(out / "intervals.csv")]
        mean = sum(n) / len(n)
        sd = (sum((x - mean) ** 2 for x in n) / (len(n) - 1)) ** 0.5
        self.assertLessEqual(abs(mean - 451.50), 0.05 * 451.50)
        self.assertLessEqual(abs(sd - 175.94), 0.10 * 175.94)

    def test_pipeline_from_simulation(self):
        out = self.tmp / "simpipe"
        run("pipeline", "--simulate", "no-control", "--days", 3, "--seed", 1, "--injection-floor", 120, "--out", out,
            check=0)
        self.assertGreater(len(read_csv(out / "instruments.csv")), 0)

    def test_estimate_retained_draws_and_confounded_iv(self):
        pipe = self.tmp / "conf"
        run("pipeline", "--synthetic", "prince-edward-down", "--days", 60, "--seed", 5, "--confounding", 1,
            "--out", pipe, check=0)
        out = self.tmp / "est"
        run("estimate", "--samples", pipe / "instruments.csv", "--mode", "both", "--draws", 4000, "--burn", 1000,
            "--thin", 4, "--jobs", 2, "--station", "Prince Edward", "--direction", "down", "--out", out, check=0)
        iv = json.loads((out / "iv" / "report.json").read_text())
        noniv = json.loads((out / "noniv" / "report.json").read_text())
        self.assertEqual(iv["retained_draws"], 750)
        self.assertEqual(noniv["retained_draws"], 750)
        self.assertEqual(iv["mode"], "iv")
        self.assertGreaterEqual(iv["max_flow"], noniv["max_flow"])
        lo, hi = iv["support"]
        self.assertTrue(lo <= iv["optimum_movements"] <= hi)
        self.assertAlmostEqual(iv["min_headway_minutes"], iv["interval_minutes"] / iv["max_flow"], places=9)
        for f in ("s_curve.csv", "h_curve.csv", "nu_curve.csv", "s_curve.svg"):
            self.assertTrue((out / "iv" / f).is_file(), f)
        self.assertFalse((out / "noniv" / "h_curve.csv").exists())
        curve = read_csv(out / "iv" / "s_curve.csv")
        self.assertEqual(list(curve[0].keys()), ["grid", "mean", "lower", "upper"])
        for r in curve:
            self.assertLessEqual(float(r["lower"]), float(r["mean"]))
            self.assertLessEqual(float(r["mean"]), float(r["upper"]))

    def test_estimate_is_deterministic(self):
        pipe = self.tmp / "pipe"
        run("pipeline", "--synthetic", "mong-kok-up", "--days", 20, "--out", pipe, check=0)
        outs = []
        for k in range(2):
            out = self.tmp / f"e{k}"
            run("estimate", "--samples", pipe / "instruments.csv", "--draws", 600, "--burn", 200, "--thin", 2,
                "--seed", 3, "--out", out, check=0)
            outs.append((out / "s_curve.csv").read_bytes())
        self.assertEqual(outs[0], outs[1])

    def test_invalid_mcmc_settings_exit_2(self):
        samples = self.tmp / "s.csv"
        samples.write_text("q,n,z\n" + "".join(f"{1 + i % 7},{i},{i + 1}\n" for i in range(50)))
        run("estimate", "--samples", samples, "--draws", 100, "--burn", 200, "--out", self.tmp / "e", check=2)

    def test_benchmark_same_seed_same_table(self):
        tables = []
        for k in range(2):
            out = self.tmp / f"b{k}"
            proc = run("benchmark", "--seed", 11, "--n", 3000, "--out", out)
            self.assertIn(proc.returncode, (0, 1), proc.stderr)
            self.assertIn("retained draws: 750", proc.stdout)
            tables.append((out / "benchmark.csv").read_text())
            self.assertTrue((out / "overlay.svg").is_file())
        self.assertEqual(tables[0], tables[1])
        names = [r["estimator"] for r in read_csv(self.tmp / "b0" / "benchmark.csv")]
        self.assertEqual(sorted(names), ["2sls-quadratic", "2sls-true", "bayes-np", "bayes-npiv"])

    def test_calibrate_small_sweep(self):
        out = self.tmp / "cal"
        proc = run("calibrate", "--from", 520, "--to", 550, "--step", 8, "--jobs", 2, "--out", out, check=0)
        rows = read_csv(out / "calibration.csv")
        self.assertEqual(len(rows), 4)
        self.assertIn("selected critical_pax", proc.stdout)


if __name__ == "__main__":
    BIN = os.path.abspath(sys.argv.pop(1))
    unittest.main(verbosity=2)
