"""Tests for experiment_controller module."""

import os
import shutil
import tempfile
import unittest
from fractions import Fraction

from src.controllers.experiment_controller import (
    RATIO_COLUMNS,
    ExperimentController,
    ExperimentSpec,
    family_graphs,
)
from src.controllers.trainer import TrainConfig
from src.errors import FormatError, InvalidParams
from src.utils.file_utils import read_csv_rows, read_json, write_json


class TestFamilies(unittest.TestCase):
    """Test cases for family parsing."""

    def test_families(self):
        """Test every family kind."""
        self.assertEqual(family_graphs("empty", 10, 0), [])
        self.assertEqual([g.n for g in family_graphs("star:2:4", 0, 0)], [3, 4, 5])
        self.assertEqual([g.n for g in family_graphs("path:2:3", 0, 0)], [2, 3])
        self.assertEqual(len(family_graphs("atlas:4", 0, 0)), 1 + 1 + 2 + 6)
        graphs = family_graphs("random_bounded:10:3", 5, 7)
        self.assertEqual(len(graphs), 5)
        self.assertTrue(all(g.max_degree <= 3 for g in graphs))
        self.assertEqual(graphs, family_graphs("random_bounded:10:3", 5, 7))

    def test_malformed(self):
        """Test malformed family strings."""
        for family in ("wheel:3", "star:2", "path:a:b", "random_suite:1:2:3"):
            with self.assertRaises(InvalidParams):
                family_graphs(family, 3, 0)


class TestExperimentSpec(unittest.TestCase):
    """Test cases for experiment specs."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up after tests."""
        shutil.rmtree(self.temp_dir)

    def test_seed_propagates(self):
        """Test the master seed replaces the training seed."""
        spec = ExperimentSpec(seed=11, train=TrainConfig(seed=2))
        self.assertEqual(spec.train.seed, 11)

    def test_from_file(self):
        """Test specs load from JSON with defaults for missing keys."""
        path = os.path.join(self.temp_dir, "spec.json")
        write_json(path, {"name": "demo", "seed": 4, "train": {"iterations": 5}, "model_kinds": ["mb"]})
        spec = ExperimentSpec.from_file(path)
        self.assertEqual(spec.name, "demo")
        self.assertEqual(spec.train.iterations, 5)
        self.assertEqual(spec.train.seed, 4)
        self.assertEqual(spec.model_kinds, ("mb",))
        self.assertEqual(ExperimentSpec.from_dict(spec.to_dict()), spec)

    def test_malformed(self):
        """Test bad values in a spec file."""
        with self.assertRaises(FormatError):
            ExperimentSpec.from_dict({"model_kinds": ["gcn"]})
        with self.assertRaises(InvalidParams):
            ExperimentSpec.from_dict({"count": -1})


class TestRatioExperiment(unittest.TestCase):
    """Test cases for the approximation-ratio experiment."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up after tests."""
        shutil.rmtree(self.temp_dir)

    def _run(self, family, count=0, seed=0):
        spec = ExperimentSpec(name="r", family=family, count=count, seed=seed, out_dir=self.temp_dir)
        return ExperimentController(spec).run_ratios()

    def test_stars_are_tight(self):
        """Test the all-nodes ratio on K_1,k is k+1."""
        summary = self._run("star:2:8")
        self.assertTrue(summary.passed)
        self.assertEqual(summary.graphs, 7)
        rows = read_csv_rows(summary.csv_path)
        for k, row in zip(range(2, 9), rows):
            self.assertEqual(Fraction(row["mds_ratio"]), k + 1)
            self.assertEqual(int(row["mds_bound"]), k + 1)
            self.assertEqual(row["within_bounds"], "1")
        self.assertEqual(summary.max_mds_ratio, 9)

    def test_paths_reach_two(self):
        """Test matching covers of short paths use twice the optimum."""
        summary = self._run("path:2:6")
        self.assertTrue(summary.passed)
        self.assertEqual(summary.max_vc_ratio, 2)

    def test_empty_family(self):
        """Test an empty family writes only the column line."""
        summary = self._run("empty")
        self.assertEqual(summary.graphs, 0)
        self.assertTrue(summary.passed)
        with open(summary.csv_path, "r", encoding="utf-8") as f:
            lines = [line for line in f if not line.startswith("#")]
        self.assertEqual(lines, [",".join(RATIO_COLUMNS) + "\n"])

    def test_random_family(self):
        """Test a seeded random family stays within both bounds."""
        summary = self._run("random_bounded:10:3", count=30, seed=5)
        self.assertEqual(summary.graphs, 30)
        self.assertEqual(summary.violations, 0)
        self.assertLessEqual(summary.max_vc_ratio, 2)

    def test_oversized_graphs_skipped(self):
        """Test graphs above the oracle caps are skipped."""
        summary = self._run("path:25:26")
        self.assertEqual(summary.graphs, 0)
        self.assertEqual(summary.skipped, 2)
        self.assertTrue(summary.passed)

    def test_same_seed_same_bytes(self):
        """Test two runs write identical files."""
        first = self._run("random_bounded:9:3", count=10, seed=3)
        with open(first.csv_path, "rb") as f:
            before = f.read()
        second = self._run("random_bounded:9:3", count=10, seed=3)
        with open(second.csv_path, "rb") as f:
            self.assertEqual(f.read(), before)


class TestSingleLeafExperiment(unittest.TestCase):
    """Test cases for the single-leaf training experiment."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up after tests."""
        shutil.rmtree(self.temp_dir)

    def _spec(self, out_dir):
        train = TrainConfig(iterations=20, trials=2, layer_widths=(4, 4), curve_every=10)
        return ExperimentSpec(name="s", seed=1, train=train, out_dir=out_dir)

    def _read_all(self, root):
        contents = {}
        for dirpath, _, filenames in os.walk(root):
            for name in filenames:
                full = os.path.join(dirpath, name)
                with open(full, "rb") as f:
                    contents[os.path.relpath(full, root)] = f.read()
        return contents

    def test_reports_written(self):
        """Test every report file exists and the summary lists each kind."""
        reports = ExperimentController(self._spec(self.temp_dir)).run_singleleaf()
        self.assertEqual(sorted(reports), ["mb", "sb", "vvc"])
        self.assertEqual(reports["mb"].successes, 0)
        self.assertEqual(reports["sb"].successes, 0)
        summary = read_csv_rows(os.path.join(self.temp_dir, "s_summary.csv"))
        self.assertEqual([row["kind"] for row in summary], ["vvc", "mb", "sb"])
        report = read_json(os.path.join(self.temp_dir, "s_vvc.json"))
        self.assertEqual(report["trials"][1]["checkpoint_file"], "checkpoints/s_vvc_trial1.json")
        checkpoint = read_json(os.path.join(self.temp_dir, "checkpoints", "s_vvc_trial1.json"))
        self.assertIn("header", checkpoint)
        curve = read_csv_rows(os.path.join(self.temp_dir, "s_vvc_rewards.csv"))
        self.assertEqual(len(curve), 4)

    def test_reproducible_bytes(self):
        """Test two runs into different directories write identical files."""
        first = os.path.join(self.temp_dir, "a")
        second = os.path.join(self.temp_dir, "b")
        ExperimentController(self._spec(first)).run_singleleaf()
        ExperimentController(self._spec(second), workers=2).run_singleleaf()
        self.assertEqual(self._read_all(first), self._read_all(second))


if __name__ == "__main__":
    unittest.main()
