import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from typing import List, Tuple

from neuron_resync.cli import main, parse_args
from neuron_resync.core.errors import UsageError

EPOCHS = "5"


def run(argv: List[str]) -> Tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class TestCommandLine(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls.tmp.name)
        cls.model = str(cls.root / "ref.nwrs")
        code, _, err = run(["gen-model", "--out", cls.model, "--epochs", EPOCHS])
        assert code == 0, err

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def path(self, name: str) -> str:
        return str(self.root / name)

    def test_permute_then_resync_scores_psi(self):
        suspect, perm = self.path("perm.nwrs"), self.path("perm.json")
        code, _, _ = run(["permute", "--in", self.model, "--seed", "3", "--out", suspect, "--perm-out", perm])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(Path(perm).read_text())["layer"], 1)

        fixed, report = self.path("fixed.nwrs"), self.path("report.json")
        code, out, _ = run(
            ["resync", "--ref", self.model, "--suspect", suspect, "--true-perm", perm]
            + ["--out", fixed, "--report", report]
        )
        self.assertEqual(code, 0)
        self.assertEqual(out.strip(), "psi=100.0")
        self.assertEqual(json.loads(Path(report).read_text())["overallPsi"], 100.0)

        code, _, _ = run(["verify", "--ref", self.model, "--suspect", fixed, "--verdict", self.path("v.json")])
        self.assertEqual(code, 0)

    def test_verify_exit_codes(self):
        code, out, _ = run(["verify", "--ref", self.model, "--suspect", self.model])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["layerVerdict"], "clean")

        scaled = self.path("scaled.nwrs")
        run(
            ["perturb", "--in", self.model, "--kind", "scalar", "--param", "0.1"]
            + ["--layer", "1", "--neuron", "3", "--out", scaled]
        )
        code, out, _ = run(["verify", "--ref", self.model, "--suspect", scaled])
        self.assertEqual(code, 2)
        flagged = [n["index"] for n in json.loads(out)["neurons"] if n["flag"] == "scaled"]
        self.assertEqual(flagged, [3])

        corrected = self.path("corrected.nwrs")
        run(["verify", "--ref", self.model, "--suspect", scaled, "--correct", "--out", corrected])
        code, _, _ = run(["verify", "--ref", self.model, "--suspect", corrected])
        self.assertEqual(code, 0)

        noisy = self.path("noisy.nwrs")
        run(["perturb", "--in", self.model, "--kind", "gauss", "--param", "0.5", "--out", noisy])
        code, _, _ = run(["verify", "--ref", self.model, "--suspect", noisy])
        self.assertEqual(code, 3)

    def test_correct_needs_out(self):
        code, _, err = run(["verify", "--ref", self.model, "--suspect", self.model, "--correct"])
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: validation:"))

    def test_kl(self):
        code, out, _ = run(["kl", "--k", "0", "--relu"])
        self.assertEqual(code, 0)
        lines = out.splitlines()
        self.assertEqual(lines[0], "0.0")
        self.assertTrue(lines[1].startswith("mc="))

        code, out, _ = run(["kl", "--k", "1", "--bound"])
        self.assertEqual(code, 0)
        self.assertAlmostEqual(float(out.splitlines()[0]), 0.3181471805599453, places=12)

        code, _, err = run(["kl", "--k", "-1"])
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: domain:"))

    def test_sweep_writes_csv(self):
        table = self.path("sweep/gauss.csv")
        code, _, _ = run(
            ["sweep", "--kind", "gauss", "--params", "0,0.1", "--seeds", "2", "--ref", self.model, "--csv", table]
        )
        self.assertEqual(code, 0)
        with open(table, newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual(len(rows), 4)
        cells = [(r["param"], r["seed"]) for r in rows]
        self.assertEqual(cells, [("0.0", "0"), ("0.0", "1"), ("0.1", "0"), ("0.1", "1")])
        self.assertTrue(all(float(r["psi"]) == 100.0 for r in rows if r["param"] == "0.0"))

    def test_watermark_round_trip(self):
        marked, key = self.path("wm.nwrs"), self.path("wm.json")
        code, _, _ = run(["wm", "embed", "--out", marked, "--key", key, "--bits", "8", "--epochs", EPOCHS])
        self.assertEqual(code, 0)
        self.assertIn("bits", json.loads(Path(key).read_text()))

        code, out, _ = run(["wm", "extract", "--in", marked, "--key", key])
        self.assertEqual(code, 0)
        pearson_line, ber_line = out.splitlines()
        self.assertTrue(pearson_line.startswith("pearson="))
        self.assertTrue(0.0 <= float(ber_line.removeprefix("ber=")) <= 1.0)


class TestErrors(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.root = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_missing_file_is_io_error(self):
        code, _, err = run(["permute", "--in", str(self.root / "absent.nwrs"), "--out", str(self.root / "x.nwrs")])
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: io:"))

    def test_usage_errors(self):
        for argv in (["permute"], ["bogus"], ["perturb", "--in", "a", "--out", "b", "--kind", "melt", "--param", "1"]):
            code, _, err = run(argv)
            self.assertEqual(code, 1)
            self.assertTrue(err.startswith("error: usage:"), argv)
        with self.assertRaises(UsageError):
            parse_args(["sweep", "--kind", "gauss", "--csv", "x", "--params", "0,abc"])

    def test_output_layer_cannot_be_permuted(self):
        model = str(self.root / "m.nwrs")
        run(["gen-model", "--out", model, "--epochs", "0"])
        code, _, err = run(["permute", "--in", model, "--layer", "2", "--out", str(self.root / "p.nwrs")])
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: permutation:"))

    def test_corrupt_container(self):
        bad = self.root / "bad.nwrs"
        bad.write_bytes(b"not a container at all")
        code, _, err = run(["verify", "--ref", str(bad), "--suspect", str(bad)])
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: format:"))

    def test_unknown_setting(self):
        config = self.root / "settings.yml"
        config.write_text("resync_method: greedy\nbogus_key: 1\n")
        code, _, err = run(["--config", str(config), "kl", "--k", "0.5"])
        self.assertEqual(code, 1)
        self.assertTrue(err.startswith("error: validation:"))
        self.assertIn("bogus_key", err)

    def test_broken_settings_file(self):
        config = self.root / "settings.yml"
        for text in ("cosine_eps: [1, 2\n", "cosine_eps: abc\n"):
            config.write_text(text)
            code, _, err = run(["--config", str(config), "kl", "--k", "0.5"])
            self.assertEqual(code, 1)
            self.assertTrue(err.startswith("error: validation:"), err)
            self.assertEqual(len(err.strip().splitlines()), 1)


if __name__ == "__main__":
    unittest.main()
