import asyncio
import contextlib
import io
import json
import os
import shutil
import sys
import tempfile
import time
import unittest
from pathlib import Path

# 将 src 加入路径以便导入
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.guichard_lab.cli import run
from src.guichard_lab.core.cache import NetCache
from src.guichard_lab.core.errors import ConfigError
from src.guichard_lab.core.monitoring import PerformanceMonitor
from src.guichard_lab.export import csv_text, format_float, gnuplot_text, json_text
from src.guichard_lab.utils import parse_grid, parse_tolerances, parse_vector, setup_console_encoding

SPECS_DIR = Path(__file__).resolve().parent.parent / 'specs'
ELLIPTIC = str(SPECS_DIR / 'elliptic.json')


def run_cli(*argv: str) -> tuple[int, str]:
    """Run the CLI and capture stdout."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = asyncio.run(run(list(argv)))
    return code, buf.getvalue()


class TestParsing(unittest.TestCase):
    def test_grid(self):
        self.assertEqual(parse_grid("3x4x5"), (3, 4, 5))
        self.assertEqual(parse_grid("7"), (7, 7, 7))
        for bad in ("3x4", "axbxc", "3x4x5x6"):
            with self.assertRaises(ConfigError):
                parse_grid(bad)

    def test_vector(self):
        self.assertEqual(parse_vector("1,-2,0.5"), (1.0, -2.0, 0.5))
        with self.assertRaises(ConfigError):
            parse_vector("1,2")

    def test_tolerances(self):
        self.assertEqual(parse_tolerances(["first_order=1e-9", "cyclic = 0.5"]), {"first_order": 1e-9, "cyclic": 0.5})
        with self.assertRaises(ConfigError):
            parse_tolerances(["first_order"])
        with self.assertRaises(ConfigError):
            parse_tolerances(["first_order=abc"])


class TestConsoleEncoding(unittest.TestCase):
    def test_non_utf8_stream_escapes(self):
        raw = io.BytesIO()
        stream = io.TextIOWrapper(raw, encoding="ascii")
        setup_console_encoding([stream])
        stream.write("phi12 = \u03c6\n")
        stream.flush()
        self.assertEqual(raw.getvalue(), b"phi12 = \\u03c6\n")

    def test_utf8_and_plain_streams_untouched(self):
        utf8 = io.TextIOWrapper(io.BytesIO(), encoding="utf-8")
        setup_console_encoding([utf8, io.StringIO()])
        self.assertEqual(utf8.errors, "strict")


class TestWriters(unittest.TestCase):
    def test_float_format(self):
        self.assertEqual(format_float(0.1), "0.10000000000000001")
        self.assertEqual(format_float(2), "2")

    def test_csv(self):
        text = csv_text(["a", "b", "ok"], [[1, 0.5, True], [2, 0.25, False]])
        self.assertEqual(text, "a,b,ok\n1,0.5,true\n2,0.25,false\n")

    def test_gnuplot(self):
        text = gnuplot_text(["xi", "l1"], [[0.0, 1.0]], {"seed": 0})
        self.assertEqual(text.splitlines(), ["# seed: 0", "# xi l1", "0 1"])

    def test_json_floats(self):
        text = json_text({"v": 0.1, "n": [2.0, 3, True, None], "tol": 1e-8, "empty": {}})
        self.assertIn('"v": 0.10000000000000001', text)
        self.assertIn('"tol": 1e-08', text)
        self.assertIn("2.0,", text)
        self.assertIn('"empty": {}', text)
        data = json.loads(text)
        self.assertEqual(data, {"v": 0.1, "n": [2.0, 3, True, None], "tol": 1e-8, "empty": {}})
        self.assertIsInstance(data["n"][0], float)
        self.assertIsInstance(data["n"][1], int)
        self.assertEqual(list(data), ["empty", "n", "tol", "v"])


class TestNetCache(unittest.TestCase):
    def test_hit_and_expiry(self):
        cache = NetCache(ttl=3600)
        spec = {"type": "constant", "l": [1, 1, 1]}
        self.assertIsNone(cache.get(spec))
        cache.set(spec, "net")
        self.assertEqual(cache.get({"l": [1, 1, 1], "type": "constant"}), "net")
        self.assertEqual(cache.size(), 1)
        cache.clear()
        self.assertEqual(cache.size(), 0)

        short = NetCache(ttl=0)
        short.set(spec, "net")
        time.sleep(0.01)
        self.assertIsNone(short.get(spec))


class TestPerformanceMonitor(unittest.TestCase):
    def test_measure_and_reset(self):
        monitor = PerformanceMonitor()
        for _ in range(2):
            with monitor.measure("build.constant"):
                pass
        with self.assertRaises(ZeroDivisionError):
            with monitor.measure("symmetry.verify"):
                1 / 0
        stats = monitor.get_stats("build.constant")
        self.assertEqual(stats["count"], 2)
        self.assertLessEqual(stats["min"], stats["max"])
        self.assertEqual(list(monitor.get_all_stats()), ["build.constant", "symmetry.verify"])
        self.assertIsNone(monitor.get_stats("missing"))
        monitor.reset()
        self.assertEqual(monitor.get_all_stats(), {})


class TestCommands(unittest.TestCase):
    def setUp(self):
        self.tmp = Path(tempfile.mkdtemp())

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write_spec(self, name: str, data: dict) -> str:
        path = self.tmp / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    def test_verify_passes_on_elliptic_family(self):
        out = self.tmp / "report.json"
        code, _ = run_cli("verify", "--spec", ELLIPTIC, "--grid", "3", "--out", str(out), "--no-cache")
        self.assertEqual(code, 0)
        data = json.loads(out.read_text(encoding="utf-8"))
        self.assertTrue(data["pass"])
        self.assertEqual(data["header"]["grid"], [3, 3, 3])
        self.assertEqual(data["header"]["spec"]["type"], "translation")
        self.assertEqual(data["first_order"]["points"], 27)

    def test_verify_fails_on_non_guichard_net(self):
        spec = self.write_spec("constant.json", {"type": "constant", "l": [1, 1, 1]})
        code, text = run_cli("verify", "--spec", spec, "--grid", "3", "--no-cache")
        self.assertEqual(code, 2)
        self.assertFalse(json.loads(text)["pass"])

    def test_verify_finite_difference_spec(self):
        data = json.loads(Path(ELLIPTIC).read_text(encoding="utf-8"))
        spec = self.write_spec("fd.json", {**data, "derivatives": "finite_difference"})
        out = self.tmp / "fd_report.json"
        code, _ = run_cli("verify", "--spec", spec, "--out", str(out), "--no-cache")
        self.assertEqual(code, 0)
        report = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(report["first_order"]["tolerance"], 1e-6)
        self.assertEqual(report["first_order"]["points"], 729)
        self.assertTrue(report["pass"])

    def test_verify_csv_to_stdout(self):
        code, text = run_cli("verify", "--spec", ELLIPTIC, "--grid", "3", "--format", "csv", "--no-cache")
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertEqual(lines[0], "kind,family,max_abs,mean_abs,pass,x1,x2,x3")
        self.assertTrue(all(line.split(",")[4] == "true" for line in lines[1:]))

    def test_geometry_csv_writes_companion_files(self):
        out = self.tmp / "curvature.csv"
        code, _ = run_cli("geometry", "--spec", ELLIPTIC, "--grid", "3", "--levels", "2", "--format", "csv", "--out", str(out))
        self.assertEqual(code, 0)
        rows = out.read_text(encoding="utf-8").splitlines()
        self.assertEqual(rows[0], "x1,x2,x3,K1,K2,K3,sum")
        self.assertEqual(len(rows), 28)
        for row in rows[1:]:
            self.assertLess(abs(float(row.split(",")[-1])), 1e-9)
        levels = (self.tmp / "curvature_levels.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(len(levels), 3)
        cyclicity = json.loads((self.tmp / "curvature_cyclicity.json").read_text(encoding="utf-8"))
        self.assertEqual(cyclicity["classification"], "non_cyclic")
        self.assertEqual(cyclicity["criterion_pairs"], [[1, 2], [2, 3]])
        self.assertEqual([p["pair"] for p in cyclicity["pairs"]], [[1, 2], [1, 3], [2, 3]])
        self.assertIn("pair (1, 3)", cyclicity["note"])

    def test_geometry_json_and_gnuplot(self):
        code, text = run_cli("geometry", "--spec", ELLIPTIC, "--grid", "3", "--levels", "2")
        self.assertEqual(code, 0)
        data = json.loads(text)
        self.assertEqual(len(data["curvature"]["rows"]), 27)
        self.assertEqual(len(data["level_sets"]), 2)
        self.assertLess(data["max_abs_sum"], 1e-9)

        code, text = run_cli("geometry", "--spec", ELLIPTIC, "--grid", "3", "--levels", "2", "--format", "gnuplot")
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertIn("# xi l1 l2 l3 K1 K2 K3", lines)
        self.assertEqual(len([line for line in lines if not line.startswith("#")]), 31)

    def test_geometry_is_deterministic(self):
        outputs = []
        for name in ("a.json", "b.json"):
            out = self.tmp / name
            code, _ = run_cli("geometry", "--spec", ELLIPTIC, "--grid", "3", "--levels", "2", "--seed", "11", "--out", str(out), "--no-cache")
            self.assertEqual(code, 0)
            outputs.append(out.read_bytes())
        self.assertEqual(outputs[0], outputs[1])

    def test_symmetry_builtin(self):
        out = self.tmp / "symmetry.json"
        code, text = run_cli("symmetry", "--out", str(out))
        self.assertEqual(code, 0)
        self.assertIn("(F) zero: true", text)
        data = json.loads(out.read_text(encoding="utf-8"))
        self.assertTrue(data["pass"])
        self.assertTrue(data["symmetry"]["pass"])
        self.assertNotIn("group_actions", data)

    def test_symmetry_with_group_actions(self):
        out = self.tmp / "symmetry.json"
        code, _ = run_cli("symmetry", "--spec", ELLIPTIC, "--out", str(out))
        self.assertEqual(code, 0)
        data = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual([a["action"]["kind"] for a in data["group_actions"]], ["translate", "dilate_x", "dilate_l"])
        for action in data["group_actions"]:
            self.assertEqual(action["tolerance"], 1e-8)
            self.assertEqual(action["points"], 729)
            self.assertTrue(action["pass"])

        code, _ = run_cli("symmetry", "--spec", ELLIPTIC, "--grid", "3", "--dilate-l", "5", "--out", str(out))
        self.assertEqual(code, 0)
        data = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(len(data["group_actions"]), 1)

    def test_symmetry_failing_ansatz(self):
        ansatz = self.tmp / "field.txt"
        ansatz.write_text("phi12 = a*h12\n", encoding="utf-8")
        code, text = run_cli("symmetry", "--ansatz", str(ansatz))
        self.assertEqual(code, 2)
        self.assertIn("(D) zero: false", text)

        ansatz.write_text("xi1 = x1 +\n", encoding="utf-8")
        code, _ = run_cli("symmetry", "--ansatz", str(ansatz))
        self.assertEqual(code, 1)

    def test_export(self):
        out = self.tmp / "net.csv"
        code, _ = run_cli("export", "--spec", ELLIPTIC, "--grid", "3", "--format", "csv", "--translate", "1,-2,0.5", "--out", str(out))
        self.assertEqual(code, 0)
        rows = out.read_text(encoding="utf-8").splitlines()
        self.assertEqual(rows[0], "x1,x2,x3,l1,l2,l3")
        self.assertEqual(len(rows), 28)
        for row in rows[1:]:
            l1, l2, l3 = (float(v) for v in row.split(",")[3:])
            self.assertAlmostEqual(l1 ** 2 - l2 ** 2 + l3 ** 2, 0.0, places=10)

    def test_usage_errors(self):
        self.assertEqual(run_cli("verify", "--spec", ELLIPTIC, "--tol", "first_order=-1")[0], 1)
        self.assertEqual(run_cli("verify", "--spec", ELLIPTIC, "--tol", "bogus=1e-3")[0], 1)
        self.assertEqual(run_cli("verify", "--spec", ELLIPTIC, "--grid", "2")[0], 1)
        self.assertEqual(run_cli("verify", "--spec", ELLIPTIC, "--grid", "abc")[0], 1)
        self.assertEqual(run_cli("verify")[0], 1)
        self.assertEqual(run_cli("verify", "--spec", str(self.tmp / "missing.json"))[0], 1)
        self.assertEqual(run_cli("export", "--spec", self.write_spec("bad.json", {"type": "constant", "l": [0, 1, 1]}))[0], 1)
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                run_cli("frobnicate")
        self.assertEqual(ctx.exception.code, 1)


if __name__ == '__main__':
    unittest.main()
