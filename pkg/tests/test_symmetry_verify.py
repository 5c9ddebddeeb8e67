import asyncio
import math
import os
import sys
import tempfile
import unittest

import numpy as np
from pydantic import ValidationError

# 将 src 加入路径以便导入
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.guichard_lab.core.errors import ConfigError, ParseError
from src.guichard_lab.families.translation import TranslationConstants, build_translation_family
from src.guichard_lab.symmetry.batch import BatchVerifier, verify_generator_async
from src.guichard_lab.symmetry.expression import ZERO, normalize
from src.guichard_lab.symmetry.jet import h, l, param, x
from src.guichard_lab.symmetry.parser import parse
from src.guichard_lab.symmetry.prolongation import (
    VectorFieldAnsatz,
    builtin_generator,
    load_ansatz_file,
    parse_ansatz,
    prolong_first,
    zero_field,
)
from src.guichard_lab.symmetry.reduction import on_shell_reduce, substitution_rules
from src.guichard_lab.symmetry.verify import (
    FAMILIES,
    GroupAction,
    equation,
    equation_instances,
    group_action_test,
    verify_generator,
)

SQRT3 = math.sqrt(3.0)
SPECS_DIR = os.path.join(os.path.dirname(__file__), '..', 'specs')


def reduced(result) -> object:
    return normalize(parse(result.reduced))


class TestEquationInstances(unittest.TestCase):
    def test_instance_count(self):
        instances = equation_instances()
        self.assertEqual(len(instances), 31)
        self.assertEqual(sum(1 for fam, _, _ in instances if fam == "A"), 1)
        for fam in FAMILIES[1:]:
            self.assertEqual(sum(1 for f, _, _ in instances if f == fam), 6)

    def test_every_instance_vanishes_on_shell(self):
        for fam, t, expr in equation_instances():
            self.assertTrue(on_shell_reduce(expr).is_zero(), f"({fam}){t}")

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            equation("G", 1, 2, 3)


class TestBuiltinGenerator(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.report = verify_generator()

    def test_all_families_vanish(self):
        self.assertTrue(self.report.passed)
        self.assertEqual(self.report.families, {fam: True for fam in FAMILIES})
        self.assertEqual(self.report.generator, "builtin")
        self.assertEqual(self.report.failing(), [])
        for r in self.report.instances:
            self.assertEqual(r.reduced, "0")

    def test_json_layout(self):
        data = self.report.to_json_dict()
        self.assertTrue(data["pass"])
        self.assertEqual(len(data["instances"]), 31)
        self.assertEqual(data["instances"][1]["indices"], [1, 2, 3])

    def test_async_matches_sync(self):
        report = asyncio.run(verify_generator_async(max_concurrency=3))
        self.assertEqual(report.model_dump(), self.report.model_dump())

    def test_batch_verifier_keeps_order(self):
        report = asyncio.run(BatchVerifier(max_concurrency=1).verify(builtin_generator()))
        self.assertEqual([r.family for r in report.instances], [fam for fam, _, _ in equation_instances()])

    def test_zero_field(self):
        self.assertTrue(verify_generator(zero_field()).passed)

    def test_specialized_parameters(self):
        # translations only, dilation of l only, dilation of x only
        base = builtin_generator()
        for overrides in (
            {"xi1": param("a1"), "xi2": param("a2"), "xi3": param("a3"), **{f"phi{i}{j}": ZERO for i in (1, 2, 3) for j in (1, 2, 3) if i != j}},
            {"xi1": ZERO, "xi2": ZERO, "xi3": ZERO, **{f"phi{i}{j}": ZERO for i in (1, 2, 3) for j in (1, 2, 3) if i != j}},
            {"eta1": ZERO, "eta2": ZERO, "eta3": ZERO},
        ):
            self.assertTrue(verify_generator(base.with_components(overrides)).passed, overrides)


class TestPerturbedFields(unittest.TestCase):
    def test_wrong_sign_in_one_component(self):
        report = verify_generator(parse_ansatz("phi12 = a*h12"))
        self.assertFalse(report.passed)
        self.assertFalse(report.families["D"])
        d123 = next(r for r in report.instances if r.family == "D" and r.indices == [1, 2, 3])
        self.assertEqual(reduced(d123), 2 * param("a") * h(1, 3) * h(3, 2))

    def test_wrong_sign_everywhere(self):
        text = "\n".join(f"phi{i}{j} = a*h{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3) if i != j)
        report = verify_generator(parse_ansatz(text))
        self.assertFalse(report.families["D"])
        # (A)-(C) do not involve h-derivatives
        self.assertTrue(report.families["A"])

    def test_inhomogeneous_eta(self):
        report = verify_generator(parse_ansatz("eta1 = c*l1 + 1"))
        self.assertFalse(report.families["A"])
        self.assertFalse(report.families["C"])
        # only instances containing l1 pick up the extra term
        c123 = next(r for r in report.instances if r.family == "C" and r.indices == [1, 2, 3])
        self.assertTrue(c123.zero)
        c213 = next(r for r in report.instances if r.family == "C" and r.indices == [2, 1, 3])
        self.assertEqual(reduced(c213), h(1, 2))
        a = next(r for r in report.instances if r.family == "A")
        self.assertEqual(reduced(a), 2 * l(1))

    def test_unequal_dilations_of_l(self):
        report = verify_generator(parse_ansatz("eta2 = 2*c*l2"))
        self.assertFalse(report.passed)
        self.assertFalse(report.families["A"])


class TestAnsatzFiles(unittest.TestCase):
    def test_parse_with_comments(self):
        v = parse_ansatz("# field\n\nxi1 = a*x1   # keep a1 out\neta3 = c*l3\n")
        self.assertEqual(v.name, "ansatz")
        self.assertEqual(v.xi[0], param("a") * x(1))
        self.assertEqual(v.xi[1], builtin_generator().xi[1])
        self.assertEqual(v.eta[2], param("c") * l(3))

    def test_error_offsets(self):
        with self.assertRaises(ParseError) as ctx:
            parse_ansatz("xi1 = x1 +")
        self.assertEqual(ctx.exception.offset, 10)
        self.assertTrue(ctx.exception.reason.startswith("line 1:"))

        with self.assertRaises(ParseError) as ctx:
            parse_ansatz("xi1 = x1\nzeta = 1")
        self.assertIn("line 2", str(ctx.exception))

        with self.assertRaises(ParseError):
            parse_ansatz("xi1 = x1\nxi1 = x2")
        with self.assertRaises(ParseError):
            parse_ansatz("xi1 x1")
        with self.assertRaises(ParseError):
            parse_ansatz("eta1 = l1_x1")

    def test_jets_rejected_in_constructor(self):
        with self.assertRaises(ValueError):
            VectorFieldAnsatz(xi=(x(1), x(2), parse("h12_x1")), eta=(l(1), l(2), l(3)))

    def test_load_file(self):
        v = load_ansatz_file(os.path.join(SPECS_DIR, 'builtin_ansatz.txt'))
        self.assertEqual(v.components(), builtin_generator().components())
        with self.assertRaises(ConfigError):
            load_ansatz_file(os.path.join(tempfile.gettempdir(), 'no_such_ansatz.txt'))


class TestProlongation(unittest.TestCase):
    def test_coefficients_of_builtin(self):
        pr = prolong_first(builtin_generator())
        a, c = param("a"), param("c")
        # eta^{1,2} = D_2(c l1) - a l1_x2
        self.assertEqual(pr.coefficient("l1_x2"), (c - a) * normalize(parse("l1_x2")))
        # phi^{12,3} = D_3(-a h12) - a h12_x3
        self.assertEqual(pr.coefficient("h12_x3"), -2 * a * normalize(parse("h12_x3")))
        self.assertTrue(pr.coefficient("a").is_zero())

    def test_soundness_on_a_solution(self):
        # Every rewrite rule holds for the exact jets of the c = (1, -1, -2) family at xi = 0
        alpha = np.array([SQRT3, 1.0, 2.0])
        c = np.array([1.0, -1.0, -2.0])
        lv = np.array([1.0, SQRT3, math.sqrt(2.0)])
        lp = c * np.array([lv[1] * lv[2], lv[0] * lv[2], lv[0] * lv[1]])
        values = {f"l{i + 1}": lv[i] for i in range(3)}
        for i in range(3):
            for k in range(3):
                values[f"l{i + 1}_x{k + 1}"] = lp[i] * alpha[k]
            for j in range(3):
                if i == j:
                    continue
                m = 3 - i - j
                values[f"h{i + 1}{j + 1}"] = lp[i] * alpha[j] / lv[j]
                for k in range(3):
                    values[f"h{i + 1}{j + 1}_x{k + 1}"] = alpha[j] * alpha[k] * c[i] * c[m] * lv[i] * lv[j]
        for jet, rule in substitution_rules().items():
            self.assertAlmostEqual(rule.evaluate(values), values[jet], places=12, msg=jet)


class TestGroupActions(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        tc = TranslationConstants(alpha=(SQRT3, 1.0, 2.0), c=(1.0, -1.0, -2.0), lambda_=-4.0, l1_0=1.0)
        cls.net = build_translation_family(tc, (-0.25, 0.3))

    def test_actions_preserve_solutions(self):
        for action in (
            GroupAction(kind="translate", vector=(1.0, -2.0, 0.5)),
            GroupAction(kind="dilate_x", factor=3.0),
            GroupAction(kind="dilate_l", factor=2.0),
        ):
            report = group_action_test(self.net, action, counts=9)
            self.assertEqual(report.tolerance, 1e-8)
            self.assertTrue(report.passed, action.label())
            self.assertEqual(report.kind, f"group_action:{action.kind}")

    def test_invalid_actions(self):
        with self.assertRaises(ValidationError):
            GroupAction(kind="dilate_x", factor=0.0)
        with self.assertRaises(ValidationError):
            GroupAction(kind="translate")
        self.assertEqual(GroupAction(kind="dilate_l", factor=2.0).label(), "dilate_l(2)")


if __name__ == '__main__':
    unittest.main()
