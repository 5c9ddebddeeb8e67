import json
import math
import os
import sys
import tempfile
import unittest
from pathlib import Path

import numpy as np
from pydantic import ValidationError
from scipy.integrate import solve_ivp

# 将 src 加入路径以便导入
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.guichard_lab.core.errors import ConfigError, ConstraintError, DomainError, DomainShrunkError
from src.guichard_lab.families.dilation import DilationConstants, build_dilation_family, dilation_profile
from src.guichard_lab.families.one_constant import OneConstantFamily, build_one_constant_family
from src.guichard_lab.families.registry import build_net, load_family_spec, parse_family_spec
from src.guichard_lab.families.translation import (
    TranslationConstants,
    admissible_xi_interval,
    build_translation_family,
    classify_regime,
    closed_form_l1,
    conserved_quantities,
    elliptic_period,
    integrate_translation_profile,
)
from src.guichard_lab.geometry.curvature import curvature_row
from src.guichard_lab.lame.net import Box
from src.guichard_lab.lame.residuals import first_order_residuals, guichard_residual

SQRT3 = math.sqrt(3.0)


def example_constants(**overrides) -> TranslationConstants:
    data = {"alpha": (SQRT3, 1.0, 2.0), "c": (1.0, -1.0, -2.0), "lambda": -4.0, "l1_0": 1.0}
    data.update(overrides)
    return TranslationConstants(**data)


class TestTranslationConstants(unittest.TestCase):
    def test_example_is_valid(self):
        tc = example_constants()
        self.assertEqual(tc.violations(), [])
        np.testing.assert_allclose(tc.initial_state(), [1.0, SQRT3, math.sqrt(2.0)], rtol=1e-15)
        self.assertAlmostEqual(tc.quartic_rhs(1.0), 6.0, places=14)

    def test_violations_are_listed(self):
        tc = example_constants(c=(1.0, 1.0, 1.0))
        errors = tc.violations()
        self.assertTrue(any("c1 - c2 + c3" in e for e in errors))
        with self.assertRaises(ConstraintError) as ctx:
            tc.validate_relations()
        self.assertTrue(ctx.exception.violations)

    def test_alpha_relation(self):
        errors = example_constants(alpha=(1.0, 1.0, 2.0)).violations()
        self.assertTrue(any("alpha1^2" in e for e in errors))

    def test_initial_values_must_be_positive(self):
        # lambda = 1: l2(0)^2 = (c2 - lambda) / c1 = -2
        errors = example_constants(**{"lambda": 1.0}).violations()
        self.assertTrue(any("l2(0)^2" in e for e in errors))

    def test_sign_of_l1_prime(self):
        self.assertEqual(example_constants(sign_l1prime=1).violations(), [])
        self.assertEqual(len(example_constants(sign_l1prime=-1).violations()), 1)

    def test_l1_0_must_be_positive(self):
        with self.assertRaises(ValidationError):
            example_constants(l1_0=0.0)


class TestTranslationProfile(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tc = example_constants()
        cls.net = build_translation_family(cls.tc, (-0.25, 0.3))

    def test_admissible_interval(self):
        lo, hi = admissible_xi_interval(self.tc, (-1.0, 1.0))
        # l1 -> 0 on the left, l3 -> 0 on the right
        self.assertTrue(-0.30 < lo < -0.28, lo)
        self.assertTrue(0.355 < hi < 0.365, hi)

    def test_domain_shrunk(self):
        with self.assertRaises(DomainShrunkError) as ctx:
            integrate_translation_profile(self.tc, (-1.0, 1.0))
        lo, hi = ctx.exception.admissible
        self.assertTrue(-0.30 < lo < -0.28)
        self.assertTrue(0.355 < hi < 0.365)

    def test_clip(self):
        net = build_translation_family(self.tc, (-1.0, 1.0), clip=True)
        lo, hi = net.invariant.xi_range
        self.assertTrue(-0.30 < lo < -0.28)
        self.assertTrue(0.355 < hi < 0.365)

    def test_range_must_contain_zero(self):
        with self.assertRaises(ConstraintError):
            integrate_translation_profile(self.tc, (0.1, 0.2))

    def test_guichard_and_conserved_quantities(self):
        for xi in np.linspace(-0.24, 0.29, 23):
            l, lp = self.net.invariant.profile(float(xi))
            self.assertAlmostEqual(l[0] ** 2 - l[1] ** 2 + l[2] ** 2, 0.0, delta=1e-10)
            for value in conserved_quantities(self.net, float(xi)):
                self.assertAlmostEqual(value, -4.0, delta=1e-8)
            self.assertAlmostEqual(lp[0] ** 2, self.tc.quartic_rhs(l[0]), delta=1e-9)

    def test_matches_independent_integrator(self):
        for end in (-0.24, 0.29):
            sol = solve_ivp(lambda t, y: self.tc.rhs(y), (0.0, end), self.tc.initial_state(), method="DOP853", rtol=1e-12, atol=1e-14)
            np.testing.assert_allclose(self.net.invariant.profile(end)[0], sol.y[:, -1], rtol=0, atol=1e-8)

    def test_closed_form(self):
        reduction = classify_regime(self.tc)
        self.assertEqual(reduction.regime, "lower")
        self.assertEqual(reduction.roots, (0.0, 2.0, 4.0))
        self.assertAlmostEqual(reduction.k, math.sqrt(0.5), places=15)
        self.assertAlmostEqual(closed_form_l1(self.tc, 0.0, reduction), 1.0, places=12)
        for xi in np.linspace(-0.24, 0.29, 12):
            expected = self.net.invariant.profile(float(xi))[0][0]
            self.assertAlmostEqual(closed_form_l1(self.tc, float(xi), reduction), expected, delta=1e-8)

    def test_period(self):
        k = math.sqrt(0.5)
        # K(1/sqrt 2) = 1.8540746773013719
        self.assertAlmostEqual(elliptic_period(self.tc), 2.0 * 1.8540746773013719 / math.sqrt(8.0), places=12)
        self.assertGreater(classify_regime(self.tc).omega, 0.0)
        self.assertAlmostEqual(classify_regime(self.tc).omega, math.sqrt(8.0), places=14)
        self.assertLess(k, 1.0)

    def test_box_outside_range(self):
        with self.assertRaises(DomainShrunkError):
            build_translation_family(self.tc, (-0.25, 0.3), domain=Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)))

    def test_net_passes_first_order(self):
        self.assertTrue(first_order_residuals(self.net, grid=self.net.domain.grid(4)).passed)
        self.assertEqual(self.net.family, "translation")
        self.assertEqual(self.net.params["lambda"], -4.0)


class TestOneConstantFamilies(unittest.TestCase):
    def check_solution(self, family: OneConstantFamily, box: Box):
        net = build_one_constant_family(family, box)
        report = first_order_residuals(net, grid=box.grid(4))
        self.assertTrue(report.passed, report.model_dump())
        for p in box.grid(3):
            self.assertAlmostEqual(guichard_residual(net, p), 0.0, delta=1e-12)
            for k in curvature_row(net, p):
                self.assertEqual(k, 0.0)
        return net

    def test_case_a(self):
        family = OneConstantFamily(case="a", lambda_const=1.0, b=1.0, xi0=0.0, alpha=(1.0, 1.0))
        net = self.check_solution(family, Box((-1.0, 0.5, 0.5), (1.0, 1.5, 1.5)))
        p = np.array([0.0, 1.0, 1.0])
        np.testing.assert_allclose(net.l(p), [1.0, math.cosh(2.0), math.sinh(2.0)], rtol=1e-15)

    def test_case_b1(self):
        family = OneConstantFamily(case="b1", lambda_const=2.0, b=1.0, xi0=0.0, alpha=(1.0, 2.0))
        self.check_solution(family, Box((0.1, -1.0, 0.1), (0.3, 1.0, 0.3)))

    def test_case_b2_with_user_phi(self):
        family = OneConstantFamily(case="b2", lambda_const=1.0, alpha=(1.0, 1.0), phi_poly=[0.0, 0.0, 1.0])
        net = self.check_solution(family, Box((0.2, -1.0, 0.2), (0.5, 1.0, 0.5)))
        p = np.array([0.3, 0.0, 0.4])
        self.assertAlmostEqual(net.phi_fn(p), 0.49, places=15)

    def test_case_b2_callable_without_derivative(self):
        family = OneConstantFamily(case="b2", lambda_const=1.0, alpha=(1.0, -1.0), user_phi=lambda xi: 0.5 + 0.2 * math.sin(xi))
        box = Box((0.2, -1.0, 0.2), (0.5, 1.0, 0.5))
        net = build_one_constant_family(family, box)
        self.assertEqual(net.derivative_mode.kind, "finite_difference")
        report = first_order_residuals(net, grid=box.grid(9))
        self.assertEqual(report.tolerance, 1e-6)
        self.assertTrue(report.passed, report.model_dump())

    def test_case_c(self):
        family = OneConstantFamily(case="c", lambda_const=1.0, b=0.5, xi0=0.1, alpha=(1.0, 1.0))
        self.check_solution(family, Box((0.5, 0.5, -1.0), (1.5, 1.5, 1.0)))

    def test_case_gates(self):
        with self.assertRaises(ConstraintError):
            build_one_constant_family(
                OneConstantFamily(case="b1", lambda_const=1.0, alpha=(1.0, 1.0)),
                Box((0.1, -1.0, 0.1), (0.3, 1.0, 0.3)),
            )
        with self.assertRaises(ConstraintError):
            build_one_constant_family(
                OneConstantFamily(case="b2", lambda_const=1.0, alpha=(1.0, 2.0)),
                Box((0.1, -1.0, 0.1), (0.3, 1.0, 0.3)),
            )
        with self.assertRaises(ConstraintError):
            build_one_constant_family(
                OneConstantFamily(case="a", lambda_const=1.0, alpha=(1.0, 1.0, 1.0)),
                Box((0.1, 0.1, 0.1), (0.3, 0.3, 0.3)),
            )
        with self.assertRaises(ConstraintError):
            build_one_constant_family(
                OneConstantFamily(case="a", lambda_const=0.0, alpha=(1.0, 1.0)),
                Box((0.1, 0.1, 0.1), (0.3, 0.3, 0.3)),
            )

    def test_positivity(self):
        # sinh(phi) <= 0 where x2 + x3 <= 0
        with self.assertRaises(DomainError):
            build_one_constant_family(
                OneConstantFamily(case="a", lambda_const=1.0, alpha=(1.0, 1.0)),
                Box((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)),
            )
        with self.assertRaises(DomainError):
            build_one_constant_family(
                OneConstantFamily(case="b1", lambda_const=1.0, alpha=(1.0, 2.0)),
                Box((0.1, -1.0, 0.1), (1.0, 1.0, 1.0)),
            )


class TestDilationFamilies(unittest.TestCase):
    def check_solution(self, d: DilationConstants, box: Box):
        net = build_dilation_family(d, box)
        report = first_order_residuals(net, grid=box.grid(4))
        self.assertTrue(report.passed, report.model_dump())
        profile = dilation_profile(d)
        lo, hi = net.params["eta_range"]
        for eta in np.linspace(lo, hi, 7):
            self.assertAlmostEqual(profile.ode_residual(float(eta)), 0.0, delta=1e-6)
        return net

    def test_case_a(self):
        d = DilationConstants(case="a", a=(0.0, 1.0, 0.0), b=(0.0, 0.0, 1.0), **{"lambda": 1.0})
        net = self.check_solution(d, Box((-1.0, -2.0, 1.0), (1.0, -1.0, 2.0)))
        self.assertEqual(dilation_profile(d).kind, "arctan")
        # phi = arctan(-x2 / x3)
        self.assertAlmostEqual(net.phi_fn(np.array([0.0, -1.5, 1.5])), math.pi / 4, places=14)

    def test_case_b1(self):
        d = DilationConstants(case="b1", a=(0.0, 0.0, 1.0), b=(1.0, 0.0, 1.0), D0=-1.0, **{"lambda": 1.0})
        self.check_solution(d, Box((0.1, -1.0, 1.0), (0.2, 1.0, 2.0)))

    def test_case_b2(self):
        d = DilationConstants(case="b2", a=(1.0, 0.0, 0.0), b=(0.0, 0.0, 1.0), D2=-1.0, **{"lambda": 1.0})
        self.check_solution(d, Box((2.0, -1.0, 0.5), (3.0, 1.0, 1.0)))

    def test_case_c(self):
        d = DilationConstants(case="c", a=(1.0, 0.0, 0.0), b=(0.0, 1.0, 0.0), **{"lambda": 1.0})
        self.check_solution(d, Box((1.0, 1.0, -1.0), (2.0, 2.0, 1.0)))

    def test_relations(self):
        box = Box((-1.0, -2.0, 1.0), (1.0, -1.0, 2.0))
        with self.assertRaises(ConstraintError):
            build_dilation_family(DilationConstants(case="a", a=(1.0, 1.0, 0.0), b=(0.0, 0.0, 1.0), **{"lambda": 1.0}), box)
        with self.assertRaises(ConstraintError):
            build_dilation_family(DilationConstants(case="a", a=(0.0, 1.0, 0.0), b=(0.0, 2.0, 0.0), **{"lambda": 1.0}), box)
        with self.assertRaises(ConstraintError):
            build_dilation_family(DilationConstants(case="b1", a=(0.0, 0.0, 1.0), b=(1.0, 0.0, 2.0), **{"lambda": 1.0}), box)

    def test_denominator_changes_sign(self):
        d = DilationConstants(case="a", a=(0.0, 1.0, 0.0), b=(0.0, 0.0, 1.0), **{"lambda": 1.0})
        with self.assertRaises(DomainError):
            build_dilation_family(d, Box((-1.0, -2.0, -1.0), (1.0, -1.0, 1.0)))

    def test_log_argument_must_be_positive(self):
        # x3 < x1 makes 2 eta - 1 negative
        d = DilationConstants(case="b1", a=(0.0, 0.0, 1.0), b=(1.0, 0.0, 1.0), **{"lambda": 1.0})
        with self.assertRaises(DomainError):
            build_dilation_family(d, Box((1.0, -1.0, 0.1), (2.0, 1.0, 0.5)))

    def test_negative_lambda(self):
        d = DilationConstants(case="a", a=(0.0, 1.0, 0.0), b=(0.0, 0.0, 1.0), **{"lambda": -1.0})
        with self.assertRaises(DomainError):
            build_dilation_family(d, Box((-1.0, -2.0, 1.0), (1.0, -1.0, 2.0)))


class TestRegistry(unittest.TestCase):
    def write_spec(self, data: dict) -> Path:
        tmp = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False, encoding="utf-8")
        json.dump(data, tmp)
        tmp.close()
        self.addCleanup(os.unlink, tmp.name)
        return Path(tmp.name)

    def test_load_translation_spec(self):
        path = self.write_spec(
            {"type": "translation", "alpha": [SQRT3, 1, 2], "c": [1, -1, -2], "lambda": -4, "l1_0": 1, "xi_range": [-0.25, 0.3]}
        )
        spec, raw = load_family_spec(path)
        self.assertEqual(spec.type, "translation")
        self.assertEqual(raw["lambda"], -4)
        net = build_net(spec)
        self.assertEqual(net.family, "translation")

    def test_transform_and_fd(self):
        spec = parse_family_spec(
            {
                "type": "one_constant",
                "case": "a",
                "lambda": 1,
                "alpha": [1, 1],
                "domain": [[-1, 1], [0.5, 1.5], [0.5, 1.5]],
                "derivatives": "finite_difference",
                "transform": {"translate": [1, 0, 0], "dilate_l": 2},
            }
        )
        net = build_net(spec)
        self.assertEqual(net.derivative_mode.kind, "finite_difference")
        self.assertEqual(net.domain.lower, (0.0, 0.5, 0.5))
        np.testing.assert_allclose(net.l((0.5, 1.0, 1.0)), 2.0 * np.array([1.0, math.cosh(2.0), math.sinh(2.0)]), rtol=1e-14)

    def test_constant_spec(self):
        net = build_net(parse_family_spec({"type": "constant", "l": [1, 1, 1]}))
        self.assertFalse(first_order_residuals(net, grid=net.domain.grid(3)).passed)
        with self.assertRaises(ConfigError):
            parse_family_spec({"type": "constant", "l": [0, 1, 1]})

    def test_invalid_specs(self):
        with self.assertRaises(ConfigError):
            parse_family_spec({"type": "spiral"})
        with self.assertRaises(ConfigError):
            parse_family_spec({"type": "translation", "alpha": [1, 1, 1]})
        with self.assertRaises(ConfigError):
            build_net(parse_family_spec({"type": "one_constant", "case": "a", "lambda": 1, "alpha": [1, 1]}))
        with self.assertRaises(ConfigError):
            load_family_spec("does/not/exist.json")

    def test_malformed_json(self):
        tmp = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False, encoding="utf-8")
        tmp.write("{not json")
        tmp.close()
        self.addCleanup(os.unlink, tmp.name)
        with self.assertRaises(ConfigError):
            load_family_spec(tmp.name)


if __name__ == '__main__':
    unittest.main()
