import math
import os
import sys
import unittest

import numpy as np
from scipy.special import ellipj, ellipk

# 将 src 加入路径以便导入
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.guichard_lab.core.errors import DomainError
from src.guichard_lab.special.elliptic import agm, complete_K, inverse_sn, jacobi_scd


class TestAgmAndK(unittest.TestCase):
    def test_agm_known_value(self):
        # Gauss's constant: 1 / agm(1, sqrt 2)
        self.assertAlmostEqual(1.0 / agm(1.0, math.sqrt(2.0)), 0.8346268416740731, places=14)

    def test_agm_symmetric_and_homogeneous(self):
        self.assertAlmostEqual(agm(3.0, 5.0), agm(5.0, 3.0), places=14)
        self.assertAlmostEqual(agm(6.0, 10.0), 2.0 * agm(3.0, 5.0), places=13)

    def test_agm_rejects_nonpositive(self):
        with self.assertRaises(DomainError):
            agm(0.0, 1.0)
        with self.assertRaises(DomainError):
            agm(-1.0, 1.0)

    def test_complete_K_matches_scipy(self):
        for k in (0.0, 0.1, 0.5, 0.9, 0.999):
            self.assertAlmostEqual(complete_K(k), float(ellipk(k * k)), places=12, msg=f"k={k}")

    def test_complete_K_at_zero_is_half_pi(self):
        self.assertAlmostEqual(complete_K(0.0), math.pi / 2, places=15)

    def test_complete_K_half(self):
        expected = math.pi / (2.0 * agm(1.0, math.sqrt(0.75)))
        self.assertAlmostEqual(complete_K(0.5), expected, places=15)
        self.assertAlmostEqual(complete_K(0.5), 1.685750354812596, places=12)

    def test_complete_K_diverges_at_one(self):
        with self.assertRaises(DomainError):
            complete_K(1.0)

    def test_modulus_outside_unit_interval(self):
        for k in (-0.1, 1.5, float("nan")):
            with self.assertRaises(DomainError):
                complete_K(k)
            with self.assertRaises(DomainError):
                jacobi_scd(0.3, k)


class TestJacobi(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(20240607)
        self.samples = [(float(u), float(k)) for u, k in zip(rng.uniform(-20.0, 20.0, 200), rng.uniform(0.0, 0.99, 200))]

    def test_matches_scipy(self):
        for u, k in self.samples:
            sn, cn, dn, _ = ellipj(u, k * k)
            got = jacobi_scd(u, k)
            self.assertAlmostEqual(got[0], float(sn), places=10, msg=f"sn u={u} k={k}")
            self.assertAlmostEqual(got[1], float(cn), places=10, msg=f"cn u={u} k={k}")
            self.assertAlmostEqual(got[2], float(dn), places=10, msg=f"dn u={u} k={k}")

    def test_identities(self):
        for u, k in self.samples:
            sn, cn, dn = jacobi_scd(u, k)
            self.assertAlmostEqual(sn * sn + cn * cn, 1.0, places=12)
            self.assertAlmostEqual(dn * dn + k * k * sn * sn, 1.0, places=12)
            self.assertGreater(dn, 0.0)

    def test_degenerate_moduli(self):
        u = 0.7
        self.assertEqual(jacobi_scd(u, 0.0), (math.sin(u), math.cos(u), 1.0))
        sn, cn, dn = jacobi_scd(u, 1.0)
        self.assertAlmostEqual(sn, math.tanh(u), places=15)
        self.assertAlmostEqual(cn, 1.0 / math.cosh(u), places=15)
        self.assertAlmostEqual(dn, 1.0 / math.cosh(u), places=15)

    def test_quarter_period(self):
        k = 0.8
        sn, cn, dn = jacobi_scd(complete_K(k), k)
        self.assertAlmostEqual(sn, 1.0, places=12)
        self.assertAlmostEqual(cn, 0.0, places=6)
        self.assertAlmostEqual(dn, math.sqrt(1.0 - k * k), places=10)

    def test_odd_and_even(self):
        k = 0.6
        plus = jacobi_scd(1.3, k)
        minus = jacobi_scd(-1.3, k)
        self.assertAlmostEqual(minus[0], -plus[0], places=14)
        self.assertAlmostEqual(minus[1], plus[1], places=14)
        self.assertAlmostEqual(minus[2], plus[2], places=14)

    def test_inverse_sn(self):
        for k in (0.0, 0.3, 0.7, 0.95):
            for s in (0.0, 0.25, 0.5, 0.9):
                u = inverse_sn(s, k)
                self.assertGreaterEqual(u, 0.0)
                self.assertAlmostEqual(jacobi_scd(u, k)[0], s, places=12)
        self.assertAlmostEqual(inverse_sn(1.0, 0.5), complete_K(0.5), places=15)
        self.assertAlmostEqual(inverse_sn(0.5, 1.0), math.atanh(0.5), places=15)

    def test_inverse_sn_rejects(self):
        with self.assertRaises(DomainError):
            inverse_sn(1.2, 0.5)
        with self.assertRaises(DomainError):
            inverse_sn(1.0, 1.0)


if __name__ == '__main__':
    unittest.main()
