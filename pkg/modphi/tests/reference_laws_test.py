""" Tests for reference_laws """

import math

import mpmath
import numpy as np

import tests.base_test as base_test

import modphi.errors as errors
import modphi.reference_laws as reference_laws


class TestReferenceLaws(base_test.TestBase):
    def test_gaussian_closed_form(self):
        law = reference_laws.gaussian(0.5, 2.0)
        for p in reference_laws.legendre_grid(law, np.linspace(-4, 5, 100).tolist(), self.config):
            with self.subTest(x=p.x):
                self.assertAlmostEqual((p.x - 0.5) ** 2 / 4, p.F, delta=1e-10)
                self.assertAlmostEqual((p.x - 0.5) / 2, p.h, delta=1e-10)
                self.assertAlmostEqual(0.5, p.Fpp, delta=1e-10)
                self.assertEqual(p.h, p.Fp)

    def test_poisson_closed_form(self):
        law = reference_laws.poisson(1.5)
        for p in reference_laws.legendre_grid(law, np.linspace(0.2, 6.0, 100).tolist(), self.config):
            with self.subTest(x=p.x):
                self.assertAlmostEqual(p.x * math.log(p.x / 1.5) - p.x + 1.5, p.F, delta=1e-10)
                self.assertAlmostEqual(math.log(p.x / 1.5), p.h, delta=1e-10)
                self.assertAlmostEqual(1 / p.x, p.Fpp, delta=1e-10)

    def test_bernoulli_and_exponential(self):
        p = reference_laws.solve_saddle(reference_laws.bernoulli(0.5), 0.75, self.config)
        self.assertAlmostEqual(math.log(3), p.h, delta=1e-10)
        self.assertAlmostEqual(0.75 * math.log(1.5) + 0.25 * math.log(0.5), p.F, delta=1e-10)

        p = reference_laws.solve_saddle(reference_laws.exponential(), 2.0, self.config)
        self.assertAlmostEqual(0.5, p.h, delta=1e-10)
        self.assertAlmostEqual(1 - math.log(2), p.F, delta=1e-10)

    def test_rate_vanishes_at_mean(self):
        for law in (reference_laws.gaussian(1.0, 3.0), reference_laws.poisson(2.0), reference_laws.exponential()):
            with self.subTest(law=law.name):
                p = reference_laws.solve_saddle(law, law.mean, self.config)
                self.assertAlmostEqual(0.0, p.F, delta=1e-14)
                self.assertAlmostEqual(0.0, p.h, delta=1e-10)

    def test_grid_reports_index(self):
        with self.assertRaises(errors.OutOfRange) as ex:
            reference_laws.legendre_grid(reference_laws.poisson(1.0), [1.0, -1.0, 2.0], self.config)
        self.assertEqual(1, ex.exception.index)
        self.assertIsInstance(ex.exception, ValueError)

    def test_invalid_laws(self):
        with self.assertRaises(errors.InvalidLaw):
            reference_laws.gaussian(0.0, 0.0)
        with self.assertRaises(errors.InvalidLaw):
            reference_laws.bernoulli(1.0)
        with self.assertRaises(errors.InvalidLaw):
            reference_laws.custom("shifted", lambda z: z + 1)

    def test_custom_law_file(self):
        text = "name = nb\n# negative binomial like\neta = 1/2*z^2 + 3*z\nstrip = 5\n"
        with self.get_text_file(text) as path:
            law = reference_laws.custom_law_from_file(path)
        self.assertEqual("nb", law.name)
        self.assertEqual(3.0, law.mean)
        self.assertEqual(1.0, law.variance)
        p = reference_laws.solve_saddle(law, 4.0, self.config)
        self.assertAlmostEqual(1.0, p.h, delta=1e-10)
        self.assertAlmostEqual(0.5, p.F, delta=1e-10)

    def test_custom_law_file_without_eta(self):
        with self.get_text_file("name = broken\n") as path:
            with self.assertRaises(ValueError):
                reference_laws.custom_law_from_file(path)

    def test_log_gaussian_tail_high_precision(self):
        with mpmath.workdps(40):
            for a in (-2.0, 1.0, 10.0, 38.5, 80.0):
                with self.subTest(a=a):
                    expected = float(mpmath.log(mpmath.erfc(a / mpmath.sqrt(2)) / 2))
                    self.assertAlmostEqual(expected, reference_laws.log_gaussian_tail(a), delta=1e-10 * max(1.0, abs(expected)))

    def test_log_gaussian_tail_switch(self):
        """Both sides of the switch to the asymptotic series agree"""
        below = reference_laws.log_gaussian_tail(37.999)
        above = reference_laws.log_gaussian_tail(38.001)
        slope = -38.0
        self.assertAlmostEqual(below + slope * 0.002, above, delta=1e-3)
        self.assertGreater(reference_laws.gaussian_tail(40.0), 0.0)


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.reference_laws

    tests.addTests(doctest.DocTestSuite(modphi.reference_laws))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
