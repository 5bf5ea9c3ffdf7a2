""" Tests for limiting_functions """

import math

import mpmath
import scipy.special

import tests.base_test as base_test

import modphi.errors as errors
import modphi.limiting_functions as limiting_functions


class TestLimitingFunctions(base_test.TestBase):
    def test_barnes_functional_equation(self):
        """log G(x+1) − log G(x) = log Γ(x)"""
        for x in (0.3, 2.5, 9.9, 11.7, 25.0):
            with self.subTest(x=x):
                diff = limiting_functions.barnes_log_G(x + 1) - limiting_functions.barnes_log_G(x)
                self.assertAlmostEqual(float(scipy.special.gammaln(x)), diff, delta=1e-10)

    def test_barnes_high_precision(self):
        with mpmath.workdps(30):
            for x in (0.5, 3.7, 12.25, 40.0):
                with self.subTest(x=x):
                    expected = float(mpmath.log(mpmath.barnesg(x)))
                    actual = limiting_functions.barnes_log_G(x)
                    self.assertAlmostEqual(expected, actual, delta=1e-9 * max(1.0, abs(expected)))

    def test_barnes_half(self):
        expected = math.log(2) / 24 + 1.5 * -0.16542114370045092 - math.log(math.pi) / 4
        self.assertAlmostEqual(expected, limiting_functions.barnes_log_G(0.5), delta=1e-9)

    def test_gamma_functions(self):
        self.assertAlmostEqual(0.5, limiting_functions.inv_gamma_exp().real(math.log(3)), delta=1e-12)
        self.assertAlmostEqual(1 / 6, limiting_functions.gamma_ratio(2.0).real(math.log(2)), delta=1e-12)
        with self.assertRaises(errors.DomainError):
            limiting_functions.gamma_ratio(0.0)

    def test_weierstrass_integers(self):
        """Π over the positive integers at x = 1 tends to e^{−γ}"""
        w = limiting_functions.weierstrass_product(1.0, "integers", 10**6)
        self.assertRelative(w.value, math.exp(-0.5772156649015329), 1e-5)
        self.assertLessEqual(w.tail_bound, 1e-6)

    def test_weierstrass_domain(self):
        with self.assertRaises(errors.DomainError):
            limiting_functions.weierstrass_product(-2.0, "primes", 100)
        with self.assertRaises(errors.DomainError):
            limiting_functions.weierstrass_product(0.5, "integers", 0)

    def test_from_name(self):
        cases = {
            "exp_monomial": {"L": 2.0, "v": 3},
            "inv_gamma_exp": {},
            "gamma_ratio": {"theta": 3.0},
            "barnes_ratio": {"group": "so_even"},
            "weierstrass_product": {"index_sets": "primes,integers", "K": 1000},
        }
        for kind, params in cases.items():
            with self.subTest(kind=kind):
                psi = limiting_functions.from_name(kind, **params)
                self.assertEqual(kind, str(psi.kind))
                self.assertAlmostEqual(1.0, psi.real(0.0), delta=1e-12)
        with self.assertRaises(ValueError):
            limiting_functions.from_name("bogus")

    def test_index_arrays_are_cached_within_bounds(self):
        for K in range(10, 60):
            primes = limiting_functions.primes_up_to(K)
            with self.subTest(K=K):
                self.assertLessEqual(int(primes[-1]), K)
        info = limiting_functions._index_array.cache_info()
        self.assertIsNotNone(info.maxsize)
        self.assertLessEqual(info.currsize, info.maxsize)
        self.assertEqual([2, 3, 5, 7], limiting_functions.primes_up_to(10).tolist())

    def test_third_derivative(self):
        psi = limiting_functions.exp_monomial(L=1.5, v=3)
        self.assertAlmostEqual(1.5, psi.derivative(3, 0.0), delta=1e-5)

    def test_custom(self):
        psi = limiting_functions.custom(lambda z: 1 + z * z, name="quadratic")
        self.assertEqual(5.0, psi.real(2.0))
        self.assertEqual("custom(name=quadratic)", psi.label)


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.limiting_functions

    tests.addTests(doctest.DocTestSuite(modphi.limiting_functions))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
