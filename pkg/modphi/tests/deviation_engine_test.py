""" Tests for deviation_engine """

import math
from fractions import Fraction

import numpy as np
import scipy.stats

import tests.base_test as base_test

import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.limiting_functions as limiting_functions
import modphi.reference_laws as reference_laws


def poisson_model(t: float) -> deviation_engine.ModPhiModel:
    return deviation_engine.ModPhiModel(law=reference_laws.poisson(1.0), t_n=t, psi=limiting_functions.one())


def gaussian_model(t: float) -> deviation_engine.ModPhiModel:
    return deviation_engine.ModPhiModel(law=reference_laws.gaussian(), t_n=t, psi=limiting_functions.one())


class TestDeviationEngine(base_test.TestBase):
    def test_poisson_point_mass(self):
        """Poisson(t) is exactly mod-Poisson with ψ ≡ 1; order 1 is Stirling's correction"""
        t = 100.0
        for k in (150, 200, 300):
            with self.subTest(k=k):
                exact = float(scipy.stats.poisson.logpmf(k, t))
                first = deviation_engine.lattice_point_mass(poisson_model(t), k / t, 1, self.config)
                plain = deviation_engine.lattice_point_mass(poisson_model(t), k / t, 0, self.config)
                self.assertLessEqual(abs(first.log_prob - exact), 1e-6)
                self.assertLess(abs(first.log_prob - exact), abs(plain.log_prob - exact))
                self.assertEqual(deviation_engine.Regime.LATTICE_POINT, first.regime)

    def test_poisson_tail(self):
        t = 100.0
        exact = float(scipy.stats.poisson.logsf(199, t))
        plain = deviation_engine.lattice_tail(poisson_model(t), 2.0, 0, self.config)
        first = deviation_engine.lattice_tail(poisson_model(t), 2.0, 1, self.config)
        self.assertLessEqual(abs(plain.log_prob - exact), 0.05)
        self.assertLess(abs(first.log_prob - exact), abs(plain.log_prob - exact))
        self.assertLessEqual(abs(first.log_prob - exact), 2e-3)

    def test_lattice_checks(self):
        with self.assertRaises(errors.NotLattice):
            deviation_engine.lattice_point_mass(gaussian_model(100.0), 1.0)
        with self.assertRaises(errors.IsLattice):
            deviation_engine.nonlattice_tail(poisson_model(100.0), 2.0)
        with self.assertRaises(errors.OutOfRange):
            deviation_engine.lattice_point_mass(poisson_model(100.0), 1.005)
        with self.assertRaises(errors.UnsupportedOrder):
            deviation_engine.lattice_point_mass(poisson_model(100.0), 1.0, order=2)
        with self.assertRaises(errors.OutOfRange):
            deviation_engine.lattice_tail(poisson_model(100.0), 0.5)

    def test_gaussian_tail(self):
        """N(0, t) against its Mills ratio"""
        t = 100.0
        for x in (1.0, -1.0, 2.0):
            with self.subTest(x=x):
                e = deviation_engine.nonlattice_tail(gaussian_model(t), x, self.config)
                exact = reference_laws.log_gaussian_tail(abs(x) * math.sqrt(t))
                self.assertLessEqual(abs(e.log_prob - exact), 1.5 / (t * x * x))
                self.assertEqual(("lower",) if x < 0 else (), e.flags)
        with self.assertRaises(errors.OutOfRange):
            deviation_engine.nonlattice_tail(gaussian_model(t), 0.0)

    def test_crossover_is_exact_for_gaussian(self):
        t = 10_000.0
        for y in (0.5, 2.0, 4.0, 8.0):
            with self.subTest(y=y):
                e = deviation_engine.crossover_tail(gaussian_model(t), y, self.config)
                self.assertAlmostEqual(reference_laws.log_gaussian_tail(y), e.log_prob, delta=1e-9)
                expected = deviation_engine.Regime.CLT if y <= t ** (1 / 6) else deviation_engine.Regime.CROSSOVER
                self.assertEqual(expected, e.regime)
        with self.assertRaises(errors.OutOfRange):
            deviation_engine.crossover_tail(gaussian_model(t), -1.0)

    def test_cumulant_tails(self):
        model = deviation_engine.CumulantModel(alpha_n=1000.0, beta_n=1.0, sigma2=2.0, L=0.7)
        T = 60.0
        upper = deviation_engine.cumulant_moderate(model, T)
        lower = deviation_engine.cumulant_moderate(model, T, "lower")
        both = deviation_engine.cumulant_moderate(model, T, deviation_engine.Tail.TWO_SIDED)
        self.assertGreater(upper.prob, lower.prob)
        self.assertRelative(both.prob, upper.prob + lower.prob, 1e-12)
        self.assertIn("lower", lower.flags)
        self.assertEqual((), upper.flags)

    def test_cumulant_window_flags(self):
        model = deviation_engine.CumulantModel(alpha_n=100.0, beta_n=1.0, sigma2=1.0, L=0.0)
        self.assertIn("below_window", deviation_engine.cumulant_moderate(model, 5.0).flags)
        self.assertIn("above_window", deviation_engine.cumulant_moderate(model, 50.0).flags)
        with self.assertRaises(errors.OutOfRange):
            deviation_engine.cumulant_moderate(model, 0.0)
        with self.assertRaises(errors.NonPositiveVariance):
            deviation_engine.CumulantModel(alpha_n=100.0, beta_n=1.0, sigma2=0.0, L=0.0)

    def test_petrov_order_three_is_cumulant_moderate(self):
        model = deviation_engine.CumulantModel(alpha_n=5000.0, beta_n=1.0, sigma2=1.5, L=-0.4)
        for T in (100.0, 300.0, 500.0):
            with self.subTest(T=T):
                a = deviation_engine.cumulant_moderate(model, T)
                b = deviation_engine.cumulant_moderate_petrov([1.5, -0.4], 5000.0, T, 3)
                self.assertAlmostEqual(a.log_prob, b.log_prob, delta=1e-12)

    def test_petrov_exact(self):
        lambdas = deviation_engine.petrov_coefficients([Fraction(1), Fraction(2), Fraction(3)], 4)
        self.assertEqual([Fraction(-1, 2), Fraction(1, 3), Fraction(-3, 8)], lambdas)

    def test_berry_esseen(self):
        """The corrected CDF beats the plain CLT for sums of exponentials"""
        model = deviation_engine.ModPhiModel(
            law=reference_laws.exponential(), t_n=100.0, psi=limiting_functions.one()
        )
        xs = np.linspace(-3, 3, 200)
        exact = scipy.stats.gamma.cdf(100 + 10 * xs, a=100)
        plain = np.max(np.abs(scipy.stats.norm.cdf(xs) - exact))
        corrected = max(abs(deviation_engine.berry_esseen_cdf(model, float(x)) - e) for x, e in zip(xs, exact))
        self.assertGreaterEqual(plain / corrected, 3)

    def test_borel_bound(self):
        model = gaussian_model(100.0)
        bound = deviation_engine.borel_bound(model, [(1.0, 2.0)], self.config)
        self.assertEqual(0.5, bound.rate)
        self.assertEqual([1.0], bound.attained_set)
        self.assertTrue(bound.lower_tight)
        self.assertAlmostEqual(1.0, bound.constant, delta=1e-12)

        both = deviation_engine.borel_bound(model, [(-3.0, -1.0), (1.0, math.inf)], self.config)
        self.assertEqual(2, len(both.attained_set))
        self.assertAlmostEqual(2.0, both.constant, delta=1e-12)

        point = deviation_engine.borel_bound(model, [(1.0, 1.0)], self.config)
        self.assertFalse(point.lower_tight)

        with self.assertRaises(errors.NotAdmissible):
            deviation_engine.borel_bound(model, [], self.config)


class TestRegimeConsistency(base_test.TestBase):
    def models(self, t: float) -> dict[str, deviation_engine.ModPhiModel]:
        return {
            "exponential": deviation_engine.ModPhiModel(
                law=reference_laws.exponential(), t_n=t, psi=limiting_functions.one()
            ),
            "gaussian": deviation_engine.ModPhiModel(
                law=reference_laws.gaussian(0.0, 2.0), t_n=t, psi=limiting_functions.exp_monomial(L=0.3, v=3)
            ),
        }

    def test_crossover_meets_nonlattice_tail(self):
        for t in (1e3, 1e4):
            for name, model in self.models(t).items():
                law = model.law
                for s in (0.2, 0.5, 1.0):
                    x = law.mean + s
                    with self.subTest(t=t, law=name, x=x):
                        y = s * math.sqrt(t / law.variance)
                        crossover = deviation_engine.crossover_tail(model, y, self.config)
                        tail = deviation_engine.nonlattice_tail(model, x, self.config)
                        ratio = math.exp(crossover.log_prob - tail.log_prob)
                        self.assertGreaterEqual(ratio, 0.8)
                        self.assertLessEqual(ratio, 1.25)

    def test_lattice_tail_over_point_mass(self):
        model = poisson_model(100.0)
        for x in (1.5, 2.0, 3.0):
            with self.subTest(x=x):
                h = reference_laws.solve_saddle(model.law, x, self.config).h
                tail = deviation_engine.lattice_tail(model, x, 0, self.config)
                point = deviation_engine.lattice_point_mass(model, x, 0, self.config)
                self.assertAlmostEqual(-math.log(-math.expm1(-h)), tail.log_prob - point.log_prob, delta=1e-12)

    def test_cumulant_moderate_is_gaussian_crossover_asymptote(self):
        alpha = 10_000.0
        cm = deviation_engine.CumulantModel(alpha_n=alpha, beta_n=1.0, sigma2=2.0, L=0.0)
        model = deviation_engine.ModPhiModel(
            law=reference_laws.gaussian(0.0, 2.0), t_n=alpha, psi=limiting_functions.one()
        )
        for T in (200.0, 400.0, 600.0):
            y = T / math.sqrt(alpha)
            with self.subTest(T=T):
                moderate = deviation_engine.cumulant_moderate(cm, T)
                crossover = deviation_engine.crossover_tail(model, y, self.config)
                self.assertAlmostEqual(crossover.exponent_rate, moderate.exponent_rate, delta=1e-10)
                self.assertAlmostEqual(1.0, moderate.leading * y * math.sqrt(2 * math.pi), delta=1e-10)
                # e^{y²/2} P[N ≥ y] against its first Mills term 1/(y√(2π))
                mills = crossover.leading / moderate.leading
                self.assertGreater(mills, y * y / (1 + y * y))
                self.assertLess(mills, 1.0)

    def test_borel_half_line_is_nonlattice_tail(self):
        for name, model in self.models(500.0).items():
            law = model.law
            for a in (law.mean + 0.4, law.mean - 0.4):
                B = [(a, math.inf)] if a > law.mean else [(-math.inf, a)]
                with self.subTest(law=name, a=a):
                    bound = deviation_engine.borel_bound(model, B, self.config)
                    tail = deviation_engine.nonlattice_tail(model, a, self.config)
                    self.assertAlmostEqual(tail.log_prob, bound.log_upper, delta=1e-12)
                    self.assertEqual([a], bound.attained_set)

    def test_berry_esseen_stays_in_unit_interval(self):
        xs = np.linspace(-6.0, 6.0, 241)
        cases = {
            "poisson": (reference_laws.poisson(1.0), (25.0, 100.0, 1000.0)),
            "exponential": (reference_laws.exponential(), (100.0, 1000.0)),
            "gaussian": (reference_laws.gaussian(), (25.0,)),
        }
        for name, (law, ts) in cases.items():
            for t in ts:
                model = deviation_engine.ModPhiModel(law=law, t_n=t, psi=limiting_functions.one())
                with self.subTest(law=name, t=t):
                    values = [deviation_engine.berry_esseen_cdf(model, float(x)) for x in xs]
                    self.assertGreaterEqual(min(values), -1e-3)
                    self.assertLessEqual(max(values), 1 + 1e-3)


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.deviation_engine

    tests.addTests(doctest.DocTestSuite(modphi.deviation_engine))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
