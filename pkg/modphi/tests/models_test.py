""" Tests for models """

import math
from fractions import Fraction

import numpy as np
import scipy.stats

import tests.base_test as base_test

import modphi.config as config
import modphi.deviation_engine as deviation_engine
import modphi.errors as errors
import modphi.models as models


class TestExactDistribution(base_test.TestBase):
    def test_validation(self):
        with self.assertRaises(errors.InvalidLaw):
            models.ExactDistribution(values=np.arange(3.0), masses=np.array([0.5, 0.5]))
        with self.assertRaises(errors.NumericalError):
            models.ExactDistribution(values=np.arange(2.0), masses=np.array([0.25, 0.25]))

    def test_tails(self):
        d = models.ExactDistribution(values=np.array([-1.0, 0.0, 2.0]), masses=np.array([0.25, 0.25, 0.5]))
        self.assertEqual(0.75, d.sf(0.0))
        self.assertEqual(0.5, d.cdf(1.0))
        self.assertEqual(0.75, d.mean)
        self.assertAlmostEqual(math.log(d.mgf(0.7).real), d.log_mgf(0.7), delta=1e-14)
        self.assertEqual(["value", "mass"], list(d.as_frame().columns))


class TestSeriesRing(base_test.TestBase):
    def test_exp_log_exact(self):
        s = models.SeriesRing((0, 1, Fraction(1, 2), Fraction(-1, 3)))
        self.assertEqual(s.coefficients, s.exp().log().coefficients)

    def test_domain(self):
        with self.assertRaises(errors.DomainError):
            models.SeriesRing((1, 1)).exp()
        with self.assertRaises(errors.DomainError):
            models.SeriesRing((2, 1)).log()


class TestCycles(base_test.TestBase):
    def test_float_matches_exact(self):
        exact = models.cycles_exact(10, exact=True)
        fast = models.cycles_exact(10)
        self.assertTrue(np.allclose(exact.masses, fast.masses, rtol=0, atol=1e-15))
        self.assertEqual(Fraction(1, math.factorial(10)), exact.exact[10])

    def test_moments(self):
        n = 1000
        harmonic = math.fsum(1 / i for i in range(1, n + 1))
        harmonic2 = math.fsum(1 / i**2 for i in range(1, n + 1))
        d = models.cycles_exact(n)
        self.assertAlmostEqual(harmonic, d.mean, delta=1e-10)
        self.assertAlmostEqual(harmonic - harmonic2, d.variance, delta=1e-9)

    def test_mgf(self):
        for z in (-0.5, 0.3, 1.2):
            with self.subTest(z=z):
                direct = models.cycles_exact(20).mgf(z).real
                self.assertRelative(models.cycles_mgf(20, z).real, direct, 1e-12)

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            models.cycles_exact(0)
        with self.assertRaises(errors.TooLarge):
            models.cycles_exact(501, exact=True)
        with self.assertRaises(errors.TooLarge):
            models.cycles_exact(10**6 + 1)


class TestIidSums(base_test.TestBase):
    def test_poisson_point_mass(self):
        c = models.bahadur_rao_check(100, 1.5, law="poisson", cfg=self.config)
        self.assertAlmostEqual(scipy.stats.poisson.pmf(150, 100), c.oracle, delta=1e-15)
        self.assertLess(abs(c.ratio - 1), 0.01)

    def test_exponential_tail(self):
        c = models.bahadur_rao_check(100, 2.0, law="exponential", cfg=self.config)
        self.assertEqual("nonlattice_tail", str(c.estimate.regime))
        self.assertLess(abs(c.ratio - 1), 0.03)

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            models.bahadur_rao_check(100, 0.5)
        with self.assertRaises(errors.OutOfRange):
            models.bahadur_rao_check(10, 0.33)
        with self.assertRaises(errors.InvalidLaw):
            models.bahadur_rao_check(10, 0.3, law="cauchy")


class TestPoissonBernoulli(base_test.TestBase):
    def test_distribution_and_psi(self):
        pb = models.poisson_bernoulli([0.1] * 200)
        self.assertAlmostEqual(20.0, pb.t_n, delta=1e-12)
        for k in (5, 20, 35):
            with self.subTest(k=k):
                self.assertRelative(pb.distribution.pmf(k), scipy.stats.binom.pmf(k, 200, 0.1), 1e-9)
        z = 0.4
        expected = (1 + 0.1 * math.expm1(z)) ** 200 * math.exp(-20 * math.expm1(z))
        self.assertRelative(pb.psi.real(z), expected, 1e-12)

    def test_small_t_flag(self):
        comparison = models.poisson_bernoulli([0.5] * 10).deviation(0.4, self.config)
        self.assertEqual(7, comparison.params["k"])
        self.assertIn("small_t", comparison.estimate.flags)

    def test_invalid_probability(self):
        with self.assertRaises(errors.OutOfRange) as ctx:
            models.poisson_bernoulli([0.2, 1.0])
        self.assertEqual(1, ctx.exception.index)


class TestIsing(base_test.TestBase):
    def test_independent_spins(self):
        d = models.ising_exact(5, 0.0)
        expected = scipy.stats.binom.pmf(np.arange(6), 5, 0.5)
        self.assertTrue(np.allclose(expected, d.masses, rtol=0, atol=1e-15))

    def test_transfer_matrix_mgf(self):
        d = models.ising_exact(12, 0.7)
        for z in (-0.8, 0.2, 1.1):
            with self.subTest(z=z):
                self.assertAlmostEqual(d.log_mgf(z), models.ising_log_mgf(12, 0.7, z), delta=1e-10)

    def test_model_scaling(self):
        m = models.ising_mod_gaussian(0.5, 400)
        self.assertEqual(20.0, m.t_n)
        self.assertAlmostEqual(math.exp(0.5), m.law.variance, delta=1e-15)

    def test_cumulant_model(self):
        cm = models.ising_cumulant_model(0.5, 400)
        self.assertEqual(400.0, cm.alpha_n)
        self.assertEqual(1.0, cm.beta_n)
        self.assertAlmostEqual(math.exp(0.5), cm.sigma2, delta=1e-15)
        self.assertEqual(0.0, cm.L)

    def test_cumulant_estimate_against_exact_tail(self):
        c = models.ising_deviation(2000, 0.5, 0.8, self.config)
        self.assertEqual(240.0, c.params["m"])
        self.assertEqual(deviation_engine.Regime.CUMULANT_MODERATE, c.estimate.regime)
        expected = deviation_engine.cumulant_moderate(models.ising_cumulant_model(0.5, 2000), 239 / math.exp(0.25))
        self.assertAlmostEqual(expected.log_prob, c.estimate.log_prob, delta=1e-12)
        self.assertLessEqual(abs(c.ratio - 1), 0.1)
        self.assertEqual((), c.estimate.flags)

    def test_estimates_share_the_oracle(self):
        cumulant = models.ising_deviation(2000, 0.5, 0.8, self.config, estimate="cumulant")
        mod_gaussian = models.ising_deviation(2000, 0.5, 0.8, self.config, estimate="mod_gaussian")
        self.assertEqual(cumulant.oracle, mod_gaussian.oracle)
        self.assertEqual(deviation_engine.Regime.NONLATTICE_TAIL, mod_gaussian.estimate.regime)
        self.assertLessEqual(abs(mod_gaussian.ratio - 1), 0.1)
        with self.assertRaises(errors.ValidationError):
            models.ising_deviation(2000, 0.5, 0.8, self.config, estimate="exact")

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            models.ising_exact(2, 0.0)
        with self.assertRaises(errors.TooLarge):
            models.ising_exact(4001, 0.0)
        with self.assertRaises(errors.OutOfRange):
            models.ising_deviation(16, 0.5, 0.0)
        with self.assertRaises(errors.OutOfRange):
            models.ising_deviation(16, 0.5, 3.0)


class TestHyperbolicZeros(base_test.TestBase):
    def test_mean(self):
        h, eps = 100.0, 1e-5
        slope = (models.hyperbolic_zeros_cgf(h, eps) - models.hyperbolic_zeros_cgf(h, -eps)) / (2 * eps)
        self.assertRelative(slope * h ** (1 / 3), models.hyperbolic_zeros_mean(h), 1e-6)

    def test_cubic_coefficient(self):
        self.assertRelative(models.hyperbolic_cubic_coefficient(1e4), 1 / (144 * math.pi), 0.02)

    def test_sampler(self):
        h, trials = 50.0, 5_000
        sample = models.sample_Nh(h, trials, 11, self.config)
        self.assertEqual(trials, len(sample))
        stderr = float(sample.std(ddof=1)) / math.sqrt(trials)
        self.assertLess(abs(float(sample.mean()) - models.hyperbolic_zeros_mean(h)), 5 * stderr)
        self.assertTrue((sample == models.sample_Nh(h, trials, 11, self.config)).all())

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            models.hyperbolic_zeros_cgf(0.0, 1.0)
        with self.assertRaises(errors.BudgetExceeded):
            models.sample_Nh(1e4, 1000, 1, config.Config(budget=10.0))


class TestWeightedPermutations(base_test.TestBase):
    def test_uniform_weights(self):
        wp = models.weighted_perm(models.ThetaSpec(theta=1), 12)
        self.assertTrue(all(c == 1 for c in wp.h.coefficients))
        for w in (-0.5, 0.3):
            with self.subTest(w=w):
                self.assertLess(abs(wp.mgf(12, w) - models.cycles_mgf(12, w)), 1e-12)
        self.assertAlmostEqual(1.0, wp.psi_n(12, 0.0).real, delta=1e-14)

    def test_zero_partition_function(self):
        wp = models.weighted_perm(models.ThetaSpec(theta=0, table=(0, 1)), 3)
        self.assertEqual(Fraction(1, 2), wp.h[2])
        with self.assertRaises(errors.ZeroPartitionFunction):
            wp.mgf(1, 0.2)
        with self.assertRaises(errors.OutOfRange):
            wp.mgf(4, 0.2)

    def test_errors(self):
        with self.assertRaises(errors.NonPositiveWeights):
            models.ThetaSpec(theta=-1)
        with self.assertRaises(errors.TooLarge):
            models.weighted_perm(models.ThetaSpec(theta=1), 4001)
        with self.assertRaises(errors.OutOfRange):
            models.weighted_perm(models.ThetaSpec(theta=1), 0)

    def test_limit_at_zero(self):
        wp = models.weighted_perm(models.ThetaSpec(theta=2.0), 50)
        self.assertAlmostEqual(1.0, wp.psi_limit().real(0.0), delta=1e-14)
        self.assertAlmostEqual(51.0, float(wp.h[50]), delta=1e-9)
        self.assertAlmostEqual(50.0, wp.h_asymptotic(50), delta=1e-12)


class TestOmega(base_test.TestBase):
    def test_mean_is_loglog(self):
        stats = models.omega_statistics(10**5)
        self.assertAlmostEqual(math.log(math.log(10**5)) + 0.2615, stats.mean(), delta=0.1)
        self.assertAlmostEqual(1.0, stats.empirical_mgf(0.0), delta=1e-12)
        self.assertEqual(10**5 - 1, stats.tail_count(1))

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            models.omega_statistics(2)


class TestCharacteristicPolynomials(base_test.TestBase):
    def test_decreasing_in_x(self):
        low = models.charpoly_deviation("usp", 1000, 0.5, cfg=self.config)
        high = models.charpoly_deviation("usp", 1000, 1.0, cfg=self.config)
        self.assertGreater(low.log_prob, high.log_prob)

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            models.charpoly_deviation("usp", 1000, 0.0)
        with self.assertRaises(errors.OutOfRange):
            models.charpoly_deviation("usp", 1, 0.5)


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.models

    tests.addTests(doctest.DocTestSuite(modphi.models))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
