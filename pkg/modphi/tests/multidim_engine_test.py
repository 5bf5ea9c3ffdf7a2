""" Tests for multidim_engine """

import dataclasses
import math
from fractions import Fraction

import numpy as np
import scipy.integrate

import tests.base_test as base_test

import modphi.errors as errors
import modphi.multidim_engine as multidim_engine
import modphi.reference_laws as reference_laws


def flat_model(d: int, t: float = 100.0) -> multidim_engine.MultiModGaussianModel:
    return multidim_engine.MultiModGaussianModel(d=d, A=np.eye(d), t_n=t, psi=lambda z: 1.0)


class TestMultidimEngine(base_test.TestBase):
    def test_sphere_measures(self):
        _, measure = multidim_engine.surface_integral(flat_model(3), multidim_engine.full_sphere(3, 1.0), self.config)
        self.assertRelative(measure, 4 * math.pi, 1e-6)

        upper = multidim_engine.ConicSector(d=3, b=2.0, indicator=lambda u: u[2] > 0)
        integral, measure = multidim_engine.surface_integral(flat_model(3), upper, self.config)
        self.assertRelative(measure, 8 * math.pi, 1e-6)
        self.assertRelative(integral, measure, 1e-12)

        quarter = multidim_engine.ConicSector(d=2, b=3.0, theta1=0.0, theta2=math.pi / 2)
        integral, _ = multidim_engine.surface_integral(flat_model(2), quarter, self.config)
        self.assertRelative(integral, 1.5 * math.pi, 1e-10)

    def test_one_dimension_is_two_sided_gaussian(self):
        t, b = 100.0, 1.0
        e = multidim_engine.conic_probability(flat_model(1, t), multidim_engine.full_sphere(1, b), self.config)
        exact = 2 * reference_laws.gaussian_tail(b * math.sqrt(t))
        self.assertRelative(e.prob, exact, 0.02)
        self.assertEqual("conic", str(e.regime))

    def test_anisotropic_psi(self):
        """ψ is evaluated at b·A·u"""
        A = np.diag([2.0, 1.0])
        model = multidim_engine.MultiModGaussianModel(
            d=2, A=A, t_n=50.0, psi=lambda z: multidim_engine.dwalk_kurtosis_psi(2, z)
        )
        integral, measure = multidim_engine.surface_integral(model, multidim_engine.full_sphere(2, 1.0), self.config)
        self.assertRelative(measure, 2 * math.pi, 1e-12)
        expected, _ = scipy.integrate.quad(
            lambda th: multidim_engine.dwalk_kurtosis_psi(2, [2 * math.cos(th), math.sin(th)]), 0, 2 * math.pi
        )
        self.assertRelative(integral, expected, 1e-5)

    def test_invalid_inputs(self):
        with self.assertRaises(errors.InvalidLaw):
            multidim_engine.MultiModGaussianModel(d=2, A=np.array([[1.0, 0.5], [0.0, 1.0]]), t_n=1.0, psi=lambda z: 1.0)
        with self.assertRaises(errors.InvalidLaw):
            multidim_engine.MultiModGaussianModel(d=2, A=np.eye(2), t_n=1.0, psi=lambda z: 2.0)
        with self.assertRaises(errors.OutOfRange):
            multidim_engine.ConicSector(d=2, b=0.0)
        with self.assertRaises(errors.OutOfRange):
            multidim_engine.ConicSector(d=2, b=1.0, theta1=0.0, theta2=7.0)
        empty = multidim_engine.ConicSector(d=3, b=1.0, indicator=lambda u: False)
        with self.assertRaises(errors.DegenerateSector):
            multidim_engine.conic_probability(flat_model(3), empty, self.config)

    def test_angle_density_normalized(self):
        for r in (0.0, 1.0, 2.5):
            with self.subTest(r=r):
                total, _ = scipy.integrate.quad(
                    lambda th: multidim_engine.walk2d_angle_density(r, th), 0, 2 * math.pi, limit=200
                )
                self.assertAlmostEqual(1.0, total, delta=1e-8)

    def test_sector_additivity(self):
        cfg = self.config
        model = multidim_engine.MultiModGaussianModel(
            d=2,
            A=np.array([[2.0, 0.3], [0.3, 1.0]]),
            t_n=50.0,
            psi=lambda z: multidim_engine.dwalk_kurtosis_psi(2, z),
        )

        def sector(lo: float, hi: float) -> multidim_engine.ConicSector:
            return multidim_engine.ConicSector(d=2, b=1.5, theta1=lo, theta2=hi)

        whole_integral, whole_measure = multidim_engine.surface_integral(model, sector(0.0, 2.0), cfg)
        pieces = [multidim_engine.surface_integral(model, sector(lo, hi), cfg) for lo, hi in ((0.0, 0.7), (0.7, 2.0))]
        self.assertRelative(sum(integral for integral, _ in pieces), whole_integral, 1e-6)
        self.assertRelative(sum(measure for _, measure in pieces), whole_measure, 1e-10)

        whole = multidim_engine.conic_probability(model, sector(0.0, 2.0), cfg)
        split = [multidim_engine.conic_probability(model, sector(lo, hi), cfg) for lo, hi in ((0.0, 0.7), (0.7, 2.0))]
        self.assertRelative(sum(e.prob for e in split), whole.prob, 1e-6)

    def test_angle_density_symmetries(self):
        for r in (0.5, 1.5, 2.5):
            for theta in np.linspace(0.0, 2 * math.pi, 25):
                with self.subTest(r=r, theta=theta):
                    density = multidim_engine.walk2d_angle_density(r, theta)
                    turned = multidim_engine.walk2d_angle_density(r, theta + math.pi / 2)
                    mirrored = multidim_engine.walk2d_angle_density(r, -theta)
                    self.assertAlmostEqual(density, turned, delta=1e-12)
                    self.assertAlmostEqual(density, mirrored, delta=1e-12)

    def test_conditional_walk(self):
        cfg = self.config
        hist = multidim_engine.walk2d_conditional_mc(100, 0.5, 20_000, cfg.seed, cfg)
        self.assertEqual(hist.accepted, int(hist.counts.sum()))
        self.assertRelative(hist.acceptance_rate, math.exp(-10 * 0.25), 0.25)
        self.assertAlmostEqual(1.0, float(hist.theoretical.sum()), delta=1e-8)
        self.assertEqual(cfg.bins, len(hist.as_frame()))

        again = multidim_engine.walk2d_conditional_mc(
            100, 0.5, 20_000, cfg.seed, dataclasses.replace(cfg, default_threads=1)
        )
        self.assertTrue((hist.counts == again.counts).all())

    def test_acceptance_variance_shrinks_with_trials(self):
        cfg = dataclasses.replace(self.config, bins=4)
        sizes = (250, 2_000, 16_000)
        variances = []
        for trials in sizes:
            rates = [
                multidim_engine.walk2d_conditional_mc(100, 0.5, trials, seed, cfg).acceptance_rate
                for seed in range(1, 201)
            ]
            variances.append(np.var(rates, ddof=1))
        slope = np.polyfit(np.log(sizes), np.log(variances), 1)[0]
        self.assertLessEqual(abs(slope + 1), 0.2, variances)

    def test_conditional_walk_errors(self):
        with self.assertRaises(errors.OutOfRange):
            multidim_engine.walk2d_conditional_mc(50, 0.5, 10, 1, self.config)
        with self.assertRaises(errors.BudgetExceeded):
            multidim_engine.walk2d_conditional_mc(100, 0.5, 10**6, 1, dataclasses.replace(self.config, budget=1e6))
        with self.assertRaises(errors.ZeroAcceptance):
            multidim_engine.walk2d_conditional_mc(100, 10.0, 100, 1, self.config)

    def test_quarter_turns(self):
        test = multidim_engine.walk2d_quarter_turn_test(51, 20_000, 7, self.config)
        self.assertEqual(20_000, int(test.counts.sum()))
        self.assertGreater(test.p_value, 1e-3)
        with self.assertRaises(errors.OutOfRange):
            multidim_engine.walk2d_quarter_turn_test(0, 10, 7, self.config)

    def test_step_cumulant(self):
        self.assertEqual(Fraction(0), multidim_engine.walk_step_cumulant4(3, [1, 0, 0]))
        self.assertEqual(Fraction(-2), multidim_engine.walk_step_cumulant4(2, [1, 1]))
        self.assertAlmostEqual(
            math.exp(-2 / 24), multidim_engine.dwalk_kurtosis_psi(2, [1.0, 1.0]), delta=1e-15
        )
        with self.assertRaises(errors.OutOfRange):
            multidim_engine.walk_step_cumulant4(2, [1])


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.multidim_engine

    tests.addTests(doctest.DocTestSuite(modphi.multidim_engine))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
