""" Tests for character_values """

import math
from fractions import Fraction

import tests.base_test as base_test

import modphi.character_values as character_values
import modphi.errors as errors
from modphi.character_values import Partition, ThomaParameter

OMEGA = ThomaParameter(alpha=(Fraction(3, 5), Fraction(3, 10)))


class TestPartitions(base_test.TestBase):
    def test_counts(self):
        for n, count in enumerate([1, 1, 2, 3, 5, 7, 11]):
            with self.subTest(n=n):
                self.assertEqual(count, len(list(character_values.partitions(n))))

    def test_invalid(self):
        with self.assertRaises(errors.OutOfRange) as ctx:
            Partition((1, 2))
        self.assertEqual(1, ctx.exception.index)
        with self.assertRaises(errors.OutOfRange):
            Partition((2, 0))
        with self.assertRaises(errors.OutOfRange):
            Partition((3,)).padded(2)
        self.assertEqual(Partition((3, 2, 1)), Partition.from_text("1,3,2"))


class TestCharacters(base_test.TestBase):
    def test_orthogonality(self):
        table = character_values.character_table(5)
        for i in range(len(table.partitions)):
            for j in range(len(table.partitions)):
                inner = sum(
                    Fraction(int(table.values[i, c]) * int(table.values[j, c]), mu.z)
                    for c, mu in enumerate(table.partitions)
                )
                with self.subTest(i=i, j=j):
                    self.assertEqual(1 if i == j else 0, inner)

    def test_dimensions(self):
        lams = list(character_values.partitions(6))
        self.assertEqual(math.factorial(6), sum(character_values.dimension(lam) ** 2 for lam in lams))
        identity = Partition((1,) * 6)
        for lam in lams:
            with self.subTest(lam=str(lam)):
                self.assertEqual(character_values.dimension(lam), character_values.character(lam, identity))

    def test_errors(self):
        with self.assertRaises(errors.OutOfRange):
            character_values.character(Partition((2,)), Partition((1,)))
        with self.assertRaises(errors.TooLarge):
            character_values.character_table(11)
        with self.assertRaises(errors.OutOfRange):
            character_values.character_table(0)


class TestCentralMeasures(base_test.TestBase):
    def test_thoma_parameter(self):
        with self.assertRaises(errors.OutOfRange):
            ThomaParameter(alpha=(Fraction(2, 3), Fraction(1, 2)))
        with self.assertRaises(errors.OutOfRange) as ctx:
            ThomaParameter(alpha=(Fraction(1, 4), Fraction(1, 2)))
        self.assertEqual(1, ctx.exception.index)
        with self.assertRaises(errors.OutOfRange):
            ThomaParameter(beta=(-0.1,))

    def test_plancherel(self):
        plancherel = character_values.central_measure(ThomaParameter(), 6)
        for lam, mass in plancherel.items():
            with self.subTest(lam=str(lam)):
                self.assertEqual(Fraction(character_values.dimension(lam) ** 2, math.factorial(6)), mass)

    def test_one_row(self):
        measure = character_values.central_measure(ThomaParameter(alpha=(1,)), 5)
        self.assertEqual(1, measure[Partition((5,))])
        self.assertEqual(1, sum(measure.values()))

    def test_exact_mass(self):
        self.assertEqual(1, sum(character_values.central_measure(OMEGA, 7).values()))
        self.assertEqual(
            [character_values.power_sum(OMEGA, 3)],
            character_values.cycle_type_cumulants(OMEGA, Partition((3,)), 6, 1),
        )


class TestCumulants(base_test.TestBase):
    def test_single_bound(self):
        kappas = character_values.cycle_type_cumulants(OMEGA, Partition((2,)), 8, 4)
        for r in (2, 3, 4):
            with self.subTest(r=r):
                self.assertLessEqual(abs(kappas[r - 1]), character_values.prop_bound_single(2, 8, r))

    def test_joint_bound(self):
        mus = [Partition((2,)), Partition((3,))]
        kappa = character_values.joint_character_cumulant(OMEGA, mus, 8)
        self.assertLessEqual(abs(kappa), character_values.prop_bound_joint([2, 3], 8))

    def test_polynomiality(self):
        fit = character_values.character_polynomiality(OMEGA, Partition((2,)), range(2, 9), r=2)
        sigma2, _ = character_values.sigma2_L_char(OMEGA, 2)
        self.assertEqual(3, fit.degree)
        self.assertEqual(sigma2, fit.leading)
        self.assertTrue(all(res == 0 for res in fit.residuals.values()))

    def test_errors(self):
        with self.assertRaises(errors.DomainError):
            character_values.character_polynomiality(ThomaParameter(alpha=(0.5,)), Partition((2,)), range(2, 9))
        with self.assertRaises(errors.OutOfRange):
            character_values.sigma2_L_char(OMEGA, 1)
        with self.assertRaises(errors.TooLarge):
            character_values.general_mu_limits(OMEGA, Partition((13,)))


class TestDeviation(base_test.TestBase):
    def test_exact_check(self):
        comparison = character_values.character_deviation_check(ThomaParameter(alpha=(0.6, 0.3)), 2, 10, 1.0)
        self.assertEqual("character", comparison.model)
        self.assertGreaterEqual(comparison.oracle, 0.0)
        self.assertLessEqual(comparison.oracle, 1.0)
        self.assertEqual("cumulant_moderate", str(comparison.estimate.regime))


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.character_values

    tests.addTests(doctest.DocTestSuite(modphi.character_values))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
