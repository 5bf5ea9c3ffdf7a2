""" Tests for partition_combinatorics """

import itertools
from fractions import Fraction

import networkx as nx

import tests.base_test as base_test

import modphi.errors as errors
import modphi.partition_combinatorics as partition_combinatorics
from modphi.partition_combinatorics import MultiGraph


class TestSetPartitions(base_test.TestBase):
    def test_bell_numbers(self):
        for n, bell in enumerate([1, 1, 2, 5, 15, 52, 203]):
            with self.subTest(n=n):
                self.assertEqual(bell, len(list(partition_combinatorics.set_partitions(n))))

    def test_mobius_sums_to_zero(self):
        for n in range(2, 7):
            with self.subTest(n=n):
                total = sum(partition_combinatorics.mobius(pi) for pi in partition_combinatorics.set_partitions(n))
                self.assertEqual(0, total)

    def test_finest_refines_everything(self):
        finest = partition_combinatorics.SetPartition(tuple((i,) for i in range(4)))
        for pi in partition_combinatorics.set_partitions(4):
            with self.subTest(pi=pi.blocks):
                self.assertTrue(partition_combinatorics.refines(finest, pi))

    def test_invalid_partition(self):
        with self.assertRaises(errors.OutOfRange):
            partition_combinatorics.SetPartition(((0, 1), (1, 2)))
        with self.assertRaises(errors.OutOfRange):
            partition_combinatorics.SetPartition(((0,), ()))


class TestCumulants(base_test.TestBase):
    def test_poisson_moments(self):
        moments = partition_combinatorics.cumulants_to_moments([2, 2, 2, 2])
        self.assertEqual([2, 6, 22, 94], moments)
        self.assertEqual([2, 2, 2, 2], partition_combinatorics.moments_to_cumulants(moments))

    def test_too_many_variables(self):
        with self.assertRaises(errors.TooManyVariables):
            partition_combinatorics.moments_to_cumulants([1] * 10)

    def test_joint_cumulants(self):
        f = partition_combinatorics.independent_bernoulli_family([Fraction(1, 2), Fraction(1, 3)])
        self.assertEqual(Fraction(2, 27), partition_combinatorics.joint_cumulant(f, [1, 1, 1]))
        self.assertEqual(0, partition_combinatorics.joint_cumulant(f, [0, 1, 1]))

        walk = partition_combinatorics.m_dependent_family(5, 2, Fraction(1, 2))
        self.assertEqual(Fraction(1, 16), partition_combinatorics.joint_cumulant(walk, [0, 1]))
        self.assertEqual(0, partition_combinatorics.joint_cumulant(walk, [0, 2]))
        self.assertTrue(partition_combinatorics.is_dependency_graph(walk))

    def test_bounds_hold(self):
        families = {
            "m-dependent": partition_combinatorics.m_dependent_family(6, 2, Fraction(1, 3)),
            "cliques": partition_combinatorics.clique_family([[0, 1, 2], [3, 4], [5]], Fraction(1, 2)),
        }
        for name, family in families.items():
            for r in range(1, 7):
                with self.subTest(family=name, r=r):
                    check = partition_combinatorics.verify_bound(family, r)
                    self.assertTrue(check.ok)
                    self.assertLessEqual(abs(check.cumulant), check.bound)

    def test_wrong_dependency_graph_is_detected(self):
        copies = partition_combinatorics.clique_family([[0, 1]], Fraction(1, 2))
        independent = partition_combinatorics.DependencyFamily(
            N=2, graph=nx.empty_graph(2), outcomes=copies.outcomes, A=copies.A
        )
        self.assertTrue(partition_combinatorics.is_dependency_graph(copies, splits=100, seed=3))
        self.assertFalse(partition_combinatorics.is_dependency_graph(independent, splits=100, seed=3))
        self.assertEqual(
            partition_combinatorics.is_dependency_graph(independent, splits=5, seed=11),
            partition_combinatorics.is_dependency_graph(independent, splits=5, seed=11),
        )

    def test_sum_law(self):
        family = partition_combinatorics.m_dependent_family(14, 2, Fraction(1, 3))
        self.assertEqual(1, sum(family.sum_law.values()))
        mean = sum(p * s for s, p in family.sum_law.items())
        self.assertEqual(14 * Fraction(1, 9), mean)
        check = partition_combinatorics.verify_bound(family, 6)
        self.assertTrue(check.ok)

    def test_invalid_families(self):
        with self.assertRaises(errors.OutOfRange):
            partition_combinatorics.clique_family([[0, 2]], Fraction(1, 2))
        with self.assertRaises(errors.OutOfRange):
            partition_combinatorics.m_dependent_family(0, 1, Fraction(1, 2))
        with self.assertRaises(errors.OutOfRange):
            partition_combinatorics.DependencyFamily(
                N=1, graph=nx.empty_graph(1), outcomes=((Fraction(1, 2), (Fraction(1),)),), A=Fraction(1)
            )
        with self.assertRaises(errors.TooLarge):
            partition_combinatorics.m_dependent_family(20, 2, Fraction(1, 2))

    def test_sparse_scheme(self):
        cm = partition_combinatorics.sparse_graph_scheme(1000, 4, 200.0, -8.0)
        self.assertEqual(250.0, cm.alpha_n)
        self.assertEqual(4.0, cm.beta_n)
        self.assertAlmostEqual(0.8, cm.sigma2, delta=1e-15)
        self.assertAlmostEqual(-0.032, cm.L, delta=1e-15)


class TestGraphFunctionals(base_test.TestBase):
    def test_normalized_edges(self):
        self.assertEqual(((0, 1), (1, 1)), MultiGraph(2, ((1, 0), (1, 1))).edges)
        with self.assertRaises(errors.OutOfRange):
            MultiGraph(2, ((0, 5),))

    def test_F_small_graphs(self):
        cases = {
            "tree": (MultiGraph(4, ((0, 1), (1, 2), (1, 3))), 1),
            "double edge": (MultiGraph(2, ((0, 1), (0, 1))), 1),
            "4-cycle": (MultiGraph(4, ((0, 1), (1, 2), (2, 3), (0, 3))), 3),
            "loop": (MultiGraph(2, ((0, 1), (0, 0))), 0),
            "disconnected": (MultiGraph(3, ((0, 1),)), 0),
        }
        for name, (H, expected) in cases.items():
            with self.subTest(graph=name):
                self.assertEqual(expected, partition_combinatorics.F_functional(H))

    def test_F_methods_agree_with_tutte(self):
        for n in range(2, 6):
            complete = MultiGraph(n, tuple(itertools.combinations(range(n), 2)))
            with self.subTest(n=n):
                subsets = partition_combinatorics.F_functional(complete, method="subsets")
                self.assertEqual(subsets, partition_combinatorics.F_functional(complete, method="recursion"))
                self.assertEqual(subsets, partition_combinatorics.tutte_point(complete, 1, 0))
        with self.assertRaises(errors.OutOfRange):
            partition_combinatorics.F_functional(MultiGraph(2, ((0, 1),)), method="guess")

    def test_spanning_trees(self):
        for n in range(2, 6):
            complete = MultiGraph(n, tuple(itertools.combinations(range(n), 2)))
            with self.subTest(n=n):
                self.assertEqual(n ** (n - 2), partition_combinatorics.spanning_tree_count(complete))
                self.assertEqual(n ** (n - 2), partition_combinatorics.tutte_point(complete, 1, 1))

    def test_tutte_errors(self):
        with self.assertRaises(errors.Disconnected):
            partition_combinatorics.tutte_point(MultiGraph(3, ((0, 1),)), 1, 1)
        with self.assertRaises(errors.TooLarge):
            partition_combinatorics.tutte_point(MultiGraph(2, ((0, 1),) * 21), 1, 1)

    def test_bicolored_identity(self):
        graphs = [
            MultiGraph(2, ((0, 1), (0, 1))),
            MultiGraph(4, tuple(itertools.combinations(range(4), 2))),
            MultiGraph(4, ((0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (0, 2))),
        ]
        for H in graphs:
            with self.subTest(edges=H.edges):
                lhs, rhs = partition_combinatorics.bicolored_identity_check(H)
                self.assertEqual(lhs, rhs)


class TestPolynomialFit(base_test.TestBase):
    def test_held_out_residual(self):
        fit = partition_combinatorics.fit_polynomial({n: Fraction(n**3) for n in range(1, 5)}, degree=2, r=3)
        self.assertEqual({4: Fraction(6)}, fit.residuals)

    def test_insufficient_points(self):
        with self.assertRaises(errors.InsufficientPoints):
            partition_combinatorics.fit_polynomial({1: Fraction(1), 2: Fraction(4)}, degree=1, r=2)


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.partition_combinatorics

    tests.addTests(doctest.DocTestSuite(modphi.partition_combinatorics))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
