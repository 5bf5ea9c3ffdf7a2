""" Tests for suite """

import networkx as nx
import numpy as np

import tests.base_test as base_test

import modphi.errors as errors
import modphi.models as models
import modphi.partition_combinatorics as partition_combinatorics
import modphi.suite as suite


class TestSuite(base_test.TestBase):
    def test_criteria_registry(self):
        numbers = [c.number for c in suite.CRITERIA]
        self.assertEqual(list(range(1, 16)), sorted(numbers))
        for c in suite.CRITERIA:
            with self.subTest(criterion=c.name):
                self.assertIn(c.group, suite.GROUPS)

    def test_exact_groups_pass(self):
        for group in ("legendre", "combinatorics", "cumulants"):
            with self.subTest(group=group):
                results = suite.run_suite(group, self.config)
                self.assertGreater(len(results), 0)
                for result in results:
                    self.assertTrue(result.passed, result.measured)
                    self.assertEqual(group, result.group)

    def test_results_are_ordered(self):
        results = suite.run_suite("cumulants", self.config)
        self.assertEqual([3, 4], [r.number for r in results])
        row = results[1].as_row()
        self.assertEqual("moment cumulant inversion", row["name"])
        self.assertEqual("0,1,0,0,0,0", row["measured.gaussian_cumulants"])

    def test_dependency_families(self):
        passed, measured = suite.dependency_graph_bound(self.config)
        self.assertTrue(passed, measured)
        self.assertEqual(50, measured["families"])
        for kind in ("m_dependent", "clique"):
            with self.subTest(kind=kind):
                self.assertGreater(measured[f"{kind}_max_ratio"], 0)
                self.assertLessEqual(measured[f"{kind}_max_ratio"], 1)

    def test_random_dependency_family(self):
        rng = np.random.default_rng(self.config.seed)
        for i in range(20):
            family = suite._random_dependency_family(rng, clique=i % 2 == 1)
            with self.subTest(i=i):
                self.assertGreaterEqual(family.N, 4)
                self.assertLessEqual(family.N, 14)
                self.assertTrue(partition_combinatorics.is_dependency_graph(family))
                if i % 2:
                    # disjoint union of cliques
                    for component in nx.connected_components(family.graph):
                        k = len(component)
                        self.assertEqual(k * (k - 1) // 2, family.graph.subgraph(component).number_of_edges())

    def test_poisson_crossover_at_half_integers(self):
        passed, measured = suite.poisson_crossover(self.config)
        self.assertTrue(passed, measured)
        self.assertLessEqual(measured["max_relative_error"], 0.05)

    def test_ising_ring_uses_cumulant_estimate(self):
        passed, measured = suite.ising_ring(self.config)
        self.assertTrue(passed, measured)
        expected = models.ising_deviation(2000, 0.5, 0.8, self.config, estimate="cumulant")
        self.assertEqual(expected.ratio, measured["ratio"])
        self.assertNotEqual(measured["mod_gaussian_ratio"], measured["ratio"])

    def test_unknown_group(self):
        with self.assertRaises(errors.OutOfRange):
            suite.run_suite("everything", self.config)

    def test_fast_mode_widens_tolerances(self):
        cfg = self.config
        self.assertEqual(1.0, suite._mc_slack(cfg))
        self.assertEqual(20_000, suite._trials(cfg, 20_000))
        cfg.fast = True
        self.assertAlmostEqual(cfg.fast_factor**0.5, suite._mc_slack(cfg))
        self.assertEqual(20_000 // cfg.fast_factor, suite._trials(cfg, 20_000))


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.suite

    tests.addTests(doctest.DocTestSuite(modphi.suite))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
