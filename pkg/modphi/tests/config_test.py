""" Tests for config """

import os

import tests.base_test as base_test

import modphi.config as config


class TestConfig(base_test.TestBase):
    def test_chunks_do_not_depend_on_threads(self):
        """Chunk sizes only depend on the trial count"""
        for threads in (1, 2, 8):
            with self.subTest(threads=threads):
                cfg = config.Config(chunk_trials=3, default_threads=threads, threads_env="MODPHI_UNSET_THREADS")
                self.assertEqual([3, 3, 1], cfg.chunks(7))
                self.assertEqual(threads, cfg.thread_count)

    def test_thread_override(self):
        os.environ["MODPHI_CONFIG_TEST_THREADS"] = "0"
        try:
            self.assertEqual(1, config.Config(threads_env="MODPHI_CONFIG_TEST_THREADS").thread_count)
        finally:
            os.environ.pop("MODPHI_CONFIG_TEST_THREADS")

    def test_fast_mode(self):
        cfg = config.Config(trials=5, fast=True, fast_factor=10)
        self.assertEqual(1, cfg.effective_trials)

    def test_as_dict(self):
        d = config.Config(seed=3, output_format="csv").as_dict()
        self.assertEqual(3, d["seed"])
        self.assertEqual("csv", d["output_format"])
        self.assertIn("saddle_tolerance", d)


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.config

    tests.addTests(doctest.DocTestSuite(modphi.config))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
