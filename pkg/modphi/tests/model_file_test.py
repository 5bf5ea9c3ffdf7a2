""" Tests for model_file """

import math

import munch
import tests.base_test as base_test

import modphi.errors as errors
import modphi.model_file as model_file

MODEL_TOML = """
[law]
name = "poisson"
lambda = 2.0

[model]
t_n = 50.0

[psi]
kind = "exp_monomial"
L = 0.25
v = 3
"""


class TestModelFile(base_test.TestBase):
    def test_load_full_model(self):
        with self.get_text_file(MODEL_TOML, suffix=".toml") as path:
            spec = model_file.load(path)
            model = model_file.mod_phi_model(spec)
        self.assertEqual("poisson", spec.law.name)
        self.assertEqual(str(path.parent), spec.base_dir)
        self.assertTrue(model.law.lattice)
        self.assertAlmostEqual(2.0, model.law.mean)
        self.assertEqual(50.0, model.t_n)
        self.assertEqual("exp_monomial(L=0.25, v=3)", model.psi.label)
        self.assertIsNone(model_file.cumulant_model(spec))

    def test_invalid_toml(self):
        with self.get_text_file("[law\nname =", suffix=".toml") as path:
            with self.assertRaises(errors.InvalidLaw):
                model_file.load(path)

    def test_laws(self):
        cases = {
            "gaussian": ({"mean": 1.0, "variance": 4.0}, False, 1.0),
            "poisson": ({"lambda": 3.0}, True, 3.0),
            "bernoulli": ({"q": 0.25}, True, 0.25),
        }
        for name, (params, lattice, mean) in cases.items():
            with self.subTest(law=name):
                law = model_file.law_from_spec(munch.munchify({"law": {"name": name, **params}}))
                self.assertEqual(lattice, law.lattice)
                self.assertAlmostEqual(mean, law.mean)

    def test_invalid_laws(self):
        for section in ({"name": "cauchy"}, {"name": "custom"}, {"name": "poisson", "lambda": -1.0}):
            with self.subTest(section=section):
                with self.assertRaises(errors.InvalidLaw):
                    model_file.law_from_spec(munch.munchify({"law": section}))

    def test_custom_law_relative_to_model_file(self):
        with self.get_text_file("eta = 2*exp(z) - 2\nlattice = true\n", suffix=".eta") as eta_path:
            spec = munch.munchify({"law": {"name": "custom", "eta_file": eta_path.name}, "base_dir": str(eta_path.parent)})
            law = model_file.law_from_spec(spec)
        self.assertTrue(law.lattice)
        self.assertAlmostEqual(2.0, law.mean)

    def test_missing_t_n(self):
        for model in ({}, {"t_n": 0}, {"t_n": -3.0}):
            with self.subTest(model=model):
                with self.assertRaises(errors.OutOfRange):
                    model_file.mod_phi_model(munch.munchify({"model": model}))

    def test_cumulant_section(self):
        spec = munch.munchify({"cumulant": {"alpha_n": 250, "sigma2": 0.8, "L": -0.032}})
        cm = model_file.cumulant_model(spec)
        self.assertEqual((250.0, 1.0, 0.8, -0.032), (cm.alpha_n, cm.beta_n, cm.sigma2, cm.L))

    def test_conic_section(self):
        text = "[conic]\nd = 2\nt_n = 50.0\nA = [[2.0, 0.5], [0.5, 1.0]]\npsi = 'kurtosis'\n"
        with self.get_text_file(text, suffix=".toml") as path:
            model = model_file.conic_model(model_file.load(path))
        self.assertEqual(2, model.d)
        self.assertEqual(50.0, model.t_n)
        self.assertEqual([[2.0, 0.5], [0.5, 1.0]], model.A.tolist())
        self.assertAlmostEqual(math.exp(-16 / 96), model.psi([2.0, 0.0]), delta=1e-15)

    def test_invalid_conic_section(self):
        cases = {
            "no t_n": {"d": 2},
            "unknown psi": {"d": 2, "t_n": 10.0, "psi": "gamma"},
        }
        for name, section in cases.items():
            with self.subTest(case=name):
                with self.assertRaises(errors.OutOfRange):
                    model_file.conic_model(munch.munchify({"conic": section}))
        with self.assertRaises(errors.InvalidLaw):
            model_file.conic_model(munch.munchify({"conic": {"d": 2, "t_n": 10.0, "A": [[1.0, 2.0], [0.0, 1.0]]}}))


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.model_file

    tests.addTests(doctest.DocTestSuite(modphi.model_file))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
