""" Tests for file_access """

import tests.base_test as base_test

import modphi.file_access as file_access


class TestFileAccess(base_test.TestBase):
    def test_digest_differs(self):
        a = file_access.write_to_temp_file("a")
        b = file_access.write_to_temp_file("b")
        self.assertNotEqual(file_access.digest(a), file_access.digest(b))
        self.assertEqual(64, len(file_access.digest(a)))


def load_tests(loader, tests, ignore):
    """We want unittest to pick up all of our doctests

    See https://docs.python.org/3/library/unittest.html#load-tests-protocol
    See https://stackoverflow.com/a/27171468
    """
    import doctest

    import modphi.file_access

    tests.addTests(doctest.DocTestSuite(modphi.file_access))
    return tests


if __name__ == "__main__":
    base_test.run_tests()
