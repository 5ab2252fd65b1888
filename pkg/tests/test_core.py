import os
import sys
import unittest

import numpy as np
from hypothesis import given
from hypothesis import settings as hypothesis_settings
from hypothesis.strategies import floats

# Add app to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.core.config import Settings
from app.core.exceptions import (
    BadSubsetError,
    InfeasibleError,
    InternalInvariantError,
    MalformedFileError,
    NotNormalizedError,
    TheoremViolationError,
)
from app.core.linalg import eigh_2x2, fix_phase, jacobi_eigvalsh
from app.core.utils import IndexParser


class TestEigh2x2(unittest.TestCase):
    def test_diagonal(self):
        dec = eigh_2x2(np.diag([0.7, 0.3]))
        self.assertAlmostEqual(dec.lambda_small, 0.3, places=15)
        self.assertAlmostEqual(dec.lambda_large, 0.7, places=15)
        np.testing.assert_allclose(np.abs(dec.v_small), [0.0, 1.0], atol=1e-15)
        self.assertFalse(dec.degenerate)

    def test_degenerate_returns_canonical_basis(self):
        dec = eigh_2x2(np.eye(2) / 2)
        self.assertTrue(dec.degenerate)
        np.testing.assert_array_equal(dec.v_small, [1, 0])
        np.testing.assert_array_equal(dec.v_large, [0, 1])

    def test_off_diagonal_complex(self):
        rho = np.array([[0.5, 0.25j], [-0.25j, 0.5]])
        dec = eigh_2x2(rho)
        self.assertAlmostEqual(dec.lambda_small, 0.25, places=14)
        self.assertAlmostEqual(dec.lambda_large, 0.75, places=14)
        np.testing.assert_allclose(rho @ dec.v_small, 0.25 * dec.v_small, atol=1e-14)
        np.testing.assert_allclose(rho @ dec.v_large, 0.75 * dec.v_large, atol=1e-14)
        # first component real and nonnegative
        self.assertAlmostEqual(dec.v_small[0].imag, 0.0, places=15)
        self.assertGreaterEqual(dec.v_small[0].real, 0.0)

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(floats(min_value=0.0, max_value=1.0), floats(min_value=-0.5, max_value=0.5),
           floats(min_value=-0.5, max_value=0.5))
    def test_matches_numpy(self, p, re, im):
        m = np.array([[p, re + 1j * im], [re - 1j * im, 1.0 - p]])
        dec = eigh_2x2(m)
        expected = np.linalg.eigvalsh(m)
        self.assertAlmostEqual(dec.lambda_small, expected[0], places=12)
        self.assertAlmostEqual(dec.lambda_large, expected[1], places=12)
        if not dec.degenerate:
            self.assertAlmostEqual(abs(np.vdot(dec.v_small, dec.v_large)), 0.0, places=12)


class TestJacobi(unittest.TestCase):
    def test_random_hermitian(self):
        rng = np.random.default_rng(7)
        for dim in (1, 2, 3, 5):
            z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            h = z + z.conj().T
            np.testing.assert_allclose(jacobi_eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-10)

    def test_ascending(self):
        values = jacobi_eigvalsh(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(values, [1.0, 2.0, 3.0])


class TestFixPhase(unittest.TestCase):
    def test_skips_tiny_components(self):
        v = np.array([1e-12, 1j])
        np.testing.assert_allclose(fix_phase(v), [-1e-12j, 1.0], atol=1e-20)


class TestIndexParser(unittest.TestCase):
    def test_subset_forms(self):
        self.assertEqual(IndexParser.parse_subset("1,2,3"), [1, 2, 3])
        self.assertEqual(IndexParser.parse_subset(" {3, 1 ,2}"), [1, 2, 3])
        self.assertEqual(IndexParser.parse_subset("2 4"), [2, 4])

    def test_subset_errors(self):
        with self.assertRaises(BadSubsetError):
            IndexParser.parse_subset("")
        with self.assertRaises(BadSubsetError):
            IndexParser.parse_subset("1,1")

    def test_pairs(self):
        self.assertEqual(IndexParser.parse_pairs("1-2,1-3,1-4"), [(1, 2), (1, 3), (1, 4)])
        self.assertEqual(IndexParser.parse_pairs("(2,1);(1:3)"), [(1, 2), (1, 3)])
        with self.assertRaises(BadSubsetError):
            IndexParser.parse_pairs("2-2")

    def test_pairs_reject_loose_text(self):
        self.assertEqual(IndexParser.parse_pairs("1-2 3:4"), [(1, 2), (3, 4)])
        self.assertEqual(IndexParser.parse_pairs(""), [])
        for text in ("1,2,3,4", "1-2,3", "1-2,3-", "1-23-4", "1-2(3,4)", "a-b", "1-2;x"):
            with self.assertRaises(BadSubsetError, msg=text):
                IndexParser.parse_pairs(text)


class TestSettingsAndErrors(unittest.TestCase):
    def test_env_override(self):
        os.environ["MARGINALS_MAX_QUBITS"] = "10"
        try:
            self.assertEqual(Settings().max_qubits, 10)
        finally:
            del os.environ["MARGINALS_MAX_QUBITS"]

    def test_defaults(self):
        s = Settings()
        self.assertEqual(s.feasibility_eps, 1e-9)
        self.assertEqual(s.file_norm_tolerance, 1e-8)

    def test_exit_codes(self):
        self.assertEqual(MalformedFileError("x").exit_code, 2)
        self.assertEqual(NotNormalizedError(0.1).exit_code, 2)
        self.assertEqual(InfeasibleError("x").exit_code, 1)
        self.assertEqual(InternalInvariantError("x").exit_code, 1)
        self.assertEqual(TheoremViolationError("x").exit_code, 1)

    def test_not_normalized_carries_deviation(self):
        self.assertEqual(NotNormalizedError(0.25).deviation, 0.25)


if __name__ == '__main__':
    unittest.main()
