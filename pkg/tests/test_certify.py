import os
import sys
import unittest

import numpy as np
from hypothesis import given
from hypothesis import settings as hypothesis_settings
from hypothesis.strategies import integers

# Add app to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.core.exceptions import BadSubsetError, IndexOutOfRangeError, SingleQubitError
from app.services.certify import (
    SubsetTriple,
    check_all_consistency,
    check_consistency,
    enumerate_triples,
    necessity_certificate,
    necessity_sweep,
)
from app.services.statevec import basis_state, bell_state, ghz_state, haar_sample, w_state


class TestNecessityCertificate(unittest.TestCase):
    def test_ghz3(self):
        report = necessity_certificate(ghz_state(3), 1)
        self.assertTrue(report.holds)
        self.assertFalse(report.trivial)
        self.assertAlmostEqual(report.A2, 0.5, places=12)
        self.assertAlmostEqual(report.sum_others, 1.0, places=12)
        self.assertAlmostEqual(report.weighted_sum, 1.0, places=12)
        self.assertEqual(report.other_qubits, [2, 3])

    def test_w3_reconstruction(self):
        report = necessity_certificate(w_state(3), 2)
        self.assertTrue(report.holds)
        np.testing.assert_allclose(report.reconstructed_lambdas, [1 / 3, 1 / 3], atol=1e-12)
        self.assertLessEqual(report.errors["lambda_reconstruction"], 1e-12)

    def test_product_state_is_trivial(self):
        report = necessity_certificate(basis_state("010"), 2)
        self.assertTrue(report.trivial)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.A2, 0.0)

    def test_chain_is_ordered(self):
        for seed in range(10):
            state = haar_sample(5, seed)
            for k in range(1, 6):
                r = necessity_certificate(state, k)
                self.assertTrue(r.holds)
                self.assertGreaterEqual(r.weighted_sum, r.bound0 - 1e-12)
                self.assertGreaterEqual(r.bound0, r.bound1 - 1e-12)
                self.assertGreaterEqual(r.bound1, r.A2 - 1e-12)
                self.assertLessEqual(r.cs_lhs, r.cs_rhs + 1e-12)
                self.assertLessEqual(max(r.errors.values()), 1e-9)

    def test_bell(self):
        report = necessity_certificate(bell_state(), 2)
        self.assertTrue(report.holds)
        self.assertAlmostEqual(report.slacks["polygon"], 0.0, places=12)

    def test_errors(self):
        with self.assertRaises(SingleQubitError):
            necessity_certificate(basis_state("1"), 1)
        with self.assertRaises(IndexOutOfRangeError):
            necessity_certificate(ghz_state(3), 4)

    @hypothesis_settings(max_examples=20, deadline=None)
    @given(integers(min_value=2, max_value=6), integers(min_value=0, max_value=2 ** 32 - 1))
    def test_haar_states_certify(self, n, seed):
        state = haar_sample(n, seed)
        for k in range(1, n + 1):
            self.assertTrue(necessity_certificate(state, k).holds)


class TestConsistency(unittest.TestCase):
    def test_single_triple(self):
        report = check_consistency(haar_sample(5, 3), SubsetTriple(P=[1], Q=[2, 3], R=[4]))
        self.assertTrue(report.passed)
        self.assertLessEqual(report.deviation, 1e-10)

    def test_empty_q_and_r(self):
        report = check_consistency(haar_sample(3, 0), SubsetTriple(P=[2]))
        self.assertEqual(report.deviation, 0.0)

    def test_ghz4_overlapping_pairs(self):
        report = check_consistency(ghz_state(4), SubsetTriple(P=[1], Q=[2], R=[3]))
        self.assertLessEqual(report.deviation, 1e-12)

    def test_bad_triples(self):
        state = haar_sample(4, 0)
        with self.assertRaises(BadSubsetError):
            check_consistency(state, SubsetTriple(P=[]))
        with self.assertRaises(BadSubsetError):
            check_consistency(state, SubsetTriple(P=[1], Q=[1, 2]))
        with self.assertRaises(BadSubsetError):
            check_consistency(state, SubsetTriple(P=[1], R=[5]))

    def test_enumeration_bounds(self):
        triples = enumerate_triples(4, 2)
        self.assertTrue(triples)
        for t in triples:
            self.assertLessEqual(len(set(t.P) | set(t.Q)), 2)
            self.assertLessEqual(len(set(t.P) | set(t.R)), 2)
            self.assertFalse(set(t.P) & set(t.Q))

    def test_all_consistency_n5(self):
        for seed in range(5):
            reports = check_all_consistency(haar_sample(5, seed), 3)
            self.assertTrue(all(r.passed for r in reports))


class TestSweep(unittest.TestCase):
    def test_sweep_holds(self):
        sweep = necessity_sweep(4, 30, seed=1, certify=True)
        self.assertTrue(sweep.holds)
        self.assertEqual(sweep.certificates, 120)
        self.assertEqual(sweep.certificate_failures, 0)
        self.assertGreaterEqual(sweep.min_slack, -1e-12)

    def test_two_qubit_spread(self):
        sweep = necessity_sweep(2, 50, seed=7)
        self.assertLessEqual(sweep.max_spread, 1e-10)

    def test_deterministic(self):
        self.assertEqual(necessity_sweep(3, 10, seed=2), necessity_sweep(3, 10, seed=2))


if __name__ == '__main__':
    unittest.main()
