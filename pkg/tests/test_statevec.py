import math
import os
import sys
import unittest

import numpy as np
from hypothesis import given
from hypothesis import settings as hypothesis_settings
from hypothesis.strategies import floats, integers

# Add app to path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.core.exceptions import (
    BadSubsetError,
    IndexOutOfRangeError,
    InvalidDensityError,
    LengthMismatchError,
    NotAPermutationError,
    NotNormalizedError,
    NotUnitaryError,
    QubitCapExceededError,
    SingleQubitError,
)
from app.services.statevec import (
    DensityMatrix,
    PureState,
    QubitDensity,
    apply_local_unitary,
    basis_state,
    bell_state,
    compose_permutations,
    derive_seed,
    eig2,
    ghz_state,
    haar_sample,
    partial_trace_density,
    permute_qubits,
    reduce_one_qubit,
    reduce_subset,
    schmidt_split_first,
    validate_density,
    validate_density_matrix,
    validate_state,
    w_state,
)


class TestValidateState(unittest.TestCase):
    def test_accepts_normalized(self):
        state = validate_state([1 / math.sqrt(2), 0, 0, 1 / math.sqrt(2)], 2)
        self.assertEqual(state.n, 2)
        self.assertEqual(state.dim, 4)

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatchError):
            validate_state([1, 0, 0], 2)

    def test_not_normalized_is_not_rescaled(self):
        with self.assertRaises(NotNormalizedError) as ctx:
            validate_state([1, 1, 0, 0], 2)
        self.assertAlmostEqual(ctx.exception.deviation, 1.0)

    def test_tolerance_override(self):
        amps = np.array([1.0 + 1e-9, 0.0])
        with self.assertRaises(NotNormalizedError):
            validate_state(amps, 1)
        self.assertEqual(validate_state(amps, 1, tol=1e-8).n, 1)

    def test_qubit_cap(self):
        with self.assertRaises(QubitCapExceededError):
            haar_sample(30, seed=0)

    def test_amplitudes_are_read_only(self):
        state = bell_state()
        with self.assertRaises(ValueError):
            state.amplitudes[0] = 0.0


class TestReductions(unittest.TestCase):
    def test_bell_marginal_is_maximally_mixed(self):
        rho = reduce_one_qubit(bell_state(), 1)
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-15)
        dec = eig2(rho)
        self.assertAlmostEqual(dec.lambda_small, 0.5)
        self.assertTrue(dec.degenerate)

    def test_product_state(self):
        # |0> (x) |+>
        state = PureState(2, np.array([1, 1, 0, 0]) / math.sqrt(2))
        np.testing.assert_allclose(reduce_one_qubit(state, 1).matrix, [[1, 0], [0, 0]], atol=1e-15)
        np.testing.assert_allclose(reduce_one_qubit(state, 2).matrix, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)

    def test_basis_state_ordering(self):
        # qubit 1 is the most significant bit
        state = basis_state("100")
        self.assertEqual(int(np.argmax(np.abs(state.amplitudes))), 4)
        np.testing.assert_allclose(reduce_one_qubit(state, 1).matrix, [[0, 0], [0, 1]])
        np.testing.assert_allclose(reduce_one_qubit(state, 2).matrix, [[1, 0], [0, 0]])

    def test_w_state_marginals(self):
        for k in (1, 2, 3):
            np.testing.assert_allclose(
                reduce_one_qubit(w_state(3), k).matrix, np.diag([2 / 3, 1 / 3]), atol=1e-15
            )

    def test_ghz4_pair(self):
        rho = reduce_subset(ghz_state(4), [1, 2])
        np.testing.assert_allclose(rho.matrix, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)
        self.assertEqual(rho.dims, (2, 2))

    def test_subset_errors(self):
        with self.assertRaises(BadSubsetError):
            reduce_subset(ghz_state(3), [])
        with self.assertRaises(BadSubsetError):
            reduce_subset(ghz_state(3), [2, 1])
        with self.assertRaises(BadSubsetError):
            reduce_subset(ghz_state(3), [1, 4])
        with self.assertRaises(IndexOutOfRangeError):
            reduce_one_qubit(ghz_state(3), 0)

    def test_subset_then_trace_matches_direct(self):
        state = haar_sample(5, seed=11)
        rho = reduce_subset(state, [1, 3, 4])
        staged = partial_trace_density(rho, [0, 2])
        direct = reduce_subset(state, [1, 4])
        np.testing.assert_allclose(staged.matrix, direct.matrix, atol=1e-14)

    def test_full_trace(self):
        rho = reduce_subset(haar_sample(3, seed=2), [1, 2])
        scalar = partial_trace_density(rho, [])
        self.assertAlmostEqual(complex(scalar.matrix[0, 0]).real, 1.0, places=12)

    def test_subset_marginals_are_density_matrices(self):
        for n in (2, 3, 4):
            state = haar_sample(n, seed=n)
            validate_density_matrix(reduce_subset(state, list(range(1, n))))
        with self.assertRaises(InvalidDensityError):
            validate_density_matrix(DensityMatrix((2, 2), np.diag([0.6, 0.6, -0.1, -0.1])))
        with self.assertRaises(InvalidDensityError):
            validate_density_matrix(DensityMatrix((2, 2), np.diag([0.5, 0.5, 0.5, 0.5])))

    @hypothesis_settings(max_examples=20, deadline=None)
    @given(integers(min_value=2, max_value=6), integers(min_value=0, max_value=2 ** 32 - 1))
    def test_marginals_are_density_matrices(self, n, seed):
        state = haar_sample(n, seed)
        for k in range(1, n + 1):
            rho = reduce_one_qubit(state, k)
            validate_density(rho)
            self.assertAlmostEqual(np.trace(rho.matrix).real, 1.0, places=12)


class TestEig2(unittest.TestCase):
    def test_rejects_non_hermitian(self):
        with self.assertRaises(InvalidDensityError):
            eig2(QubitDensity(np.array([[0.5, 0.1], [0.2, 0.5]])))

    def test_rejects_bad_trace(self):
        with self.assertRaises(InvalidDensityError):
            eig2(QubitDensity(np.diag([0.5, 0.6])))

    def test_rejects_negative(self):
        with self.assertRaises(InvalidDensityError):
            eig2(QubitDensity(np.diag([1.1, -0.1])))

    def test_rejects_wrong_shape(self):
        with self.assertRaises(InvalidDensityError):
            QubitDensity(np.eye(3) / 3)

    def test_pure_marginal(self):
        dec = eig2(QubitDensity(np.diag([0.0, 1.0])))
        self.assertEqual(dec.lambda_small, 0.0)
        self.assertEqual(dec.lambda_large, 1.0)

    def test_plus_projector(self):
        dec = eig2(QubitDensity(np.array([[0.5, 0.5], [0.5, 0.5]])))
        self.assertAlmostEqual(dec.lambda_small, 0.0, places=15)
        self.assertAlmostEqual(dec.lambda_large, 1.0, places=15)
        self.assertFalse(dec.degenerate)
        np.testing.assert_allclose(dec.v_small, np.array([1, -1]) / math.sqrt(2), atol=1e-15)
        np.testing.assert_allclose(dec.v_large, np.array([1, 1]) / math.sqrt(2), atol=1e-15)

    @hypothesis_settings(max_examples=50, deadline=None)
    @given(floats(min_value=0.0, max_value=math.pi), floats(min_value=0.0, max_value=2 * math.pi))
    def test_pure_projectors(self, theta, phase):
        v = np.array([math.cos(theta / 2), np.exp(1j * phase) * math.sin(theta / 2)])
        dec = eig2(QubitDensity(np.outer(v, v.conj())))
        self.assertLessEqual(dec.lambda_small, 1e-12)
        self.assertAlmostEqual(abs(np.vdot(dec.v_large, v)), 1.0, places=12)
        self.assertLessEqual(abs(np.vdot(dec.v_small, v)), 1e-12)


class TestSchmidt(unittest.TestCase):
    def test_reassembly(self):
        for seed in range(20):
            state = haar_sample(6, seed)
            split = schmidt_split_first(state)
            self.assertLessEqual(split.reassembly_error(state), 1e-10)
            self.assertLessEqual(split.A, split.B)
            self.assertAlmostEqual(split.A ** 2 + split.B ** 2, 1.0, places=12)
            self.assertAlmostEqual(split.A ** 2, eig2(reduce_one_qubit(state, 1)).lambda_small, places=12)

    def test_product_state_degenerate(self):
        state = basis_state("011")
        split = schmidt_split_first(state)
        self.assertEqual(split.A, 0.0)
        self.assertTrue(split.degenerate)
        self.assertAlmostEqual(abs(np.vdot(split.Phi0.amplitudes, split.Phi1.amplitudes)), 0.0)
        self.assertLessEqual(split.reassembly_error(state), 1e-12)

    def test_tiny_lambda_keeps_small_term(self):
        lam = 1e-13
        amps = np.zeros(8)
        amps[0b000] = math.sqrt(lam)
        amps[0b111] = math.sqrt(1.0 - lam)
        state = PureState(3, amps)
        split = schmidt_split_first(state)
        self.assertTrue(split.degenerate)
        self.assertAlmostEqual(split.A, math.sqrt(lam), delta=1e-12)
        self.assertLessEqual(split.reassembly_error(state), 1e-12)
        self.assertAlmostEqual(abs(np.vdot(split.Phi0.amplitudes, split.Phi1.amplitudes)), 0.0, places=15)

    def test_bell(self):
        split = schmidt_split_first(bell_state())
        self.assertAlmostEqual(split.A, 1 / math.sqrt(2))
        self.assertLessEqual(split.reassembly_error(bell_state()), 1e-12)

    def test_single_qubit(self):
        with self.assertRaises(SingleQubitError):
            schmidt_split_first(basis_state("0"))


class TestPermutations(unittest.TestCase):
    def test_identity(self):
        state = haar_sample(3, seed=4)
        np.testing.assert_array_equal(permute_qubits(state, [1, 2, 3]).amplitudes, state.amplitudes)

    def test_relabel_moves_marginals(self):
        state = basis_state("100")
        moved = permute_qubits(state, [3, 1, 2])
        # qubit 1 of the input becomes qubit 3
        np.testing.assert_allclose(moved.amplitudes, basis_state("001").amplitudes)

    def test_marginal_follows_qubit(self):
        state = haar_sample(4, seed=9)
        perm = [2, 4, 1, 3]
        moved = permute_qubits(state, perm)
        for k in range(1, 5):
            np.testing.assert_allclose(
                reduce_one_qubit(moved, perm[k - 1]).matrix, reduce_one_qubit(state, k).matrix, atol=1e-14
            )

    def test_compose(self):
        state = haar_sample(3, seed=3)
        first, second = [2, 3, 1], [3, 1, 2]
        twice = permute_qubits(permute_qubits(state, first), second)
        once = permute_qubits(state, compose_permutations(first, second))
        np.testing.assert_allclose(twice.amplitudes, once.amplitudes)

    def test_not_a_permutation(self):
        with self.assertRaises(NotAPermutationError):
            permute_qubits(ghz_state(3), [1, 1, 2])


class TestLocalUnitary(unittest.TestCase):
    def test_hadamard_on_second_qubit(self):
        h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        state = apply_local_unitary(basis_state("00"), 2, h)
        np.testing.assert_allclose(state.amplitudes, np.array([1, 1, 0, 0]) / math.sqrt(2), atol=1e-15)

    def test_conjugates_marginal(self):
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        state = haar_sample(3, seed=1)
        rotated = apply_local_unitary(state, 2, q)
        before = reduce_one_qubit(state, 2).matrix
        np.testing.assert_allclose(reduce_one_qubit(rotated, 2).matrix, q @ before @ q.conj().T, atol=1e-14)
        np.testing.assert_allclose(reduce_one_qubit(rotated, 1).matrix, reduce_one_qubit(state, 1).matrix, atol=1e-14)

    def test_rejects_non_unitary(self):
        with self.assertRaises(NotUnitaryError):
            apply_local_unitary(ghz_state(2), 1, np.array([[1, 1], [0, 1]]))


class TestSampling(unittest.TestCase):
    def test_deterministic(self):
        np.testing.assert_array_equal(haar_sample(4, 42).amplitudes, haar_sample(4, 42).amplitudes)
        self.assertFalse(np.allclose(haar_sample(4, 42).amplitudes, haar_sample(4, 43).amplitudes))

    def test_normalized(self):
        self.assertAlmostEqual(haar_sample(8, 1).norm_squared(), 1.0, places=12)

    def test_derive_seed(self):
        self.assertEqual(derive_seed(1, 0), derive_seed(1, 0))
        self.assertNotEqual(derive_seed(1, 0), derive_seed(1, 1))

    def test_density_matrix_shape_check(self):
        with self.assertRaises(InvalidDensityError):
            DensityMatrix((2, 2), np.eye(2))

class TestSeeds(unittest.TestCase):
    def test_negative_seeds_are_accepted(self):
        state = haar_sample(3, seed=-1)
        self.assertAlmostEqual(state.norm_squared(), 1.0, places=12)
        np.testing.assert_array_equal(state.amplitudes, haar_sample(3, seed=-1).amplitudes)
        np.testing.assert_array_equal(state.amplitudes, haar_sample(3, seed=2 ** 64 - 1).amplitudes)

    @hypothesis_settings(max_examples=30, deadline=None)
    @given(integers(min_value=-(2 ** 70), max_value=2 ** 70), integers(min_value=0, max_value=1000))
    def test_derive_seed_takes_any_integer(self, seed, counter):
        child = derive_seed(seed, counter)
        self.assertGreaterEqual(child, 0)
        self.assertEqual(child, derive_seed(seed, counter))



if __name__ == '__main__':
    unittest.main()
