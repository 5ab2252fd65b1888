"""
State Vector Service
Dense pure-state representation for small qubit counts.

Basis label (i_1, ..., i_n) maps to amplitude index sum_k i_k * 2^(n-k):
qubit 1 is the most significant bit, so reshaping the amplitude vector to
(2,) * n puts qubit k on axis k - 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.core.config import settings
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
from app.core.linalg import Eigh2, eigh_2x2, jacobi_eigvalsh

logger = logging.getLogger(__name__)

SEED_MODULUS = 2 ** 64


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True, eq=False)
class PureState:
    """
    Normalized pure state of n qubits.

    Amplitudes are copied on construction and frozen, so instances are safe
    to share across threads. Use validate_state() for untrusted input; the
    constructor only checks the length.
    """

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if self.n < 1 or amps.shape[0] != 2 ** self.n:
            raise LengthMismatchError(
                f"expected {2 ** max(self.n, 0)} amplitudes for n={self.n}, got {amps.shape[0]}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def tensor(self) -> np.ndarray:
        """Amplitudes as an n-axis array; axis k - 1 is qubit k."""
        return self.amplitudes.reshape((2,) * self.n)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True, eq=False)
class QubitDensity:
    """2x2 reduced density matrix of one qubit."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise InvalidDensityError(f"one-qubit density must be 2x2, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced density matrix of a subsystem with local dimensions `dims`."""

    dims: Tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        size = int(np.prod(dims)) if dims else 1
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (size, size):
            raise InvalidDensityError(f"density for dims {dims} must be {size}x{size}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class SchmidtSplit:
    """
    Two-term Schmidt form across qubit 1 versus the rest:
    |Psi> = A |phi0>|Phi0> + B |phi1>|Phi1>, 0 <= A <= B, A^2 + B^2 = 1.
    """

    A: float
    B: float
    phi0: np.ndarray
    phi1: np.ndarray
    Phi0: PureState
    Phi1: PureState
    degenerate: bool

    def reassemble(self) -> np.ndarray:
        return (
            self.A * np.kron(self.phi0, self.Phi0.amplitudes)
            + self.B * np.kron(self.phi1, self.Phi1.amplitudes)
        )

    def reassembly_error(self, state: PureState) -> float:
        return float(np.linalg.norm(state.amplitudes - self.reassemble()))


# ============================================================================
# VALIDATION
# ============================================================================

def _check_cap(n: int) -> None:
    if n < 1:
        raise LengthMismatchError(f"qubit count must be at least 1, got {n}")
    if n > settings.max_qubits:
        raise QubitCapExceededError(f"n={n} exceeds the configured cap of {settings.max_qubits} qubits")


def validate_state(raw: Sequence[complex], n: int, tol: Optional[float] = None) -> PureState:
    """
    Build a PureState from raw amplitudes, verifying length and norm.

    Args:
        raw: 2^n complex amplitudes in big-endian qubit order
        n: Qubit count
        tol: Allowed |norm^2 - 1| (default settings.norm_tolerance)

    Returns:
        The validated state (never renormalized)

    Raises:
        LengthMismatchError: If len(raw) != 2^n
        NotNormalizedError: If the norm deviates beyond tol
    """
    tol = settings.norm_tolerance if tol is None else tol
    _check_cap(n)

    amps = np.asarray(raw, dtype=complex).reshape(-1)
    if amps.shape[0] != 2 ** n:
        raise LengthMismatchError(f"expected {2 ** n} amplitudes for n={n}, got {amps.shape[0]}")

    deviation = abs(float(np.vdot(amps, amps).real) - 1.0)
    if deviation > tol:
        raise NotNormalizedError(deviation)

    return PureState(n, amps)


def validate_density(rho: QubitDensity) -> None:
    """
    Check the QubitDensity invariants: Hermitian, unit trace, PSD.

    Raises:
        InvalidDensityError: On the first violated invariant
    """
    _check_density_matrix(rho.matrix)


def validate_density_matrix(rho: DensityMatrix) -> None:
    """Same invariants as validate_density for a multi-particle marginal."""
    _check_density_matrix(rho.matrix)


def _check_density_matrix(m: np.ndarray) -> None:
    herm_dev = float(np.max(np.abs(m - m.conj().T)))
    if herm_dev > settings.hermitian_tolerance:
        raise InvalidDensityError(f"matrix is not Hermitian (deviation {herm_dev:.3e})")

    trace_dev = abs(complex(np.trace(m)) - 1.0)
    if trace_dev > settings.trace_tolerance:
        raise InvalidDensityError(f"trace deviates from 1 by {trace_dev:.3e}")

    if m.shape == (2, 2):
        smallest = eigh_2x2(m).lambda_small
    else:
        smallest = float(jacobi_eigvalsh(m)[0])
    if smallest < -settings.psd_tolerance:
        raise InvalidDensityError(f"matrix has negative eigenvalue {smallest:.3e}")


def _check_qubit_index(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise IndexOutOfRangeError(f"qubit index {k} outside 1..{n}")


# ============================================================================
# PARTIAL TRACES
# ============================================================================

def marginal_matrix(amplitudes: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """
    Reduced density matrix of the particles at 0-based positions `keep`.

    (rho)_{rs} = sum over the traced indices of psi(..r..) * conj(psi(..s..)),
    computed as M M^dagger after moving the kept axes to the front.
    """
    dims = tuple(dims)
    keep = list(keep)
    rest = [i for i in range(len(dims)) if i not in keep]

    psi = np.asarray(amplitudes).reshape(dims)
    moved = np.transpose(psi, keep + rest)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    m = moved.reshape(d_keep, -1)

    rho = m @ m.conj().T
    return 0.5 * (rho + rho.conj().T)


def reduce_one_qubit(state: PureState, k: int) -> QubitDensity:
    """
    Reduced state of qubit k (1-based).

    Raises:
        IndexOutOfRangeError: If k is not in 1..n
    """
    _check_qubit_index(state.n, k)
    return QubitDensity(marginal_matrix(state.amplitudes, (2,) * state.n, [k - 1]))


def reduce_subset(state: PureState, subset: Sequence[int]) -> DensityMatrix:
    """
    Reduced state of a qubit subset, tracing out the complement.

    Args:
        state: Pure state
        subset: Strictly increasing 1-based qubit indices

    Raises:
        BadSubsetError: If the subset is empty, unsorted, repeated or out of range
    """
    subset = [int(q) for q in subset]
    if not subset:
        raise BadSubsetError("subset must not be empty")
    if any(b <= a for a, b in zip(subset, subset[1:])):
        raise BadSubsetError(f"subset {subset} must be strictly increasing")
    if subset[0] < 1 or subset[-1] > state.n:
        raise BadSubsetError(f"subset {subset} outside 1..{state.n}")

    matrix = marginal_matrix(state.amplitudes, (2,) * state.n, [q - 1 for q in subset])
    return DensityMatrix((2,) * len(subset), matrix)


def partial_trace_density(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """
    Trace a density matrix down to the factors at 0-based positions `keep`.

    Args:
        rho: Density matrix with local dimensions rho.dims
        keep: Strictly increasing positions within rho.dims (may be empty)

    Returns:
        Reduced density matrix over the kept factors, in the same order
    """
    keep = [int(p) for p in keep]
    count = len(rho.dims)
    if any(b <= a for a, b in zip(keep, keep[1:])) or any(not 0 <= p < count for p in keep):
        raise BadSubsetError(f"positions {keep} invalid for {count} factors")

    tensor = rho.matrix.reshape(rho.dims + rho.dims)
    remaining = count
    for pos in sorted(set(range(count)) - set(keep), reverse=True):
        tensor = np.trace(tensor, axis1=pos, axis2=pos + remaining)
        remaining -= 1

    kept_dims = tuple(rho.dims[p] for p in keep)
    size = int(np.prod(kept_dims)) if kept_dims else 1
    return DensityMatrix(kept_dims, np.asarray(tensor).reshape(size, size))


# ============================================================================
# SPECTRAL DATA
# ============================================================================

def eig2(rho: QubitDensity) -> Eigh2:
    """
    Closed-form eigen-decomposition of a one-qubit density matrix.

    Returns lambda_small <= 1/2 <= lambda_large with orthonormal eigenvectors
    whose first component above settings.phase_threshold is real and
    nonnegative. At lambda = 1/2 the basis is (|0>, |1>) and the degenerate
    flag is set.

    Raises:
        InvalidDensityError: If rho is not Hermitian, unit-trace and PSD
    """
    validate_density(rho)
    result = eigh_2x2(rho.matrix)
    if result.lambda_small < 0.0:
        result = result._replace(lambda_small=0.0, lambda_large=1.0)
    return result


def schmidt_split_first(state: PureState) -> SchmidtSplit:
    """
    Schmidt decomposition across qubit 1 versus qubits 2..n.

    Phi_j is the normalized cofactor (<phi_j| (x) I)|Psi>. For lambda_1 within
    settings.degeneracy_tolerance of 0 the degenerate flag is set; a nonzero
    small cofactor is kept as A Phi0 (orthogonalized against Phi1). When it
    vanishes exactly, A = 0 and Phi0 is an arbitrary unit vector orthogonal
    to Phi1.

    Raises:
        SingleQubitError: If n = 1
    """
    if state.n < 2:
        raise SingleQubitError("a single qubit has no Schmidt split")

    decomposition = eig2(reduce_one_qubit(state, 1))
    phi0, phi1 = decomposition.v_small, decomposition.v_large
    m = state.amplitudes.reshape(2, -1)

    cof0 = np.conj(phi0) @ m
    cof1 = np.conj(phi1) @ m
    a = float(np.linalg.norm(cof0))
    b = float(np.linalg.norm(cof1))
    degenerate = decomposition.degenerate

    if decomposition.lambda_small <= settings.degeneracy_tolerance:
        logger.warning(f"⚠️  Schmidt split across qubit 1 with lambda_1 = {decomposition.lambda_small:.3e}")
        big = cof1 / b
        # Keep a nonzero small term, orthogonalized against Phi1
        residual = cof0 - np.vdot(big, cof0) * big
        residual_norm = float(np.linalg.norm(residual))
        if a > 0.0 and residual_norm > 0.0:
            return SchmidtSplit(a, b, phi0, phi1, PureState(state.n - 1, residual / residual_norm),
                                PureState(state.n - 1, big), True)
        other = _orthogonal_unit(big)
        return SchmidtSplit(0.0, 1.0, phi0, phi1, PureState(state.n - 1, other),
                            PureState(state.n - 1, big), True)

    if a > b:
        # Only reachable at lambda_1 = 1/2, where the eigenbasis is a free choice
        a, b, cof0, cof1, phi0, phi1 = b, a, cof1, cof0, phi1, phi0

    return SchmidtSplit(
        a,
        b,
        phi0,
        phi1,
        PureState(state.n - 1, cof0 / a),
        PureState(state.n - 1, cof1 / b),
        degenerate,
    )


def _orthogonal_unit(vector: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to `vector` (Gram-Schmidt on its weakest basis axis)."""
    axis = int(np.argmin(np.abs(vector)))
    candidate = np.zeros_like(vector)
    candidate[axis] = 1.0
    candidate = candidate - np.vdot(vector, candidate) * vector
    return candidate / np.linalg.norm(candidate)


# ============================================================================
# TRANSFORMATIONS
# ============================================================================

def _check_permutation(perm: Sequence[int], n: int) -> List[int]:
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(1, n + 1)):
        raise NotAPermutationError(f"{perm} is not a permutation of 1..{n}")
    return perm


def permute_qubits(state: PureState, perm: Sequence[int]) -> PureState:
    """
    Relabel qubits: qubit k of the input becomes qubit perm[k-1] of the output.

    Raises:
        NotAPermutationError: If perm is not a bijection of 1..n
    """
    perm = _check_permutation(perm, state.n)
    axes = np.argsort([p - 1 for p in perm])
    moved = np.transpose(state.tensor(), axes)
    return PureState(state.n, moved.reshape(-1))


def compose_permutations(first: Sequence[int], second: Sequence[int]) -> List[int]:
    """Permutation equal to applying `first` then `second`."""
    first = _check_permutation(first, len(first))
    second = _check_permutation(second, len(second))
    return [second[p - 1] for p in first]


def apply_local_unitary(state: PureState, k: int, unitary: np.ndarray) -> PureState:
    """
    Apply a 2x2 unitary to qubit k.

    Raises:
        IndexOutOfRangeError: If k is not in 1..n
        NotUnitaryError: If U^dagger U deviates from I beyond settings.unitary_tolerance
    """
    _check_qubit_index(state.n, k)
    u = np.asarray(unitary, dtype=complex)
    if u.shape != (2, 2):
        raise NotUnitaryError(f"local unitary must be 2x2, got shape {u.shape}")
    deviation = float(np.max(np.abs(u.conj().T @ u - np.eye(2))))
    if deviation > settings.unitary_tolerance:
        raise NotUnitaryError(f"matrix is not unitary (deviation {deviation:.3e})")

    rotated = np.tensordot(u, state.tensor(), axes=([1], [k - 1]))
    rotated = np.moveaxis(rotated, 0, k - 1)
    return PureState(state.n, rotated.reshape(-1))


# ============================================================================
# SAMPLING AND NAMED STATES
# ============================================================================

def haar_sample(n: int, seed: int) -> PureState:
    """
    Haar-random pure state: 2^n i.i.d. standard complex Gaussians, normalized.
    Deterministic for a given seed.
    """
    _check_cap(n)
    rng = np.random.default_rng(seed_entropy(seed))
    z = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return PureState(n, z / np.linalg.norm(z))


def seed_entropy(seed: int) -> int:
    """Any integer seed as the nonnegative entropy numpy accepts (mod 2^64)."""
    return int(seed) % SEED_MODULUS


def derive_seed(seed: int, counter: int) -> int:
    """Independent child seed for the counter-th draw of a seeded batch."""
    entropy = [seed_entropy(seed), seed_entropy(counter)]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def basis_state(bits: str) -> PureState:
    """Computational basis state; the first character is qubit 1."""
    bits = bits.strip()
    if not bits or set(bits) - {"0", "1"}:
        raise LengthMismatchError(f"basis label {bits!r} must be a nonempty 0/1 string")
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return PureState(len(bits), amps)


def bell_state() -> PureState:
    """(|00> + |11>) / sqrt(2)"""
    return PureState(2, np.array([1, 0, 0, 1]) / math.sqrt(2))


def ghz_state(n: int) -> PureState:
    """(|0...0> + |1...1>) / sqrt(2)"""
    _check_cap(n)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState(n, amps)


def w_state(n: int) -> PureState:
    """Equal superposition of the n single-excitation basis states."""
    _check_cap(n)
    amps = np.zeros(2 ** n, dtype=complex)
    for k in range(n):
        amps[1 << k] = 1 / math.sqrt(n)
    return PureState(n, amps)
