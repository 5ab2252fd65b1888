"""
Explorer Service
Numerical experiments around the limits of the polygon inequalities:

- Four qubits: how close can the two-qubit marginals containing qubit 1 get
  to the totally mixed state I/4? A pure four-qubit state cannot make all of
  them totally mixed, so the best objective found stays strictly positive.
  The search is evidence, never proof.
- Qudits: the inequality with each lambda replaced by the sum of all but the
  largest eigenvalue of the one-qudit marginal.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from app.core.config import settings
from app.core.exceptions import (
    BadSubsetError,
    IndexOutOfRangeError,
    LengthMismatchError,
    NotNormalizedError,
    QubitCapExceededError,
    WrongSizeError,
)
from app.core.linalg import eigh_2x2, jacobi_eigvalsh
from app.services.spectra import polygon_slacks
from app.services.statevec import (
    DensityMatrix,
    PureState,
    derive_seed,
    haar_sample,
    marginal_matrix,
    seed_entropy,
)

logger = logging.getLogger(__name__)

DEFAULT_PAIRS: List[Tuple[int, int]] = [(1, 2), (1, 3), (1, 4)]
OBJECTIVE = "sum over pairs (i, j) of ||rho_ij - I/4||_F^2"


# ============================================================================
# FOUR-QUBIT SEARCH MODELS
# ============================================================================

class SearchConfig(BaseModel):
    """Restart structure and descent parameters; defaults come from settings."""

    restarts: int = Field(default_factory=lambda: settings.search_restarts, ge=1)
    max_iters: int = Field(default_factory=lambda: settings.search_max_iters, ge=0)
    seed: int = 0
    step: float = Field(default_factory=lambda: settings.search_step, gt=0)
    tolerance: float = Field(default_factory=lambda: settings.search_tolerance, ge=0)
    target_pairs: List[Tuple[int, int]] = Field(default_factory=lambda: list(DEFAULT_PAIRS))
    workers: int = Field(default_factory=lambda: settings.search_workers, ge=1)

    @field_validator("target_pairs")
    @classmethod
    def check_pairs_within_four(cls, pairs: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
        validate_pairs(pairs)
        return pairs


class RestartRecord(BaseModel):
    restart: int
    seed: int
    initial_objective: float
    final_objective: float
    iterations: int
    best_so_far: float


class SearchResult(BaseModel):
    objective: str = OBJECTIVE
    target_pairs: List[Tuple[int, int]]
    seed: int
    best_objective: float
    best_restart: int
    best_state: List[List[float]]
    per_restart: List[RestartRecord]

    def to_pure_state(self) -> PureState:
        return PureState(4, np.array([complex(re, im) for re, im in self.best_state]))


# ============================================================================
# OBJECTIVE
# ============================================================================

def validate_pairs(pairs: Sequence[Tuple[int, int]]) -> None:
    for i, j in pairs:
        if not (1 <= i <= 4 and 1 <= j <= 4) or i == j:
            raise BadSubsetError(f"pair ({i}, {j}) must name two distinct qubits in 1..4")


def _pair_matrix(amplitudes: np.ndarray, pair: Tuple[int, int]) -> Tuple[np.ndarray, List[int]]:
    """Cofactor matrix M (rho = M M^dagger) and the axis order used to build it."""
    keep = [pair[0] - 1, pair[1] - 1]
    order = keep + [axis for axis in range(4) if axis not in keep]
    moved = np.transpose(np.asarray(amplitudes).reshape((2,) * 4), order)
    return moved.reshape(4, 4), order


def objective_value(amplitudes: np.ndarray, pairs: Sequence[Tuple[int, int]]) -> float:
    """Objective on any 16-vector; the marginals are not renormalized."""
    total = 0.0
    for pair in pairs:
        rho = marginal_matrix(amplitudes, (2,) * 4, [pair[0] - 1, pair[1] - 1])
        total += float(np.sum(np.abs(rho - np.eye(4) / 4) ** 2))
    return total


def pair_mixedness_gradient(amplitudes: np.ndarray, pairs: Sequence[Tuple[int, int]]) -> np.ndarray:
    """
    Real gradient of objective_value, as the complex vector g with
    df = Re <g, dpsi>. Per pair, g = 4 (rho - I/4) M mapped back to the
    original axis order.
    """
    gradient = np.zeros((2,) * 4, dtype=complex)
    for pair in pairs:
        m, order = _pair_matrix(amplitudes, pair)
        delta = m @ m.conj().T - np.eye(4) / 4
        g = (4.0 * delta @ m).reshape((2,) * 4)
        gradient += np.transpose(g, np.argsort(order))
    return gradient.reshape(-1)


def pair_mixedness_objective(state: PureState, pairs: Sequence[Tuple[int, int]]) -> float:
    """
    Sum of squared Frobenius distances of the listed pair marginals from I/4.
    Zero iff every listed pair is totally mixed.

    Raises:
        WrongSizeError: If the state is not a four-qubit state
    """
    if state.n != 4:
        raise WrongSizeError(f"the pair objective is defined on 4 qubits, got n={state.n}")
    validate_pairs(pairs)
    return objective_value(state.amplitudes, pairs)


# ============================================================================
# SEARCH
# ============================================================================

def _descend(psi: np.ndarray, config: SearchConfig) -> Tuple[np.ndarray, float, int]:
    """
    Projected gradient descent on the unit sphere with step halving.
    The objective never increases between accepted iterates.
    """
    pairs = config.target_pairs
    value = objective_value(psi, pairs)
    iterations = 0

    for _ in range(config.max_iters):
        g = pair_mixedness_gradient(psi, pairs)
        tangent = g - np.real(np.vdot(psi, g)) * psi
        if np.linalg.norm(tangent) <= config.tolerance:
            break

        step = config.step
        accepted = None
        while step > 1e-12:
            candidate = psi - step * tangent
            candidate = candidate / np.linalg.norm(candidate)
            candidate_value = objective_value(candidate, pairs)
            if candidate_value < value:
                accepted = (candidate, candidate_value)
                break
            step *= 0.5
        if accepted is None:
            break

        iterations += 1
        improvement = value - accepted[1]
        psi, value = accepted
        if improvement <= config.tolerance:
            break

    return psi, value, iterations


@dataclass(frozen=True)
class _RestartOutcome:
    restart: int
    seed: int
    initial: float
    final: float
    iterations: int
    amplitudes: np.ndarray


def _run_restart(config: SearchConfig, restart: int) -> _RestartOutcome:
    seed = derive_seed(config.seed, restart)
    start = haar_sample(4, seed).amplitudes.copy()
    initial = objective_value(start, config.target_pairs)
    psi, final, iterations = _descend(start, config)
    return _RestartOutcome(restart, seed, initial, final, iterations, psi)


def search_mixed4(config: SearchConfig) -> SearchResult:
    """
    Minimize the pair objective from Haar-random starts.

    Restart r starts from haar_sample(4, derive_seed(config.seed, r)), so
    serial and threaded runs produce identical results; outcomes are merged
    in restart order.
    """
    logger.info(
        f"🔎 Searching {config.restarts} restarts (pairs={config.target_pairs}, "
        f"max_iters={config.max_iters}, workers={config.workers})"
    )

    restarts = range(config.restarts)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(lambda r: _run_restart(config, r), restarts))
    else:
        outcomes = [_run_restart(config, r) for r in restarts]

    records = []
    best = None
    for outcome in outcomes:
        if best is None or outcome.final < best.final:
            best = outcome
        records.append(
            RestartRecord(
                restart=outcome.restart,
                seed=outcome.seed,
                initial_objective=outcome.initial,
                final_objective=outcome.final,
                iterations=outcome.iterations,
                best_so_far=best.final,
            )
        )
        logger.debug(f"   restart {outcome.restart}: {outcome.initial:.6f} -> {outcome.final:.6f}")

    logger.info(f"✅ Best objective {best.final:.6e} at restart {best.restart}")
    return SearchResult(
        target_pairs=config.target_pairs,
        seed=config.seed,
        best_objective=best.final,
        best_restart=best.restart,
        best_state=[[float(z.real), float(z.imag)] for z in best.amplitudes],
        per_restart=records,
    )


# ============================================================================
# QUDITS
# ============================================================================

@dataclass(frozen=True, eq=False)
class QuditState:
    """Pure state of n particles with local dimension d, big-endian digits."""

    d: int
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.d < 2 or self.n < 1:
            raise LengthMismatchError(f"need d >= 2 and n >= 1, got d={self.d}, n={self.n}")
        if self.d ** self.n > 2 ** settings.max_qubits:
            raise QubitCapExceededError(f"d^n = {self.d ** self.n} exceeds the configured cap")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != self.d ** self.n:
            raise LengthMismatchError(f"expected {self.d ** self.n} amplitudes, got {amps.shape[0]}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)


class QuditPolygonReport(BaseModel):
    d: int
    n: int
    spectra: List[List[float]]
    mus: List[float]
    slacks: List[float]
    min_slack: float
    worst_index: int
    feasible: bool
    eps: float


def validate_qudit_state(raw: Sequence[complex], d: int, n: int, tol: Optional[float] = None) -> QuditState:
    """
    Raises:
        LengthMismatchError: If len(raw) != d^n
        NotNormalizedError: If the norm deviates beyond tol
    """
    tol = settings.norm_tolerance if tol is None else tol
    state = QuditState(d, n, raw)
    deviation = abs(float(np.vdot(state.amplitudes, state.amplitudes).real) - 1.0)
    if deviation > tol:
        raise NotNormalizedError(deviation)
    return state


def haar_qudit_sample(d: int, n: int, seed: int) -> QuditState:
    rng = np.random.default_rng(seed_entropy(seed))
    size = d ** n
    z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return QuditState(d, n, z / np.linalg.norm(z))


def qudit_ghz(d: int, n: int) -> QuditState:
    """sum_j |j j ... j> / sqrt(d)"""
    amps = np.zeros(d ** n, dtype=complex)
    stride = sum(d ** p for p in range(n))
    for j in range(d):
        amps[j * stride] = 1 / np.sqrt(d)
    return QuditState(d, n, amps)


def reduce_one_qudit(state: QuditState, k: int) -> DensityMatrix:
    """
    Raises:
        IndexOutOfRangeError: If k is not in 1..n
    """
    if not 1 <= k <= state.n:
        raise IndexOutOfRangeError(f"particle index {k} outside 1..{state.n}")
    return DensityMatrix((state.d,), marginal_matrix(state.amplitudes, (state.d,) * state.n, [k - 1]))


def marginal_spectrum(rho: DensityMatrix) -> np.ndarray:
    """Ascending eigenvalues; closed form for d = 2, Jacobi rotations otherwise."""
    if rho.matrix.shape == (2, 2):
        dec = eigh_2x2(rho.matrix)
        return np.array([max(dec.lambda_small, 0.0), dec.lambda_large])
    return jacobi_eigvalsh(rho.matrix)


def qudit_polygon_check(state: QuditState, eps: Optional[float] = None) -> QuditPolygonReport:
    """
    mu_k = sum of all but the largest eigenvalue of rho_k; checks
    mu_k <= sum_{j != k} mu_j for every k. At d = 2, mu_k is the smaller
    eigenvalue and the check coincides with the qubit polygon inequalities.
    """
    eps = settings.feasibility_eps if eps is None else eps
    spectra = [marginal_spectrum(reduce_one_qudit(state, k)) for k in range(1, state.n + 1)]
    mus = [float(np.sum(spectrum[:-1])) for spectrum in spectra]
    slacks = polygon_slacks(mus)
    worst = int(np.argmin(slacks))

    for k, spectrum in enumerate(spectra, start=1):
        logger.debug(f"   qudit {k} spectrum: {np.round(spectrum, 12).tolist()}")

    return QuditPolygonReport(
        d=state.d,
        n=state.n,
        spectra=[[float(x) for x in spectrum] for spectrum in spectra],
        mus=mus,
        slacks=[float(s) for s in slacks],
        min_slack=float(slacks[worst]),
        worst_index=worst + 1,
        feasible=float(slacks[worst]) >= -eps,
        eps=eps,
    )
