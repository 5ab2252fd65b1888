"""
Certification Service
Executable form of the necessity argument for the polygon inequalities,
plus the consistency conditions between overlapping marginals.

For qubit k the state is expanded in the product eigenbasis of all one-qubit
marginals with qubit k moved to the front:

    |Psi> = A sum_s a_s |0 s> + B sum_s b_s |1 s>,   A^2 = lambda_k <= B^2

Each intermediate quantity of the chain

    sum_others = A^2 sum N_s |a_s|^2 + B^2 sum N_s |b_s|^2
               >= A^2 (1 - |a_top|^2) + B^2 (1 - |b_top|^2)
               >= A^2 (2 - |a_top|^2 - |b_top|^2)
               >= A^2 = lambda_k

is recomputed and compared, where N_s counts the zeros in the string s and
`top` is the all-ones string.
"""

import itertools
import logging
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from app.core.config import settings
from app.core.exceptions import (
    BadSubsetError,
    IndexOutOfRangeError,
    OutOfRangeError,
    SingleQubitError,
    TheoremViolationError,
)
from app.services.spectra import polygon_slacks, spectrum_of
from app.services.statevec import (
    DensityMatrix,
    PureState,
    derive_seed,
    eig2,
    haar_sample,
    partial_trace_density,
    permute_qubits,
    reduce_one_qubit,
    reduce_subset,
)
from app.services.storage_service import to_pairs

logger = logging.getLogger(__name__)


# ============================================================================
# MODELS
# ============================================================================

class CertificateReport(BaseModel):
    """Every intermediate quantity of the necessity chain for one qubit."""

    qubit: int
    n: int
    other_qubits: List[int]
    trivial: bool
    lambdas: List[float]
    A2: float
    B2: float
    a_coeffs: List[List[float]]
    b_coeffs: List[List[float]]
    N_weights: List[int]
    sum_others: float
    weighted_sum: float
    bound0: float
    bound1: float
    a_top2: float
    b_top2: float
    cs_lhs: float
    cs_rhs: float
    reconstructed_lambdas: List[float]
    errors: Dict[str, float]
    slacks: Dict[str, float]
    checks: Dict[str, bool]
    holds: bool


class SubsetTriple(BaseModel):
    """Index sets with P and Q disjoint and P and R disjoint."""

    P: List[int]
    Q: List[int] = []
    R: List[int] = []


class ConsistencyReport(BaseModel):
    P: List[int]
    Q: List[int]
    R: List[int]
    deviation: float
    tolerance: float
    passed: bool


class SweepReport(BaseModel):
    """Necessity sweep over seeded Haar-random states."""

    n: int
    count: int
    seed: int
    min_slack: float
    worst_sample: int
    violations: int
    max_spread: float
    certified: bool
    certificates: int
    certificate_failures: int
    max_identity_error: float
    holds: bool


# ============================================================================
# NECESSITY CHAIN
# ============================================================================

def _front_permutation(n: int, k: int) -> List[int]:
    """Moves qubit k to position 1 and shifts qubits before it up by one."""
    return [1 if j == k else (j + 1 if j < k else j) for j in range(1, n + 1)]


def _eigenbasis_coefficients(state: PureState) -> Tuple[np.ndarray, List[float]]:
    """Coefficients of the state in the product of per-qubit eigenbases."""
    decompositions = [eig2(reduce_one_qubit(state, j)) for j in range(1, state.n + 1)]
    tensor = state.tensor()
    for axis, dec in enumerate(decompositions):
        u_dag = np.column_stack([dec.v_small, dec.v_large]).conj().T
        tensor = np.moveaxis(np.tensordot(u_dag, tensor, axes=([1], [axis])), 0, axis)
    return tensor.reshape(2, -1), [dec.lambda_small for dec in decompositions]


def necessity_certificate(state: PureState, k: int) -> CertificateReport:
    """
    Verify the necessity chain for qubit k on a concrete state.

    Args:
        state: Pure state with n >= 2
        k: Qubit under test (1-based)

    Returns:
        CertificateReport; lambda_k = 0 yields a trivially satisfied report

    Raises:
        SingleQubitError: If n = 1
        TheoremViolationError: If an inequality fails by more than
            settings.certificate_slack or an identity is off by more than
            settings.identity_tolerance (a numerical or implementation fault)
    """
    n = state.n
    if n < 2:
        raise SingleQubitError("the necessity chain needs at least two qubits")
    if not 1 <= k <= n:
        raise IndexOutOfRangeError(f"qubit index {k} outside 1..{n}")

    relabeled = permute_qubits(state, _front_permutation(n, k))
    flat, lambdas_front = _eigenbasis_coefficients(relabeled)
    others = [j for j in range(1, n + 1) if j != k]

    a2 = float(np.vdot(flat[0], flat[0]).real)
    b2 = float(np.vdot(flat[1], flat[1]).real)
    lambda_k = lambdas_front[0]
    trivial = lambda_k <= settings.degeneracy_tolerance

    a = flat[0] / np.sqrt(a2) if not trivial else np.zeros_like(flat[0])
    b = flat[1] / np.sqrt(b2)
    abs_a = np.abs(a) ** 2
    abs_b = np.abs(b) ** 2

    strings = np.arange(flat.shape[1])
    popcounts = np.array([bin(int(s)).count("1") for s in strings])
    n_weights = (n - 1) - popcounts
    top = flat.shape[1] - 1

    sum_others = float(sum(lambdas_front[1:]))
    weighted_sum = float(a2 * np.dot(n_weights, abs_a) + b2 * np.dot(n_weights, abs_b))
    a_top2, b_top2 = float(abs_a[top]), float(abs_b[top])
    bound0 = a2 * (1.0 - a_top2) + b2 * (1.0 - b_top2)
    bound1 = a2 * (2.0 - a_top2 - b_top2)
    cs_lhs = a_top2 * b_top2
    cs_rhs = (1.0 - a_top2) * (1.0 - b_top2)

    # lambda_j = A^2 sum_{i_j = 0} |a|^2 + B^2 sum_{i_j = 0} |b|^2
    grid_a = abs_a.reshape((2,) * (n - 1))
    grid_b = abs_b.reshape((2,) * (n - 1))
    reconstructed = [
        float(a2 * np.moveaxis(grid_a, t, 0)[0].sum() + b2 * np.moveaxis(grid_b, t, 0)[0].sum())
        for t in range(n - 1)
    ]

    errors = {
        "schmidt_weight": abs(a2 - lambda_k),
        "weighted_sum": abs(weighted_sum - sum_others),
        "lambda_reconstruction": max(abs(x - y) for x, y in zip(reconstructed, lambdas_front[1:])),
        "b_normalization": abs(float(abs_b.sum()) - 1.0),
    }
    slacks = {"polygon": sum_others - lambda_k}
    if not trivial:
        errors["a_normalization"] = abs(float(abs_a.sum()) - 1.0)
        errors["orthogonality"] = float(abs(np.vdot(a, b)))
        slacks.update({
            "weighted_ge_bound0": weighted_sum - bound0,
            "bound0_ge_bound1": bound0 - bound1,
            "cauchy_schwarz": cs_rhs - cs_lhs,
            "top_weights_le_one": 1.0 - a_top2 - b_top2,
            "bound1_ge_lambda": bound1 - a2,
        })

    checks = {name: err <= settings.identity_tolerance for name, err in errors.items()}
    checks.update({name: s >= -settings.certificate_slack for name, s in slacks.items()})

    report = CertificateReport(
        qubit=k,
        n=n,
        other_qubits=others,
        trivial=trivial,
        lambdas=[lambdas_front[others.index(j) + 1] if j != k else lambda_k for j in range(1, n + 1)],
        A2=a2,
        B2=b2,
        a_coeffs=to_pairs(a),
        b_coeffs=to_pairs(b),
        N_weights=[int(w) for w in n_weights],
        sum_others=sum_others,
        weighted_sum=weighted_sum,
        bound0=bound0,
        bound1=bound1,
        a_top2=a_top2,
        b_top2=b_top2,
        cs_lhs=cs_lhs,
        cs_rhs=cs_rhs,
        reconstructed_lambdas=reconstructed,
        errors=errors,
        slacks=slacks,
        checks=checks,
        holds=all(checks.values()),
    )

    if not report.holds:
        failed = [name for name, ok in checks.items() if not ok]
        logger.error(f"❌ Necessity chain failed for qubit {k}: {failed}")
        raise TheoremViolationError(f"necessity chain failed for qubit {k}: {', '.join(failed)}", report=report)

    return report


# ============================================================================
# CONSISTENCY CONDITIONS
# ============================================================================

def validate_triple(triple: SubsetTriple, n: int) -> None:
    """
    Raises:
        BadSubsetError: If P is empty, a set repeats or leaves 1..n, or P
            meets Q or R
    """
    if not triple.P:
        raise BadSubsetError("P must not be empty")
    for name in ("P", "Q", "R"):
        values = getattr(triple, name)
        if len(set(values)) != len(values):
            raise BadSubsetError(f"{name} repeats an index: {values}")
        if any(not 1 <= q <= n for q in values):
            raise BadSubsetError(f"{name} = {values} outside 1..{n}")
    if set(triple.P) & set(triple.Q) or set(triple.P) & set(triple.R):
        raise BadSubsetError(f"P must be disjoint from Q and R: {triple}")


def _marginal_of_p(state: PureState, p: List[int], extra: List[int]) -> DensityMatrix:
    """tr_extra rho_{P u extra}, as a matrix over P in increasing order."""
    union = sorted(set(p) | set(extra))
    rho = reduce_subset(state, union)
    return partial_trace_density(rho, [union.index(q) for q in sorted(p)])


def check_consistency(state: PureState, triple: SubsetTriple) -> ConsistencyReport:
    """
    Compare tr_Q rho_{P u Q} with tr_R rho_{P u R}.

    Returns:
        ConsistencyReport with the max absolute entry difference; passes at
        or below settings.consistency_tolerance
    """
    validate_triple(triple, state.n)
    left = _marginal_of_p(state, triple.P, triple.Q)
    right = _marginal_of_p(state, triple.P, triple.R)
    deviation = float(np.max(np.abs(left.matrix - right.matrix)))
    return ConsistencyReport(
        P=sorted(triple.P),
        Q=sorted(triple.Q),
        R=sorted(triple.R),
        deviation=deviation,
        tolerance=settings.consistency_tolerance,
        passed=deviation <= settings.consistency_tolerance,
    )


def _subsets(pool: List[int], max_size: int) -> List[List[int]]:
    return [list(c) for size in range(max_size + 1) for c in itertools.combinations(pool, size)]


def enumerate_triples(n: int, max_union: int) -> List[SubsetTriple]:
    """
    All triples with |P u Q| <= max_union and |P u R| <= max_union.
    Each unordered {Q, R} pair is listed once.
    """
    if max_union < 1:
        raise BadSubsetError(f"max_union must be at least 1, got {max_union}")

    qubits = list(range(1, n + 1))
    triples = []
    for p in _subsets(qubits, min(max_union, n)):
        if not p:
            continue
        pool = [q for q in qubits if q not in p]
        extras = _subsets(pool, max_union - len(p))
        for i, q in enumerate(extras):
            for r in extras[i:]:
                triples.append(SubsetTriple(P=p, Q=q, R=r))
    return triples


def check_all_consistency(
    state: PureState, max_union: int, triples: Optional[List[SubsetTriple]] = None
) -> List[ConsistencyReport]:
    """Run check_consistency over every enumerated triple."""
    triples = enumerate_triples(state.n, max_union) if triples is None else triples
    reports = [check_consistency(state, triple) for triple in triples]
    failed = sum(not r.passed for r in reports)
    if failed:
        logger.warning(f"⚠️  {failed}/{len(reports)} consistency triples exceeded tolerance")
    return reports


# ============================================================================
# SWEEPS
# ============================================================================

def necessity_sweep(n: int, count: int, seed: int, certify: bool = False) -> SweepReport:
    """
    Check the polygon inequalities on `count` Haar-random n-qubit states.

    Sample i is haar_sample(n, derive_seed(seed, i)). A slack below
    -settings.necessity_slack counts as a violation. With certify=True every
    qubit of every sample also goes through necessity_certificate; failures
    are counted rather than raised.
    """
    if count < 1:
        raise OutOfRangeError(f"sample count must be at least 1, got {count}")
    if certify and n < 2:
        raise SingleQubitError("certificates need at least two qubits")

    min_slack, worst_sample = float("inf"), 0
    violations = 0
    max_spread = 0.0
    certificates = failures = 0
    max_identity_error = 0.0

    for i in range(count):
        state = haar_sample(n, derive_seed(seed, i))
        lambdas = spectrum_of(state).lambdas
        slack = float(min(polygon_slacks(lambdas)))
        if slack < min_slack:
            min_slack, worst_sample = slack, i
        if slack < -settings.necessity_slack:
            violations += 1
        max_spread = max(max_spread, max(lambdas) - min(lambdas))

        if not certify:
            continue
        for k in range(1, n + 1):
            certificates += 1
            try:
                report = necessity_certificate(state, k)
            except TheoremViolationError as e:
                failures += 1
                report = e.report
            if report is not None:
                max_identity_error = max(max_identity_error, max(report.errors.values()))

    sweep = SweepReport(
        n=n,
        count=count,
        seed=seed,
        min_slack=min_slack,
        worst_sample=worst_sample,
        violations=violations,
        max_spread=max_spread,
        certified=certify,
        certificates=certificates,
        certificate_failures=failures,
        max_identity_error=max_identity_error,
        holds=violations == 0 and failures == 0,
    )

    if sweep.holds:
        logger.info(f"✅ n={n}: {count} samples, min slack {min_slack:.3e}")
    else:
        logger.warning(f"⚠️  n={n}: {violations} violations, {failures} certificate failures")
    return sweep
