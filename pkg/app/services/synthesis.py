"""
Synthesis Service
Constructs pure n-qubit states with prescribed one-qubit marginals.

The construction is inductive. Three qubits use the closed form
a|100> + b|010> + c|001> + d|111>. For n >= 4 the largest value is reduced
by the smallest (big_lambda = lambda_max - lambda_min), an (n-1)-qubit state
is built for the reduced multiset, and a fresh qubit is attached with an
angle chi chosen so that its |0> weight equals lambda_min.

Every constructed amplitude is real and nonnegative and every one-qubit
marginal is diagonal with the smaller eigenvalue on |0><0|.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from app.core.config import settings
from app.core.exceptions import InfeasibleError, InternalInvariantError
from app.services.spectra import Spectrum, check_polygon, normalize_lambdas, spectrum_of
from app.services.statevec import (
    PureState,
    QubitDensity,
    apply_local_unitary,
    eig2,
    permute_qubits,
    reduce_one_qubit,
)

logger = logging.getLogger(__name__)


# ============================================================================
# MODELS
# ============================================================================

class SynthesisLevel(BaseModel):
    """One recursion level, outermost (depth 0) first."""

    depth: int
    n: int
    permutation: List[int]
    big_lambda: float
    lambda_min: float
    chi: float
    sin2_chi: float
    phi_norm2: float
    psi_norm2: float
    case: int


class BaseAmplitudes(BaseModel):
    """Coefficients of a|100> + b|010> + c|001> + d|111>."""

    lambdas: List[float]
    a: float
    b: float
    c: float
    d: float


class SynthesisTraceReport(BaseModel):
    requested: List[float]
    achieved: List[float]
    max_error: float
    levels: List[SynthesisLevel]
    base: Optional[BaseAmplitudes] = None


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    state: PureState
    requested: Spectrum
    achieved: Spectrum
    trace: List[SynthesisLevel] = field(default_factory=list)
    base: Optional[BaseAmplitudes] = None

    @property
    def max_error(self) -> float:
        return float(max(abs(x - y) for x, y in zip(self.requested.lambdas, self.achieved.lambdas)))

    def trace_report(self) -> SynthesisTraceReport:
        return SynthesisTraceReport(
            requested=self.requested.lambdas,
            achieved=self.achieved.lambdas,
            max_error=self.max_error,
            levels=self.trace,
            base=self.base,
        )


def _default_eps() -> float:
    # radicand = slack / 2, so the clamp window on radicands maps to twice that on slacks
    return 2.0 * settings.clamp_window


# ============================================================================
# BASE CASES
# ============================================================================

def _base3_amplitudes(l1: float, l2: float, l3: float) -> BaseAmplitudes:
    window = settings.clamp_window
    radicands = [
        0.5 * (l2 + l3 - l1),
        0.5 * (l3 + l1 - l2),
        0.5 * (l1 + l2 - l3),
    ]
    for k, value in enumerate(radicands, start=1):
        if value < -window:
            raise InfeasibleError(
                f"triangle inequality for qubit {k} violated by {-2 * value:.3e} in ({l1}, {l2}, {l3})"
            )

    a2, b2, c2 = (max(value, 0.0) for value in radicands)
    d2 = max(1.0 - a2 - b2 - c2, 0.0)
    return BaseAmplitudes(
        lambdas=[l1, l2, l3],
        a=math.sqrt(a2),
        b=math.sqrt(b2),
        c=math.sqrt(c2),
        d=math.sqrt(d2),
    )


def _base3_vector(amps: BaseAmplitudes) -> np.ndarray:
    vector = np.zeros(8)
    vector[0b100] = amps.a
    vector[0b010] = amps.b
    vector[0b001] = amps.c
    vector[0b111] = amps.d
    return vector


def synth_base3(l1: float, l2: float, l3: float) -> PureState:
    """
    Three-qubit state a|100> + b|010> + c|001> + d|111> whose marginal on
    qubit k has |0> weight l_k.

    a^2 = (l2 + l3 - l1) / 2, b^2 = (l3 + l1 - l2) / 2,
    c^2 = (l1 + l2 - l3) / 2, d^2 = 1 - a^2 - b^2 - c^2.

    Raises:
        InfeasibleError: If a triangle inequality fails beyond the clamp window
    """
    l1, l2, l3 = normalize_lambdas([l1, l2, l3])
    return PureState(3, _base3_vector(_base3_amplitudes(l1, l2, l3)))


def synth_small(spectrum: Spectrum, eps: Optional[float] = None) -> PureState:
    """
    One and two qubit cases: |1> for n = 1 (lambda must vanish) and
    sqrt(l)|00> + sqrt(1 - l)|11> for n = 2 (lambda_1 must equal lambda_2).

    Raises:
        InfeasibleError: If the spectrum violates the polygon inequalities
    """
    eps = _default_eps() if eps is None else eps
    lambdas = normalize_lambdas(spectrum.lambdas)

    if len(lambdas) == 1:
        if lambdas[0] > eps:
            raise InfeasibleError(f"a single qubit of a pure state is pure; got lambda = {lambdas[0]}")
        return PureState(1, np.array([0.0, 1.0]))

    if len(lambdas) == 2:
        if abs(lambdas[0] - lambdas[1]) > eps:
            raise InfeasibleError(f"two-qubit marginals need equal spectra; got {lambdas}")
        lam = 0.5 * (lambdas[0] + lambdas[1])
        return PureState(2, np.array([math.sqrt(lam), 0.0, 0.0, math.sqrt(1.0 - lam)]))

    raise InfeasibleError(f"synth_small handles n in {{1, 2}}, got n = {len(lambdas)}")


# ============================================================================
# RECURSION
# ============================================================================

def _construct(
    lambdas: List[float],
    depth: int,
    eps: float,
    levels: List[SynthesisLevel],
    bases: List[BaseAmplitudes],
) -> np.ndarray:
    """Amplitudes of a state whose qubit k has |0> weight lambdas[k]."""
    n = len(lambdas)

    # Stable descending sort; ties keep their original order
    order = sorted(range(n), key=lambda i: (-lambdas[i], i))
    ordered = [lambdas[i] for i in order]
    permutation = [i + 1 for i in order]

    if n == 3:
        amps = _base3_amplitudes(*ordered)
        bases.append(amps)
        base = PureState(3, _base3_vector(amps))
        return np.real(permute_qubits(base, permutation).amplitudes)

    lambda_min = ordered[-1]
    big_lambda = ordered[0] - lambda_min
    middle = ordered[1:-1]
    inner = [big_lambda] + middle
    case = 1 if all(big_lambda >= value for value in middle) else 2

    inner_report = check_polygon(Spectrum(lambdas=inner), eps=eps)
    if not inner_report.feasible:
        logger.error(f"❌ Reduced spectrum {inner} infeasible at depth {depth} (slack {inner_report.min_slack:.3e})")
        raise InternalInvariantError(
            f"reduced spectrum at depth {depth} is infeasible (min slack {inner_report.min_slack:.3e})"
        )

    inner_amps = _construct(inner, depth + 1, eps, levels, bases)

    # Split along the qubit carrying big_lambda: |0>|phi> + |1>|psi>
    halves = inner_amps.reshape(2, -1)
    phi, psi = halves[0], halves[1]
    phi_norm2 = float(np.dot(phi, phi))
    psi_norm2 = float(np.dot(psi, psi))

    # psi_norm2 = 1 - big_lambda >= 1/2 >= lambda_min
    sin2_chi = min(lambda_min / psi_norm2, 1.0)
    chi = math.asin(math.sqrt(sin2_chi))
    sin_chi, cos_chi = math.sin(chi), math.cos(chi)

    # |0>|phi>|1> + sin(chi)|0>|psi>|0> + cos(chi)|1>|psi>|1>
    grown = np.zeros((2, phi.shape[0], 2))
    grown[0, :, 1] = phi
    grown[0, :, 0] = sin_chi * psi
    grown[1, :, 1] = cos_chi * psi

    restored = permute_qubits(PureState(n, grown.reshape(-1)), permutation)

    levels.append(
        SynthesisLevel(
            depth=depth,
            n=n,
            permutation=permutation,
            big_lambda=big_lambda,
            lambda_min=lambda_min,
            chi=chi,
            sin2_chi=sin2_chi,
            phi_norm2=phi_norm2,
            psi_norm2=psi_norm2,
            case=case,
        )
    )
    logger.debug(
        f"🔁 depth={depth} n={n} case={case} big_lambda={big_lambda:.6f} "
        f"lambda_min={lambda_min:.6f} sin2_chi={sin2_chi:.6f}"
    )
    return np.real(restored.amplitudes)


def synth_spectrum(spectrum: Spectrum, eps: Optional[float] = None) -> SynthesisResult:
    """
    Build a pure state whose qubit k has smaller eigenvalue spectrum.lambdas[k-1].

    Args:
        spectrum: Target spectrum
        eps: Feasibility tolerance (default twice settings.clamp_window, the
            window in which base-case radicands are clamped)

    Returns:
        SynthesisResult with the state, the recursion trace and the spectrum
        recomputed by partial trace

    Raises:
        InfeasibleError: If the spectrum fails the polygon inequalities
        InternalInvariantError: If a recursion level loses feasibility or the
            achieved spectrum misses the target
    """
    eps = _default_eps() if eps is None else eps
    lambdas = normalize_lambdas(spectrum.lambdas)
    requested = Spectrum(lambdas=lambdas)

    report = check_polygon(requested, eps=eps)
    if not report.feasible:
        raise InfeasibleError(
            f"spectrum violates the polygon inequality for qubit {report.worst_index} "
            f"(slack {report.min_slack:.3e})",
            report=report,
        )

    levels: List[SynthesisLevel] = []
    bases: List[BaseAmplitudes] = []
    if len(lambdas) <= 2:
        state = synth_small(requested, eps=eps)
    else:
        state = PureState(len(lambdas), _construct(lambdas, 0, eps, levels, bases))

    levels.sort(key=lambda level: level.depth)
    result = SynthesisResult(
        state=state,
        requested=requested,
        achieved=spectrum_of(state),
        trace=levels,
        base=bases[0] if bases else None,
    )

    if result.max_error > settings.synthesis_tolerance:
        logger.error(f"❌ Achieved spectrum misses the target by {result.max_error:.3e}")
        raise InternalInvariantError(f"achieved spectrum error {result.max_error:.3e}")

    logger.info(f"✅ Synthesized n={len(lambdas)} state ({len(levels)} levels, error {result.max_error:.2e})")
    return result


# ============================================================================
# FULL DENSITY TARGETS
# ============================================================================

def eigenbasis_unitary(v_small: np.ndarray, v_large: np.ndarray) -> np.ndarray:
    """Unitary sending |0> to v_small and |1> to v_large."""
    return np.column_stack([v_small, v_large])


@dataclass(frozen=True, eq=False)
class DensitySynthesisResult:
    state: PureState
    spectrum: SynthesisResult
    unitaries: List[Optional[np.ndarray]]
    max_error: float


def synth_density_detailed(targets: Sequence[QubitDensity]) -> DensitySynthesisResult:
    """
    Pure state whose one-qubit marginals equal the given density matrices.

    The spectrum is synthesized first; then each qubit is rotated by the
    local unitary taking the computational basis to the target eigenbasis.
    Degenerate targets (I/2) need no rotation and get None.

    Raises:
        InvalidDensityError: If a target is not a valid density matrix
        InfeasibleError: If the target spectra fail the polygon inequalities
    """
    decompositions = [eig2(rho) for rho in targets]
    lambdas = [min(max(dec.lambda_small, 0.0), 0.5) for dec in decompositions]

    spectrum = synth_spectrum(Spectrum(lambdas=lambdas))
    state = spectrum.state
    unitaries: List[Optional[np.ndarray]] = []
    for k, dec in enumerate(decompositions, start=1):
        if dec.degenerate:
            unitaries.append(None)
            continue
        u = eigenbasis_unitary(dec.v_small, dec.v_large)
        state = apply_local_unitary(state, k, u)
        unitaries.append(u)

    max_error = max(
        float(np.max(np.abs(reduce_one_qubit(state, k).matrix - target.matrix)))
        for k, target in enumerate(targets, start=1)
    )
    logger.info(f"✅ Synthesized state for {len(targets)} density targets (error {max_error:.2e})")
    return DensitySynthesisResult(state=state, spectrum=spectrum, unitaries=unitaries, max_error=max_error)


def synth_density(targets: Sequence[QubitDensity]) -> PureState:
    return synth_density_detailed(targets).state
