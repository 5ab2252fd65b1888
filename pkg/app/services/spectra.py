"""
Spectra Service
One-qubit marginal spectra and their feasibility under the polygon
inequalities: every smaller eigenvalue is at most the sum of the others.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.core.config import settings
from app.core.exceptions import OutOfRangeError
from app.services.statevec import PureState, derive_seed, eig2, reduce_one_qubit, seed_entropy

logger = logging.getLogger(__name__)


# ============================================================================
# MODELS
# ============================================================================

class Spectrum(BaseModel):
    """Smaller eigenvalue of each one-qubit marginal, qubit 1 first."""

    lambdas: List[float]

    @property
    def n(self) -> int:
        return len(self.lambdas)


class FeasibilityReport(BaseModel):
    """Per-inequality slacks (sum of others minus own value)."""

    n: int
    lambdas: List[float]
    feasible: bool
    slacks: List[float]
    min_slack: float
    worst_index: int = Field(description="1-based index of the smallest slack")
    boundary: bool
    eps: float


class SpectrumBatch(BaseModel):
    n: int
    seed: int
    spectra: List[Spectrum]
    attempts: int
    acceptance_rate: float


class DeterminantReport(BaseModel):
    """Triangle inequalities on det(rho_k) = lambda_k (1 - lambda_k)."""

    determinants: List[float]
    slacks: List[float]
    satisfied: bool


# ============================================================================
# FEASIBILITY
# ============================================================================

def polygon_slacks(values: Sequence[float]) -> np.ndarray:
    """(sum_{j != k} v_j) - v_k for every k."""
    v = np.asarray(values, dtype=float)
    return v.sum() - 2.0 * v


def normalize_lambdas(values: Sequence[float], window: Optional[float] = None) -> List[float]:
    """
    Clamp values within `window` of [0, 1/2] onto the interval.

    Raises:
        OutOfRangeError: If a value lies further outside; a value well above
            1/2 is a larger eigenvalue and is never reinterpreted
    """
    window = settings.clamp_window if window is None else window
    clean = []
    for k, lam in enumerate(values, start=1):
        lam = float(lam)
        if not np.isfinite(lam) or lam < -window or lam > 0.5 + window:
            raise OutOfRangeError(f"lambda_{k} = {lam} outside [0, 1/2]")
        clean.append(min(max(lam, 0.0), 0.5))
    return clean


def check_polygon(spectrum: Spectrum, eps: Optional[float] = None) -> FeasibilityReport:
    """
    Evaluate all n polygon inequalities.

    Feasible iff the minimum slack is >= -eps. Only the largest lambda can
    attain the minimum slack, but every slack is reported.

    Args:
        spectrum: Spectrum with entries in [0, 1/2]
        eps: One-sided tolerance (default settings.feasibility_eps)

    Raises:
        OutOfRangeError: If some lambda lies outside [0, 1/2]
    """
    eps = settings.feasibility_eps if eps is None else eps
    if not spectrum.lambdas:
        raise OutOfRangeError("spectrum must contain at least one value")

    lambdas = normalize_lambdas(spectrum.lambdas)
    slacks = polygon_slacks(lambdas)
    worst = int(np.argmin(slacks))
    min_slack = float(slacks[worst])

    report = FeasibilityReport(
        n=len(lambdas),
        lambdas=lambdas,
        feasible=min_slack >= -eps,
        slacks=[float(s) for s in slacks],
        min_slack=min_slack,
        worst_index=worst + 1,
        boundary=-eps <= min_slack <= eps,
        eps=eps,
    )

    if report.boundary and report.feasible:
        logger.debug(f"📐 Boundary spectrum (min slack {min_slack:.3e} at qubit {worst + 1})")
    return report


def determinant_triangle(spectrum: Spectrum) -> DeterminantReport:
    """
    The weaker determinant condition: det(rho_k) <= sum of the other
    determinants. Implied by the polygon inequalities but not equivalent.
    """
    lambdas = normalize_lambdas(spectrum.lambdas)
    dets = [lam * (1.0 - lam) for lam in lambdas]
    slacks = polygon_slacks(dets)
    return DeterminantReport(
        determinants=dets,
        slacks=[float(s) for s in slacks],
        satisfied=bool(np.min(slacks) >= -settings.feasibility_eps),
    )


def spectrum_of(state: PureState) -> Spectrum:
    """Smaller eigenvalue of every one-qubit marginal of a state."""
    return Spectrum(lambdas=[eig2(reduce_one_qubit(state, k)).lambda_small for k in range(1, state.n + 1)])


# ============================================================================
# SAMPLING
# ============================================================================

def _draw(n: int, rng: np.random.Generator) -> Tuple[List[float], int]:
    """One feasible spectrum and the number of candidates it took."""
    if n == 1:
        return [0.0], 1
    if n == 2:
        # Both inequalities together force lambda_1 = lambda_2
        value = float(rng.uniform(0.0, 0.5))
        return [value, value], 1

    attempts = 0
    while True:
        attempts += 1
        candidate = rng.uniform(0.0, 0.5, size=n)
        if float(np.min(polygon_slacks(candidate))) >= 0.0:
            return [float(x) for x in candidate], attempts


def sample_feasible_spectrum(n: int, seed: int) -> Spectrum:
    """
    Uniform rejection sample from [0, 1/2]^n conditioned on the polygon
    inequalities with eps = 0. n = 1 and n = 2 are drawn directly.
    """
    if n < 1:
        raise OutOfRangeError(f"qubit count must be at least 1, got {n}")
    lambdas, attempts = _draw(n, np.random.default_rng(seed_entropy(seed)))
    logger.debug(f"🎲 Spectrum sample n={n} seed={seed}: acceptance {1.0 / attempts:.3f}")
    return Spectrum(lambdas=lambdas)


def sample_feasible_spectra(n: int, count: int, seed: int) -> SpectrumBatch:
    """Batch of `count` feasible spectra with the overall acceptance rate."""
    if n < 1:
        raise OutOfRangeError(f"qubit count must be at least 1, got {n}")

    spectra = []
    attempts = 0
    for i in range(count):
        lambdas, tries = _draw(n, np.random.default_rng(derive_seed(seed, i)))
        spectra.append(Spectrum(lambdas=lambdas))
        attempts += tries

    rate = count / attempts if attempts else 1.0
    logger.info(f"🎲 Sampled {count} feasible spectra for n={n} (acceptance {rate:.3f})")
    return SpectrumBatch(n=n, seed=seed, spectra=spectra, attempts=attempts, acceptance_rate=rate)
