"""
Verify Synthesis
Round trips feasible spectra through the inductive construction, checks the
three-qubit closed form, degenerate and boundary spectra, and full density
matrix targets.
"""
import sys
import os
import time

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.core.exceptions import InfeasibleError
from app.services.spectra import Spectrum, sample_feasible_spectra, spectrum_of
from app.services.statevec import QubitDensity, derive_seed, reduce_one_qubit
from app.services.synthesis import synth_base3, synth_density, synth_spectrum

ROUND_TRIPS = 1_000
DENSITY_TARGETS = 100
SEED = 7


def test_round_trip():
    print("\n🔹 Sufficiency round trip...")
    start = time.time()
    for n in range(1, 9):
        batch = sample_feasible_spectra(n, ROUND_TRIPS, SEED + n)
        worst = max(synth_spectrum(spectrum).max_error for spectrum in batch.spectra)
        print(f"   n={n}: acceptance {batch.acceptance_rate:.3f}, worst error {worst:.2e}")
        assert worst <= 1e-10, f"❌ round-trip error {worst} at n={n}"
    print(f"   ✅ PASS ({time.time() - start:.1f}s)")


def test_base_case():
    print("\n🔹 Three-qubit closed form at (0.5, 0.3, 0.2)...")
    amps = synth_base3(0.5, 0.3, 0.2).amplitudes.real
    squares = [amps[0b100] ** 2, amps[0b010] ** 2, amps[0b001] ** 2, amps[0b111] ** 2]
    print(f"   a^2, b^2, c^2, d^2 = {np.round(squares, 15).tolist()}")
    assert np.allclose(squares, [0.0, 0.2, 0.3, 0.5], atol=1e-12, rtol=0), "❌ base amplitudes"
    achieved = spectrum_of(synth_base3(0.5, 0.3, 0.2)).lambdas
    assert np.allclose(achieved, [0.5, 0.3, 0.2], atol=1e-12, rtol=0), "❌ base spectrum"
    print("   ✅ PASS")


def test_degenerate_and_boundary():
    print("\n🔹 Degenerate and boundary spectra...")
    cases = []
    for n in range(1, 9):
        cases.append([0.0] * n)
    for n in range(2, 9):
        cases.append([0.5] * n)
    cases += [[0.5, 0.25, 0.25], [0.5, 0.2, 0.1, 0.1, 0.1], [0.4, 0.1, 0.1, 0.1, 0.1]]
    for lambdas in cases:
        error = synth_spectrum(Spectrum(lambdas=lambdas)).max_error
        assert error <= 1e-10, f"❌ error {error} for {lambdas}"
    print(f"   {len(cases)} spectra within 1e-10")

    for rejected in ([0.1], [0.3, 0.2]):
        try:
            synth_spectrum(Spectrum(lambdas=rejected))
        except InfeasibleError:
            continue
        raise AssertionError(f"❌ {rejected} should be infeasible")
    print("   ✅ PASS")


def test_density_targets():
    print("\n🔹 Full one-qubit density targets...")
    worst = 0.0
    for n in (3, 4, 5):
        batch = sample_feasible_spectra(n, DENSITY_TARGETS, SEED * 10 + n)
        for i, spectrum in enumerate(batch.spectra):
            rng = np.random.default_rng(derive_seed(SEED * 100 + n, i))
            targets = []
            for lam in spectrum.lambdas:
                q, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
                targets.append(QubitDensity(q @ np.diag([lam, 1.0 - lam]) @ q.conj().T))
            state = synth_density(targets)
            for k, target in enumerate(targets, start=1):
                worst = max(worst, float(np.max(np.abs(reduce_one_qubit(state, k).matrix - target.matrix))))
    print(f"   worst max-entry distance {worst:.2e}")
    assert worst <= 1e-9, f"❌ density target error {worst}"
    print("   ✅ PASS")


def main():
    print("=" * 70)
    print("SYNTHESIS VERIFICATION")
    print("=" * 70)
    try:
        test_round_trip()
        test_base_case()
        test_degenerate_and_boundary()
        test_density_targets()
    except AssertionError as e:
        print(f"\n{e}")
        print("=" * 70)
        sys.exit(1)

    print("\n" + "=" * 70)
    print("ALL TESTS PASSED ✅")
    print("=" * 70)


if __name__ == "__main__":
    main()
