"""
Verify Explorer Experiments
Four-qubit search for totally mixed pair marginals (the floor is recorded,
only its positivity is asserted) and the generalized inequality on
Haar-random qutrits.
"""
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.services.explorer import QuditState, SearchConfig, haar_qudit_sample, qudit_polygon_check, search_mixed4
from app.services.spectra import check_polygon, spectrum_of
from app.services.statevec import derive_seed, haar_sample

RESTARTS = 100
QUDIT_SAMPLES = 1_000
SEEDS = (1, 2, 3)


def test_four_qubit_search():
    print("\n🔹 Four-qubit search, pairs (1,2), (1,3), (1,4)...")
    for seed in SEEDS:
        result = search_mixed4(SearchConfig(restarts=RESTARTS, seed=seed))
        again = search_mixed4(SearchConfig(restarts=RESTARTS, seed=seed))
        print(f"   seed {seed}: best objective {result.best_objective:.6e} (restart {result.best_restart})")
        assert result.best_objective == again.best_objective, "❌ search is not deterministic"
        assert result.best_objective > 1e-6, f"❌ objective {result.best_objective} reached zero"
    print("   ✅ PASS")


def test_qutrits():
    print("\n🔹 Generalized inequality on Haar-random qutrits...")
    for n in (2, 3, 4):
        worst = min(
            qudit_polygon_check(haar_qudit_sample(3, n, derive_seed(n, i))).min_slack
            for i in range(QUDIT_SAMPLES)
        )
        print(f"   n={n}: worst slack {worst:+.3e}")
        assert worst >= -1e-9, f"❌ violation at n={n}"
    print("   ✅ PASS")


def test_qubit_agreement():
    print("\n🔹 d=2 agrees with the qubit check...")
    for i in range(QUDIT_SAMPLES):
        state = haar_sample(5, derive_seed(99, i))
        qudit = qudit_polygon_check(QuditState(2, 5, state.amplitudes))
        qubit = check_polygon(spectrum_of(state))
        assert qudit.feasible == qubit.feasible, f"❌ verdicts differ on sample {i}"
        assert qudit.mus == spectrum_of(state).lambdas, f"❌ spectra differ on sample {i}"
    print("   ✅ PASS")


def main():
    print("=" * 70)
    print("EXPLORER VERIFICATION")
    print("=" * 70)
    try:
        test_four_qubit_search()
        test_qutrits()
        test_qubit_agreement()
    except AssertionError as e:
        print(f"\n{e}")
        print("=" * 70)
        sys.exit(1)

    print("\n" + "=" * 70)
    print("ALL TESTS PASSED ✅")
    print("=" * 70)


if __name__ == "__main__":
    main()
