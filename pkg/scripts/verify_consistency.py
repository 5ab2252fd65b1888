"""
Verify Consistency and Schmidt Reassembly
Overlapping marginals of five-qubit states agree, and the Schmidt split
across qubit 1 reassembles six-qubit states.
"""
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.services.certify import check_all_consistency, enumerate_triples
from app.services.statevec import derive_seed, haar_sample, schmidt_split_first

CONSISTENCY_SAMPLES = 100
SCHMIDT_SAMPLES = 1_000
SEED = 11


def test_consistency():
    print("\n🔹 Consistency of overlapping marginals (n=5, |P u Q| <= 3)...")
    triples = enumerate_triples(5, 3)
    worst = 0.0
    for i in range(CONSISTENCY_SAMPLES):
        reports = check_all_consistency(haar_sample(5, derive_seed(SEED, i)), 3, triples=triples)
        worst = max(worst, max(r.deviation for r in reports))
    print(f"   {len(triples)} triples per state, worst deviation {worst:.2e}")
    assert worst <= 1e-10, f"❌ consistency deviation {worst}"
    print("   ✅ PASS")


def test_schmidt_reassembly():
    print("\n🔹 Schmidt reassembly (n=6)...")
    worst = 0.0
    for i in range(SCHMIDT_SAMPLES):
        state = haar_sample(6, derive_seed(SEED + 1, i))
        worst = max(worst, schmidt_split_first(state).reassembly_error(state))
    print(f"   worst reassembly error {worst:.2e}")
    assert worst <= 1e-10, f"❌ reassembly error {worst}"
    print("   ✅ PASS")


def main():
    print("=" * 70)
    print("CONSISTENCY VERIFICATION")
    print("=" * 70)
    try:
        test_consistency()
        test_schmidt_reassembly()
    except AssertionError as e:
        print(f"\n{e}")
        print("=" * 70)
        sys.exit(1)

    print("\n" + "=" * 70)
    print("ALL TESTS PASSED ✅")
    print("=" * 70)


if __name__ == "__main__":
    main()
