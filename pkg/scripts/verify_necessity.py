"""
Verify Necessity Sweeps
Haar-random states at n = 2..8 satisfy the polygon inequalities, and every
intermediate identity of the necessity certificate holds.
"""
import sys
import os
import time

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.services.certify import necessity_sweep

SAMPLES = 10_000
CERTIFIED_SAMPLES = 10_000
SEED = 20240101


def test_polygon_sweep():
    print("\n🔹 Polygon inequalities on Haar-random states...")
    start = time.time()
    for n in range(2, 9):
        sweep = necessity_sweep(n, SAMPLES, SEED + n)
        print(f"   n={n}: min slack {sweep.min_slack:+.3e} (sample {sweep.worst_sample}), violations {sweep.violations}")
        assert sweep.violations == 0, f"❌ {sweep.violations} violations at n={n}"
        assert sweep.min_slack >= -1e-12, f"❌ min slack {sweep.min_slack} at n={n}"
    print(f"   ✅ PASS ({time.time() - start:.1f}s)")


def test_certificate_sweep():
    print("\n🔹 Necessity certificates on every qubit...")
    start = time.time()
    for n in range(2, 9):
        sweep = necessity_sweep(n, CERTIFIED_SAMPLES, SEED + n, certify=True)
        print(
            f"   n={n}: {sweep.certificates} certificates, {sweep.certificate_failures} failures, "
            f"max identity error {sweep.max_identity_error:.2e}"
        )
        assert sweep.certificate_failures == 0, f"❌ certificate failures at n={n}"
        assert sweep.max_identity_error <= 1e-9, f"❌ identity error {sweep.max_identity_error} at n={n}"
    print(f"   ✅ PASS ({time.time() - start:.1f}s)")


def main():
    print("=" * 70)
    print("NECESSITY SWEEP VERIFICATION")
    print("=" * 70)
    try:
        test_polygon_sweep()
        test_certificate_sweep()
    except AssertionError as e:
        print(f"\n{e}")
        print("=" * 70)
        sys.exit(1)

    print("\n" + "=" * 70)
    print("ALL TESTS PASSED ✅")
    print("=" * 70)


if __name__ == "__main__":
    main()
