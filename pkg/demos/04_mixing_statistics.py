"""Finite-time mixing statistics against exact spectral predicates.

Weak mixing asks the Cesaro averages of |mu(S^i A cap B) - mu(A)mu(B)|
to vanish.  Correlations here are computed exactly (interval overlaps
in quadratic-irrational arithmetic, cylinder splittings for shifts), so
the finite-time statistic carries no sampling error -- what remains is
the honest gap between a finite t and the limit, which is why the
verdict is a trend, never a theorem.  The spectral predicates, by
contrast, are exact.

Run:  python demos/04_mixing_statistics.py
"""

from fractions import Fraction

from ergolab import (
    BernoulliSpec,
    CylinderSet,
    SQRT2_MINUS_1,
    SystemSpec,
    TestSet,
    correlation,
    spectral_weak_mixing_check,
    spectrum_of,
    weak_mixing_statistic,
    weak_mixing_verdict,
)

GAMMA = SQRT2_MINUS_1


def main() -> None:
    rot = SystemSpec.rotation(GAMMA)
    skew = SystemSpec.skew(GAMMA)
    shift = SystemSpec.shift(BernoulliSpec.fair_coin())
    prod = SystemSpec.product(GAMMA, BernoulliSpec.fair_coin())

    half = TestSet.u_interval(0, Fraction(1, 2))
    w0 = TestSet.from_cylinder(CylinderSet(((0, 1),)))
    prod_set = TestSet.product_set(0, Fraction(1, 2), CylinderSet(((0, 1),)))

    print("=== exact correlations mu(S^i A cap A) ===")
    print("rotation, A = [0, 1/2):")
    for i in (0, 1, 2, 3, 5, 8):
        point = correlation(rot, half, half, i)
        print(f"  i={i}: {point.estimate:.9f}")
    print("shift, A = {w_0 = 1}:  lag 0 gives mu(A); all further lags factorize:")
    for i in (0, 1, 2, 10):
        print(f"  i={i}: {correlation(shift, w0, w0, i).estimate:.9f}")

    print()
    print("=== the finite-time statistic, growing t ===")
    header = f"{'t':>6s} {'rotation':>12s} {'skew':>12s} {'shift':>12s} {'product':>12s}"
    print(header)
    for t in (10, 100, 1000):
        row = [
            weak_mixing_statistic(rot, half, half, t),
            weak_mixing_statistic(skew, half, half, t),
            weak_mixing_statistic(shift, w0, w0, t),
            weak_mixing_statistic(prod, prod_set, prod_set, t),
        ]
        print(f"{t:6d} " + " ".join(f"{v:12.6f}" for v in row))
    print("the shift decays like 1/(4t); the rotation factor pins the others")
    print("near 1/8, the Cesaro average of |overlap - 1/4| on the circle.")

    print()
    print("=== verdicts vs the exact spectral predicate ===")
    cases = [(rot, half, "rotation"), (skew, half, "skew"),
             (shift, w0, "shift"), (prod, prod_set, "product")]
    for spec, ts, name in cases:
        stat = weak_mixing_statistic(spec, ts, ts, 1000)
        trend = weak_mixing_verdict(stat)
        exact = spectral_weak_mixing_check(spectrum_of(spec))
        print(f"  {name:9s} statistic {stat:.6f} -> {trend:32s} "
              f"(spectral weak mixing: {exact})")
    print()
    print("the product statistic tends to 1/32 (the rotation factor's 1/8,")
    print("scaled by the cylinder measure), which sits inside the verdict's")
    print("dead zone -- the trend is honest about where finite-time evidence")
    print("is weak, and the spectral predicate settles what it cannot.")


if __name__ == "__main__":
    main()
