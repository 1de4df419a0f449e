"""The whole chain at one x, and the frozen-constant checks."""

from halasz import multiplicative as mf
from halasz.constants import load_constants, report_violations
from halasz.primes import build_tables
from halasz.verifier import halasz_bound, smooth_variant_check

tables = build_tables(10**5)
C = load_constants()
print("constants file sha256:", C.sha256[:16], "...")

for spec in (mf.one(), mf.moebius(), mf.rademacher(17)):
    r = halasz_bound(spec, tables, 1e5)
    print(f"\n{spec.name}: |S| = {r.S_abs:.6g}, L = {r.L:.4f}, bound = {r.bound:.6g}, ratio = {r.theorem_ratio:.4f}")
    print(f"  cutoff k = {r.cutoff_k}, normalized defect = {r.decomposition.normalized_defect:.4f}")
    for b in r.blocks:
        print(f"  k={b.k}: |S_k| = {abs(b.S_k):10.4g}  trivial {b.trivial_ratio:.4f}  "
              f"I1 {b.I1_ratio:.3f}  I2 {b.I2_ratio:.3f}  perron {b.perron_ratio:.4f}")
    print("  violations:", report_violations(r, C) or "none")
    print("  with constants / 10:", len(report_violations(r, C.scaled(0.1))), "violations")

# Smooth support improves the bound to (x / log x)(L + 1).
sm = smooth_variant_check(mf.one().restricted(1e5**0.5), tables, 1e5, 0.5)
print(f"\nsqrt(x)-smooth: |S| = {sm.S_abs:g}, ratio = {sm.ratio:.4f} (C_SM = {C['C_SM']})")
