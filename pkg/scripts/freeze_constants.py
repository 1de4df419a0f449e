"""Measure every implied constant over the canonical battery and freeze it.

    python scripts/freeze_constants.py [--margin 1.5] [--out src/halasz/data/constants.json]

Each frozen value is the largest ratio seen in the sweep times ``margin``,
rounded up to two significant figures. The margin must stay well below 10
so that dividing the constants by 10 still trips the checks.
"""

import argparse
import json
import math
import platform
import time
from pathlib import Path

import numpy as np

import halasz
from halasz.constants import NAMES, freeze
from halasz.meanvalue import lemma1_battery, lemma1_report
from halasz.multiplicative import canonical_battery, log_ratio_sum
from halasz.primes import build_tables
from halasz.verifier import auxiliary_prime_sum, halasz_bound, smooth_variant_check

X_VALUES = (1e4, 1e5, 1e6)
T_VALUES = (1.0, 5.0, 10.0)
SEEDS = tuple(range(1, 21))
H_VALUES = (0.0, 1.0)
THETAS = (0.5, 0.75)


class Maxima:
    """Running maximum per constant, remembering where it was attained."""

    def __init__(self):
        self.value = {n: 0.0 for n in NAMES}
        self.where = {n: "" for n in NAMES}
        self.count = {n: 0 for n in NAMES}

    def add(self, name, ratio, where):
        self.count[name] += 1
        if ratio > self.value[name]:
            self.value[name] = float(ratio)
            self.where[name] = where


def sweep(xs, log=print):
    tables = build_tables(int(max(xs)))
    battery = canonical_battery()
    m = Maxima()

    for x in xs:
        m.add("C_LOGSUM", log_ratio_sum(x) / x, f"x={x:g}")
        m.add("C_AUX", auxiliary_prime_sum(tables, x) / math.log(math.log(x)), f"x={x:g}")

    for spec in battery:
        for x in xs:
            t0 = time.perf_counter()
            r = halasz_bound(spec, tables, x)
            tag = f"{spec.name} x={x:g}"
            m.add("C_THM", r.theorem_ratio, tag)
            m.add("C_DEC", r.decomposition.normalized_defect, tag)
            m.add("C_L", r.L / math.log(x), tag)
            for b in r.blocks:
                btag = f"{tag} k={b.k}"
                m.add("C_TRIV", b.trivial_ratio, btag)
                m.add("C_PER", b.perron_ratio, btag)
                if b.k <= r.cutoff_k:
                    m.add("C_I1", b.I1_ratio, btag)
                    m.add("C_I2", b.I2_ratio, btag)
                    m.add("C_32", b.eq32_ratio, btag)
            for theta in THETAS:
                sm = smooth_variant_check(spec.restricted(x**theta), tables, x, theta)
                m.add("C_SM", sm.ratio, f"{tag} theta={theta:g}")
            log(f"{tag}: ratio {r.theorem_ratio:.4g}, L {r.L:.4g} ({time.perf_counter() - t0:.1f}s)")

    for x in xs:
        for T in T_VALUES:
            for fam in lemma1_battery(tables, T, x, battery, SEEDS, H_VALUES):
                rep = lemma1_report(fam, tables, T)
                m.add("C_L1", rep.ratio, f"{fam.description} T={T:g} x={x:g}")
        log(f"mean-value battery at x={x:g} done")
    return m, battery


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--margin", type=float, default=1.5)
    ap.add_argument("--out", default=str(Path(halasz.__file__).with_name("data") / "constants.json"))
    args = ap.parse_args()
    if not 1 < args.margin < 10:
        ap.error("margin must lie in (1, 10)")

    m, battery = sweep(X_VALUES)
    frozen = {n: freeze(m.value[n], args.margin) for n in NAMES}
    doc = {
        "constants": frozen,
        "provenance": {
            "battery": [s.name for s in battery],
            "x_values": list(X_VALUES),
            "mean_value": {"T_values": list(T_VALUES), "seeds": list(SEEDS), "h_values": list(H_VALUES),
                       "families": ["single", "ones", "steinhaus", "twisted"]},
            "smooth_thetas": list(THETAS),
            "margin": args.margin,
            "rule": "measured maximum * margin, rounded up to 2 significant figures",
            "measured": m.value,
            "attained_at": m.where,
            "samples": m.count,
            "package_version": halasz.__version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    for n in NAMES:
        print(f"{n:9s} measured {m.value[n]:.6g} at {m.where[n]}  ->  {frozen[n]:.6g}")


if __name__ == "__main__":
    main()
