"""The nine acceptance criteria, each at its stated tolerance.

A summary line per criterion is printed at the end of the run by the
``pytest_terminal_summary`` hook in conftest.py.
"""

import json
import math
import time

import mpmath
import numpy as np
import pytest

from halasz import multiplicative as mf
from halasz.cli import main
from halasz.constants import load_constants
from halasz.meanvalue import lemma1_battery, lemma1_lhs, lemma1_report, max_step
from halasz.verifier import halasz_bound, partition_primes, smooth_variant_check, summatory_for_blocks, compute_Sk

import oracles

BATTERY = mf.canonical_battery()
X_BATTERY = (1e4, 1e5, 1e6)
C = load_constants()


def _line(msg):
    print(f"\n  {msg}")


@pytest.fixture(scope="module")
def battery_reports(tables):
    """halasz_bound for the whole battery at 10^4, 10^5 and 10^6, with wall time per x."""
    reports, seconds = {}, {x: 0.0 for x in X_BATTERY}
    for spec in BATTERY:
        for x in X_BATTERY:
            t0 = time.perf_counter()
            reports[spec.name, x] = halasz_bound(spec, tables, x)
            seconds[x] += time.perf_counter() - t0
    return reports, seconds


# 1 ---------------------------------------------------------------------------


def test_criterion_1_sieve_vs_naive(small_tables):
    t0 = time.perf_counter()
    facts = [oracles.trial_factor(n) for n in range(10**4 + 1)]
    worst = 0.0
    for spec in BATTERY:
        want = np.array(oracles.naive_prefix(oracles.naive_values(spec, 10**4, facts)))
        got = mf.summatory_prefix(spec, small_tables, 10**4)[: 10**4 + 1]
        worst = max(worst, float(np.max(np.abs(got - want))))
    _line(f"max |S_sieve - S_naive| over x <= 1e4: {worst:.3g} ({time.perf_counter() - t0:.1f}s)")
    assert worst <= 1e-9


def test_criterion_1_sk_vs_triple_loop(small_tables):
    t0 = time.perf_counter()
    worst = 0.0
    primes = oracles.primes_upto(10**4)
    for spec in BATTERY:
        vals = oracles.naive_values(spec, 10**4)
        for x in (1000, 10**4):
            blocks = partition_primes(small_tables, x, lower=2)
            summ = summatory_for_blocks(spec, small_tables, x, blocks)
            for b in blocks:
                want = oracles.brute_sk(spec, vals, primes, x, b.lo, b.hi)
                got = compute_Sk(spec, small_tables, summ, x, b.k, lower=2)
                worst = max(worst, abs(got - want) / max(abs(want), 1.0))
    elapsed = time.perf_counter() - t0
    _line(f"max relative S_k error: {worst:.3g} ({elapsed:.1f}s)")
    assert worst <= 1e-8
    assert elapsed < 60


# 2 ---------------------------------------------------------------------------


def test_criterion_2_identity(tables):
    worst = 0.0
    for spec in BATTERY:
        for x in (1e2, 1e3, 1e4, 1e5):
            rec = mf.identity_check(spec, tables, x)
            worst = max(worst, rec.defect / (x * math.log(x)))
    _line(f"max identity defect / (x log x): {worst:.3g}")
    assert worst <= 1e-9


# 3 ---------------------------------------------------------------------------


def test_criterion_3_mean_value(tables):
    t0 = time.perf_counter()
    worst_ratio, worst_refine, count = 0.0, 0.0, 0
    for x in X_BATTERY:
        for T in (1.0, 5.0, 10.0):
            for fam in lemma1_battery(tables, T, x, BATTERY, range(1, 21), (0.0, 1.0)):
                rep = lemma1_report(fam, tables, T)
                assert rep.lhs <= C["C_L1"] * rep.rhs, fam.description
                fine = lemma1_lhs(fam, tables, T, max_step(x) / 2)
                worst_ratio = max(worst_ratio, rep.ratio)
                if fine > 0:
                    worst_refine = max(worst_refine, abs(rep.lhs - fine) / fine)
                count += 1
    elapsed = time.perf_counter() - t0
    _line(f"{count} families: worst lhs/rhs {worst_ratio:.4g} (C_L1 {C['C_L1']:g}), "
          f"worst refinement change {worst_refine:.3g} ({elapsed:.1f}s)")
    assert worst_refine <= 1e-4
    assert elapsed < 300


# 4 ---------------------------------------------------------------------------


def test_criterion_4_decomposition(battery_reports):
    reports, seconds = battery_reports
    worst = max(r.decomposition.normalized_defect for r in reports.values())
    _line(f"worst normalized defect {worst:.4g} (C_DEC {C['C_DEC']:g}); battery at 1e6 took {seconds[1e6]:.0f}s")
    assert worst <= C["C_DEC"]
    assert seconds[1e6] < 600


# 5 ---------------------------------------------------------------------------


def test_criterion_5_block_bounds(battery_reports):
    reports, _ = battery_reports
    chain = math.sqrt(C["C_I1"] * C["C_I2"])
    worst = {"triv": 0.0, "I1": 0.0, "I2": 0.0, "chain": 0.0}
    for r in reports.values():
        x = r.x
        for b in r.blocks:
            assert b.trivial_ratio <= C["C_TRIV"]
            worst["triv"] = max(worst["triv"], b.trivial_ratio)
            if b.k > r.cutoff_k:
                continue
            assert b.I1 <= C["C_I1"] * math.exp(b.k) / math.log(x)
            assert b.I2 <= C["C_I2"] * r.L**2 * math.exp(-b.k) * math.log(x)
            assert x * math.sqrt(b.I1 * b.I2) <= chain * x * r.L
            worst["I1"] = max(worst["I1"], b.I1_ratio)
            worst["I2"] = max(worst["I2"], b.I2_ratio)
            worst["chain"] = max(worst["chain"], b.chain_ratio)
    _line("worst ratios " + ", ".join(f"{k} {v:.4g}" for k, v in worst.items()))


# 6 ---------------------------------------------------------------------------


def test_criterion_6_theorem_envelope(battery_reports):
    reports, _ = battery_reports
    worst = max(r.theorem_ratio for r in reports.values())
    _line(f"worst theorem ratio {worst:.4g} (C_THM {C['C_THM']:g})")
    assert worst <= C["C_THM"]


def test_criterion_6_ntoialpha_main_term(tables):
    x = 10**6
    S = mf.summatory(mf.ntoialpha(2.0), tables, x)
    # exact partial sum via zeta(s) - zeta(s, N + 1) at s = -2i
    mpmath.mp.dps = 30
    oracle = complex(mpmath.zeta(-2j) - mpmath.zeta(-2j, x + 1))
    assert abs(S - oracle) <= 1e-6 * x
    main_term = complex(x ** (1 + 2j) / (1 + 2j))
    _line(f"|S - x^(1+2i)/(1+2i)| / x = {abs(S - main_term) / x:.3g}")
    assert abs(S - main_term) <= 0.05 * x


# 7 ---------------------------------------------------------------------------


def test_criterion_7_smooth_support(tables):
    x = 1e5
    spec = mf.one().restricted(x**0.5)
    sm = smooth_variant_check(spec, tables, x, 0.5)
    assert sm.S_abs == oracles.psi_sqrt(int(x), tables.primes.tolist())
    _line(f"|S| = {sm.S_abs:g}, ratio {sm.ratio:.4g} (C_SM {C['C_SM']:g})")
    assert sm.S_abs <= C["C_SM"] * x / math.log(x) * (sm.L + 1)


# 8 ---------------------------------------------------------------------------

DET_CONFIG = """x_values = [1e4, 1e5]
[smooth]
theta = 0.5
[[specs]]
kind = "one"
[[specs]]
kind = "moebius"
[[specs]]
kind = "ntoialpha"
alpha = 2.0
[[specs]]
kind = "character"
modulus = 3
index = 1
[[specs]]
kind = "random_steinhaus"
seed = 1
[[specs]]
kind = "random_rademacher"
seed = 11
"""


def test_criterion_8_determinism(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(DET_CONFIG)
    outs = []
    for threads in (1, 4):
        for rep in range(2):
            d = tmp_path / f"t{threads}_{rep}"
            assert main(["verify", "--config", str(cfg), "--out", str(d), "--threads", str(threads)]) == 0
            outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert set(outs[0]) == {"verify.json", "blocks.csv", "summary.csv"}
    assert all(o == outs[0] for o in outs[1:])
    _line("4 verify runs (threads 1 and 4, twice each) are byte-identical")


# 9 ---------------------------------------------------------------------------


def test_criterion_9_falsifiability(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text('x_values = [1e4]\nbattery = "canonical"\n')
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path / "ok")]) == 0
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps({"constants": {k: v / 10 for k, v in C.values.items()}}))
    cfg2 = tmp_path / "run2.toml"
    cfg2.write_text(f'x_values = [1e4]\nbattery = "canonical"\nconstants_file = "{tampered}"\n')
    assert main(["verify", "--config", str(cfg2), "--out", str(tmp_path / "bad")]) == 1
    doc = json.loads((tmp_path / "bad" / "verify.json").read_text())
    _line(f"shipped constants: exit 0; constants / 10: exit 1 with {len(doc['violations'])} violations")
