import json
import math

import numpy as np
import pytest

from halasz import multiplicative as mf
from halasz.errors import CapacityError, DomainError
from halasz.euler import build_euler_grid, compute_L
from halasz.meanvalue import lemma1_lhs
from halasz.verifier import (
    auxiliary_prime_sum,
    block_count,
    block_edges,
    compute_I1,
    compute_I2,
    compute_Sk,
    cutoff,
    decomposition_check,
    halasz_bound,
    i1_family,
    lower_cutoff,
    partition_primes,
    perron_majorant,
    q_limit,
    smooth_variant_check,
    summatory_for_blocks,
    theorem_bound,
    trivial_bound_check,
    write_block_csv,
    write_report_json,
)

import oracles

SK_SPECS = [mf.one(), mf.moebius(), mf.ntoialpha(1.0), mf.character(3, 1), mf.steinhaus(2), mf.rademacher(13)]


def test_block_count():
    for x in (1e4, 1e5, 1e6, 1e8):
        K = block_count(x)
        assert x ** (1 - math.exp(-K)) >= x / 2 > x ** (1 - math.exp(-(K - 1)))
    assert block_count(1e6) == 3


def test_partition_property(tables):
    x = 1e5
    blocks = partition_primes(tables, x)
    seen = np.concatenate([b.primes for b in blocks])
    P = [p for p in tables.primes if lower_cutoff(x) < p <= x / 2]
    assert sorted(seen.tolist()) == P
    assert len(set(seen.tolist())) == len(P)
    for b in blocks:
        assert np.all((b.primes > b.lo) & (b.primes <= b.hi))
    assert [b.primes_in_block for b in blocks] == [0, 349, 2766]


def test_block_edges_chain():
    edges = block_edges(1e6)
    assert edges[-1][1] == 5e5
    for (lo1, hi1), (lo2, hi2) in zip(edges, edges[1:]):
        assert hi1 == lo2 or lo2 == lower_cutoff(1e6)


def test_domain_errors(small_tables, tables):
    with pytest.raises(DomainError):
        partition_primes(small_tables, 1e4)
    with pytest.raises(DomainError):
        partition_primes(small_tables, 10)
    with pytest.raises(DomainError):
        halasz_bound(mf.one(), small_tables, 50)
    with pytest.raises(CapacityError):
        partition_primes(small_tables, 1e5)


def test_degenerate_decomposition(small_tables):
    d = decomposition_check(mf.one(), small_tables, 1e4)
    assert not d.admissible
    assert d.S_reassembled == 0 and d.S_direct == 1e4


@pytest.mark.parametrize("spec", SK_SPECS, ids=lambda s: s.name)
@pytest.mark.parametrize("x", [500, 3000])
def test_compute_Sk_brute_force_low_cutoff(spec, x, small_tables):
    vals = oracles.naive_values(spec, x)
    primes = oracles.primes_upto(x)
    blocks = partition_primes(small_tables, x, lower=2)
    summ = summatory_for_blocks(spec, small_tables, x, blocks)
    for b in blocks:
        want = oracles.brute_sk(spec, vals, primes, x, b.lo, b.hi)
        got = compute_Sk(spec, small_tables, summ, x, b.k, lower=2)
        assert abs(got - want) <= 1e-8 * max(abs(want), 1.0)


@pytest.mark.parametrize("spec", SK_SPECS[:3], ids=lambda s: s.name)
def test_compute_Sk_brute_force_default_cutoff(spec, tables):
    x = 3e4
    vals = oracles.naive_values(spec, int(x))
    primes = oracles.primes_upto(int(x))
    blocks = partition_primes(tables, x)
    summ = summatory_for_blocks(spec, tables, x, blocks)
    assert sum(b.primes_in_block for b in blocks) > 0
    for b in blocks:
        want = oracles.brute_sk(spec, vals, primes, x, b.lo, b.hi)
        assert abs(compute_Sk(spec, tables, summ, x, b.k) - want) <= 1e-8 * max(abs(want), 1.0)


def test_auxiliary_sum(tables):
    x = 1e6
    want = math.fsum(math.log(p) / (p * math.log(x / p)) for p in tables.primes if lower_cutoff(x) < p <= x / 2)
    assert auxiliary_prime_sum(tables, x) == pytest.approx(want, rel=1e-14)


@pytest.fixture(scope="module")
def report_1e5(tables):
    return halasz_bound(mf.moebius(), tables, 1e5)


def test_report_fields(report_1e5):
    r = report_1e5
    assert r.bound == pytest.approx(theorem_bound(1e5, r.L))
    assert r.cutoff_k == cutoff(1e5, r.L)
    assert r.S_abs == abs(r.S) and r.theorem_ratio == r.S_abs / r.bound
    assert [b.k for b in r.blocks] == [1, 2, 3]
    for b in r.blocks:
        assert trivial_bound_check(b, 1e5) == pytest.approx(b.trivial_ratio)
        assert b.cs_integral <= math.sqrt(b.I1 * b.I2) * (1 + 1e-12)
        assert b.I2 <= 2 * b.I2_windowed
        assert math.fsum(b.window_terms.values()) == pytest.approx(b.I2_windowed)
        assert b.chain_ratio == pytest.approx(math.sqrt(b.I1 * b.I2) / r.L)


def test_standalone_block_functions(tables, report_1e5):
    spec, x = mf.moebius(), 1e5
    grid = build_euler_grid(spec, tables, x)
    lx = compute_L(grid)
    b = report_1e5.blocks[2]
    assert compute_I1(spec, tables, grid, x, 3) == pytest.approx(b.I1, rel=1e-12)
    i2 = compute_I2(spec, tables, grid, lx, x, 3)
    assert i2.I2 == pytest.approx(b.I2, rel=1e-12) and i2.windowed == pytest.approx(b.I2_windowed, rel=1e-12)
    assert perron_majorant(spec, tables, grid, x, 3) == pytest.approx(b.perron_majorant, rel=1e-12)


def test_I1_is_a_lemma1_integral(tables, report_1e5):
    x = 1e5
    b = report_1e5.blocks[1]
    fam = i1_family(mf.moebius(), tables, x, 2)
    T = math.log(x) ** 2
    assert lemma1_lhs(fam, tables, T) == pytest.approx(b.I1, rel=1e-4)
    # closed form of the same integral, pair by pair
    c = fam.a * np.log(fam.support) / fam.support
    logs = np.log(fam.support.astype(float))
    d = logs[:, None] - logs[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        kern = np.where(d == 0, 2 * T, 2 * np.sin(T * d) / d)
    exact = float(np.real(c @ kern @ np.conj(c)))
    assert b.I1 == pytest.approx(exact, rel=1e-4)


def test_q_range(tables):
    assert q_limit(1e6, 1) == 1e6
    assert q_limit(1e6, 2) == pytest.approx(1e6 ** math.exp(-1))


def test_report_determinism_across_threads(tables):
    a = halasz_bound(mf.steinhaus(3), tables, 1e5, threads=1)
    b = halasz_bound(mf.steinhaus(3), tables, 1e5, threads=4)
    assert json.dumps(a.to_dict(True)) == json.dumps(b.to_dict(True))


def test_smooth_variant(tables):
    x = 1e5
    spec = mf.one().restricted(x**0.5)
    sm = smooth_variant_check(spec, tables, x, 0.5)
    assert sm.S_abs == oracles.psi_sqrt(int(x), tables.primes.tolist())
    assert sm.smooth_bound == pytest.approx(x / math.log(x) * (sm.L + 1))
    with pytest.raises(DomainError):
        smooth_variant_check(mf.one(), tables, x, 0.5)


def test_writers(tmp_path, report_1e5):
    write_report_json(tmp_path / "r.json", [report_1e5], {"h": "1"})
    doc = json.loads((tmp_path / "r.json").read_text())
    assert doc["reports"][0]["blocks"][1]["primes_in_block"] == 349
    write_block_csv(tmp_path / "b.csv", [report_1e5], {"h": "1"})
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0] == "# h: 1" and len(lines) == 2 + 3
