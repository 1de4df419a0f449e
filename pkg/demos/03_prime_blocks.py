"""Splitting S(x) into prime blocks and checking the triple sums."""

import math

from halasz import multiplicative as mf
from halasz.primes import build_tables
from halasz.verifier import (
    block_edges,
    compute_Sk,
    decomposition_check,
    lower_cutoff,
    partition_primes,
    summatory_for_blocks,
)

tables = build_tables(10**6)
x = 1e6
print(f"P runs over primes in ({lower_cutoff(x):.0f}, {x / 2:.0f}]")
for (lo, hi), block in zip(block_edges(x), partition_primes(tables, x)):
    print(f"  k={block.k}: ({lo:10.1f}, {hi:10.1f}]  {block.primes_in_block} primes")

# S_k is evaluated exactly from S at the points floor(x/(pq)).
spec = mf.liouville()
blocks = partition_primes(tables, x)
summ = summatory_for_blocks(spec, tables, x, blocks)
for b in blocks:
    print(f"  S_{b.k} = {compute_Sk(spec, tables, summ, x, b.k).real:.6g}")

# Reassembling (1/log x) sum_k S_k recovers S(x) up to x log log x / log x.
d = decomposition_check(spec, tables, x)
print("S(x) =", d.S_direct.real, " reassembled =", d.S_reassembled.real)
print("normalized defect =", d.normalized_defect)
print("first-level mass of discarded primes:", abs(d.discarded_small), abs(d.discarded_large))

# Below about 1.9e4 the range ((log x)^4, x/2] is empty and there is nothing to split.
print("x = 1e4 admissible?", decomposition_check(spec, tables, 1e4).admissible)
print("log^4(1e4) =", math.log(1e4) ** 4)
