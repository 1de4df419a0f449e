"""Sieving primes and summing multiplicative functions.

Run with ``python demos/01_sieve_and_partial_sums.py``.
"""

import math

from halasz import multiplicative as mf
from halasz.primes import build_tables, factorize, von_mangoldt

# One sieve pass gives the primes, the smallest-prime-factor table and Lambda(n).
tables = build_tables(10**6)
print("primes up to 10^6:", tables.primes.size)
print("factorize(360) =", factorize(tables, 360))
print("Lambda(8) = log 2:", von_mangoldt(tables, 8), math.log(2))

# A MultiplicativeSpec fixes f on prime powers; everything else follows.
for spec in (mf.one(), mf.moebius(), mf.liouville(), mf.character(4, 1), mf.steinhaus(1)):
    S = mf.summatory(spec, tables, 10**6)
    print(f"{spec.name:>16s}: S(10^6) = {S.real:.6g}{S.imag:+.6g}i")

# The Mertens function at 10^6 is 212.
print("M(10^6) =", mf.summatory(mf.moebius(), tables, 10**6).real)

# S(x) log x splits into sum f(n) log n plus sum f(n) log(x/n), up to rounding.
rec = mf.identity_check(mf.moebius(), tables, 10**5)
print("identity defect at 1e5:", rec.defect)

# A summatory table answers S at many points from one sieve pass; lookups floor their argument.
table = mf.summatory_table(mf.moebius(), tables, [10, 100, 1000, 10**4])
print("M at 10, 100, 1000, 10^4:", table.lookup([10.5, 100, 1000, 10**4]).real)
