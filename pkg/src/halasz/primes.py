"""Smallest-prime-factor sieve, prime lists and von Mangoldt values.

All tables are built once with numpy and frozen (read-only arrays), so a
single :class:`PrimeTables` can be shared between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError

DEFAULT_LIMIT = 10**7
MAX_LIMIT = 10**8


@dataclass(frozen=True, eq=False)
class PrimeTables:
    """Sieve output up to ``limit``.

    Attributes:
        limit: Largest integer covered.
        primes: Ascending int64 array of every prime <= limit.
        spf: int32 array, ``spf[n]`` is the smallest prime factor of n for
            2 <= n <= limit (entries 0 and 1 are 0).
        lam: float64 array, ``lam[n]`` is Lambda(n).
    """

    limit: int
    primes: np.ndarray
    spf: np.ndarray
    lam: np.ndarray

    def primes_in(self, lo: float, hi: float, lo_inclusive: bool = False) -> np.ndarray:
        """Primes p with lo < p <= hi (or lo <= p <= hi)."""
        side = "left" if lo_inclusive else "right"
        i = np.searchsorted(self.primes, lo, side=side)
        j = np.searchsorted(self.primes, hi, side="right")
        return self.primes[i:j]

    def prime_count(self, y: float) -> int:
        return int(np.searchsorted(self.primes, y, side="right"))

    def _check(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        if n > self.limit:
            raise CapacityError(f"n = {n} exceeds sieve limit {self.limit}")


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p]:
            continue
        seg = spf[p * p :: p]
        seg[seg == 0] = p
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


def build_tables(limit: int, max_limit: int = MAX_LIMIT) -> PrimeTables:
    """Sieve up to ``limit`` and return frozen tables.

    Raises:
        CapacityError: if ``limit`` is outside ``[2, max_limit]``.
    """
    limit = int(limit)
    if limit < 2 or limit > max_limit:
        raise CapacityError(f"sieve limit must lie in [2, {max_limit}], got {limit}")
    spf = _spf_sieve(limit)
    idx = np.arange(limit + 1)
    primes = idx[(spf == idx) & (idx >= 2)].astype(np.int64)

    lam = np.zeros(limit + 1, dtype=np.float64)
    logs = np.log(primes.astype(np.float64))
    lam[primes] = logs
    for p, lp in zip(primes[: np.searchsorted(primes, math.isqrt(limit), side="right")], logs):
        pk = int(p) * int(p)
        while pk <= limit:
            lam[pk] = lp
            pk *= int(p)

    for arr in (primes, spf, lam):
        arr.flags.writeable = False
    return PrimeTables(limit=limit, primes=primes, spf=spf, lam=lam)


def von_mangoldt(tables: PrimeTables, n: int) -> float:
    """Lambda(n): log p if n is a power of the prime p, else 0."""
    tables._check(n)
    return float(tables.lam[n])


def factorize(tables: PrimeTables, n: int) -> list[tuple[int, int]]:
    """Prime factorization of n as ascending ``(prime, exponent)`` pairs."""
    tables._check(n)
    out: list[tuple[int, int]] = []
    spf = tables.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def prime_power_split(tables: PrimeTables, n: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split each n >= 2 as ``p**k * rest`` with p = spf(n) and p not dividing rest.

    Returns:
        (p, k, rest) as int64 arrays.
    """
    p = tables.spf[n].astype(np.int64)
    k = np.ones_like(p)
    rest = n // p
    sel = np.flatnonzero(rest % p == 0)
    while sel.size:
        k[sel] += 1
        rest[sel] //= p[sel]
        sel = sel[rest[sel] % p[sel] == 0]
    return p, k, rest
