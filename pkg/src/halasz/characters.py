"""Dirichlet characters for small moduli, built from explicit residue tables."""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

MAX_MODULUS = 12


def _order(a: int, q: int) -> int:
    k, y = 1, a % q
    while y != 1 % q:
        y = y * a % q
        k += 1
    return k


def _generators(q: int) -> list[tuple[int, int]]:
    units = [a for a in range(1, q) if math.gcd(a, q) == 1]
    phi = len(units)
    if phi <= 1:
        return []
    g1 = max(units, key=lambda a: (_order(a, q), -a))
    m1 = _order(g1, q)
    if m1 == phi:
        return [(g1, m1)]
    h1 = {pow(g1, i, q) for i in range(m1)}
    m2 = phi // m1
    for g2 in units:
        if _order(g2, q) == m2 and not ({pow(g2, i, q) for i in range(1, m2)} & h1):
            return [(g1, m1), (g2, m2)]
    raise ValueError(f"unit group mod {q} is not a product of two cyclic groups")


@lru_cache(maxsize=None)
def _table(modulus: int, index: int) -> tuple[complex, ...]:
    gens = _generators(modulus)
    count = math.prod(m for _, m in gens)
    if not 0 <= index < count:
        raise ValueError(f"character index must lie in [0, {count}) for modulus {modulus}")
    digits, rest = [], index
    for _, m in gens:
        digits.append(rest % m)
        rest //= m
    table = [0j] * modulus
    ranges = [range(m) for _, m in gens]
    if not gens:
        for a in range(modulus):
            if math.gcd(a, modulus) == 1:
                table[a] = 1 + 0j
        return tuple(table)
    for exps in itertools.product(*ranges):
        a = 1
        phase = 0.0
        for (g, m), e, d in zip(gens, exps, digits):
            a = a * pow(g, e, modulus) % modulus
            phase += d * e / m
        phase %= 1.0
        # exact values for the phases a real or quartic character takes
        exact = {0.0: 1, 0.5: -1, 0.25: 1j, 0.75: -1j}
        table[a] = complex(exact.get(phase, np.exp(2j * np.pi * phase)))
    return tuple(table)


def character_table(modulus: int, index: int = 0) -> np.ndarray:
    """Residue table ``chi[a]`` for a mod ``modulus``.

    Index 0 is the principal character; the remaining indices enumerate the
    characters via a fixed basis of the unit group (for moduli 3 and 4,
    index 1 is the unique non-principal character).
    """
    if not 1 <= modulus <= MAX_MODULUS:
        raise ValueError(f"modulus must lie in [1, {MAX_MODULUS}], got {modulus}")
    return np.array(_table(modulus, index), dtype=np.complex128)


def character_count(modulus: int) -> int:
    return math.prod(m for _, m in _generators(modulus)) if modulus > 2 else 1


def validate_table(values: np.ndarray, modulus: int) -> None:
    """Check that an explicit residue table defines a Dirichlet character."""
    if values.shape != (modulus,):
        raise ValueError(f"character table must have {modulus} entries")
    for a in range(modulus):
        coprime = math.gcd(a, modulus) == 1
        if coprime and abs(abs(values[a]) - 1) > 1e-12:
            raise ValueError(f"chi({a}) must have modulus 1")
        if not coprime and values[a] != 0:
            raise ValueError(f"chi({a}) must vanish since gcd({a}, {modulus}) > 1")
        for b in range(modulus):
            if abs(values[a * b % modulus] - values[a] * values[b]) > 1e-12:
                raise ValueError("character table is not multiplicative")
