"""Multiplicative functions in the unit disc and their summatory functions.

A :class:`MultiplicativeSpec` pins down f through its values on prime
powers. Values on all of ``[1, N]`` are produced by peeling off the
smallest-prime-factor power of every n in vectorized passes over the sieve.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from . import splitmix
from .characters import character_table, validate_table
from .errors import CapacityError, ConfigError, UnitDiscError
from .primes import PrimeTables, factorize, prime_power_split

KINDS = (
    "one",
    "moebius",
    "liouville",
    "ntoialpha",
    "character",
    "random_steinhaus",
    "random_rademacher",
    "table",
)
RULES = ("completely_multiplicative", "prescribed")
UNIT_TOL = 1e-12
DEFAULT_CHUNK = 1 << 16

# kinds whose intrinsic prime-power values differ from f(p)**k
_PRESCRIBED_BY_DEFAULT = {"moebius", "table"}


@dataclass(frozen=True)
class MultiplicativeSpec:
    """Declarative definition of f on prime powers.

    ``values`` is only used by ``table`` (a tuple of ``(prime_power, value)``
    pairs; missing prime powers evaluate to 0) and optionally by
    ``character`` (an explicit residue table of length ``modulus``).
    ``smooth_bound`` forces f(p^k) = 0 for every prime p > smooth_bound.
    """

    kind: str
    alpha: float = 0.0
    modulus: int = 1
    index: int = 0
    seed: int = 0
    values: tuple = ()
    extension_rule: str | None = None
    smooth_bound: float | None = None
    _char: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)
    _lookup: dict | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.extension_rule is not None and self.extension_rule not in RULES:
            raise ConfigError(f"unknown extension_rule {self.extension_rule!r}")
        if self.extension_rule is None:
            object.__setattr__(self, "extension_rule", self.default_rule)
        if self.kind == "character":
            if self.values:
                chi = np.array([complex(v) for v in self.values], dtype=np.complex128)
                try:
                    validate_table(chi, self.modulus)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
            else:
                try:
                    chi = character_table(self.modulus, self.index)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
            object.__setattr__(self, "_char", chi)
        if self.kind == "table":
            lookup = {}
            for key, val in self.values:
                val = complex(val)
                if abs(val) > 1 + UNIT_TOL:
                    raise UnitDiscError(f"f({key}) = {val} lies outside the unit disc")
                lookup[int(key)] = val
            object.__setattr__(self, "_lookup", lookup)

    @property
    def default_rule(self) -> str:
        return "prescribed" if self.kind in _PRESCRIBED_BY_DEFAULT else "completely_multiplicative"

    @property
    def rule(self) -> str:
        return self.extension_rule

    @property
    def is_real(self) -> bool:
        """True when every value of f is real."""
        if self.kind in ("one", "moebius", "liouville", "random_rademacher"):
            return True
        if self.kind == "ntoialpha":
            return self.alpha == 0.0
        if self.kind == "character":
            return bool(np.all(self._char.imag == 0))
        return all(complex(v).imag == 0 for _, v in self.values)

    @property
    def name(self) -> str:
        if self.kind == "ntoialpha":
            base = f"ntoialpha({self.alpha:g})"
        elif self.kind == "character":
            base = f"character({self.modulus},{self.index})"
        elif self.kind.startswith("random_"):
            base = f"{self.kind[7:]}({self.seed})"
        else:
            base = self.kind
        if self.extension_rule != self.default_rule:
            base += f"[{self.extension_rule}]"
        if self.smooth_bound is not None:
            base += f"|smooth<={self.smooth_bound:g}"
        return base

    def restricted(self, bound: float) -> "MultiplicativeSpec":
        """The same function supported on ``bound``-smooth integers."""
        return replace(self, smooth_bound=float(bound))

    def with_seed(self, seed: int) -> "MultiplicativeSpec":
        return replace(self, seed=int(seed)) if self.kind.startswith("random_") else self

    # -- prime-power values -------------------------------------------------

    def _prime_values(self, p: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "one":
            return np.ones(p.shape, dtype=np.complex128)
        if kind in ("moebius", "liouville"):
            return -np.ones(p.shape, dtype=np.complex128)
        if kind == "ntoialpha":
            return np.exp(1j * self.alpha * np.log(p.astype(np.float64)))
        if kind == "character":
            return self._char[p % self.modulus]
        if kind == "random_steinhaus":
            return np.exp(2j * np.pi * splitmix.uniform(self.seed, p))
        if kind == "random_rademacher":
            return np.where(splitmix.uniform(self.seed, p) < 0.5, 1.0, -1.0).astype(np.complex128)
        return self._table_values(p)

    def _table_values(self, pk: np.ndarray) -> np.ndarray:
        lookup = self._lookup
        flat = pk.ravel()
        out = np.fromiter((lookup.get(int(v), 0j) for v in flat), dtype=np.complex128, count=flat.size)
        return out.reshape(pk.shape)

    def _prescribed_values(self, p: np.ndarray, k: np.ndarray) -> np.ndarray:
        kind = self.kind
        if kind == "moebius":
            return np.where(k == 1, -1.0, 0.0).astype(np.complex128)
        if kind == "liouville":
            return np.where(k % 2 == 1, -1.0, 1.0).astype(np.complex128)
        with np.errstate(over="ignore"):
            pk = p.astype(np.uint64) ** k.astype(np.uint64)
        if kind == "table":
            return self._table_values(pk.astype(np.int64))
        if kind == "random_steinhaus":
            return np.exp(2j * np.pi * splitmix.uniform(self.seed, pk))
        if kind == "random_rademacher":
            return np.where(splitmix.uniform(self.seed, pk) < 0.5, 1.0, -1.0).astype(np.complex128)
        return self._prime_values(p) ** k

    def prime_power_values(self, p, k) -> np.ndarray:
        """f(p**k) for arrays of primes ``p`` and exponents ``k >= 1``.

        Raises:
            UnitDiscError: if any value has modulus above 1 + 1e-12.
        """
        p = np.asarray(p, dtype=np.int64)
        k = np.broadcast_to(np.asarray(k, dtype=np.int64), p.shape)
        if self.rule == "prescribed":
            vals = self._prescribed_values(p, k)
        else:
            base = self._prime_values(p)
            vals = base if np.all(k == 1) else base**k
        if self.smooth_bound is not None:
            vals = np.where(p > self.smooth_bound, 0j, vals)
        if vals.size and np.max(np.abs(vals)) > 1 + UNIT_TOL:
            bad = int(np.argmax(np.abs(vals).ravel()))
            raise UnitDiscError(
                f"{self.name}: f({p.ravel()[bad]}^{k.ravel()[bad]}) has modulus "
                f"{abs(vals.ravel()[bad])!r} > 1"
            )
        return np.asarray(vals, dtype=np.complex128)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        if self.kind == "ntoialpha":
            d["alpha"] = self.alpha
        if self.kind == "character":
            d["modulus"] = self.modulus
            d["index"] = self.index
        if self.kind.startswith("random_"):
            d["seed"] = self.seed
        if self.values:
            if self.kind == "table":
                d["values"] = {str(k): _encode_complex(v) for k, v in self.values}
            else:
                d["values"] = [_encode_complex(v) for v in self.values]
        d["extension_rule"] = self.rule
        if self.smooth_bound is not None:
            d["smooth_bound"] = self.smooth_bound
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "MultiplicativeSpec":
        """Build a spec from a config mapping (see README for the schema)."""
        d = dict(d)
        known = {"kind", "alpha", "modulus", "index", "seed", "values", "extension_rule", "smooth_bound"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown spec keys: {sorted(extra)}")
        if "kind" not in d:
            raise ConfigError("spec needs a 'kind'")
        values = d.get("values", ())
        if isinstance(values, Mapping):
            values = tuple(sorted((int(k), _decode_complex(v)) for k, v in values.items()))
        else:
            values = tuple(_decode_complex(v) for v in values)
        try:
            return cls(
                kind=d["kind"],
                alpha=float(d.get("alpha", 0.0)),
                modulus=int(d.get("modulus", 1)),
                index=int(d.get("index", 0)),
                seed=int(d.get("seed", 0)),
                values=values,
                extension_rule=d.get("extension_rule"),
                smooth_bound=None if d.get("smooth_bound") is None else float(d["smooth_bound"]),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, (ConfigError, UnitDiscError)):
                raise
            raise ConfigError(f"bad spec {d!r}: {exc}") from exc


def _encode_complex(v: complex):
    v = complex(v)
    return v.real if v.imag == 0 else [v.real, v.imag]


def _decode_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ConfigError(f"complex values are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


def one() -> MultiplicativeSpec:
    return MultiplicativeSpec("one")


def moebius() -> MultiplicativeSpec:
    return MultiplicativeSpec("moebius")


def liouville() -> MultiplicativeSpec:
    return MultiplicativeSpec("liouville")


def ntoialpha(alpha: float) -> MultiplicativeSpec:
    return MultiplicativeSpec("ntoialpha", alpha=float(alpha))


def character(modulus: int, index: int = 1) -> MultiplicativeSpec:
    return MultiplicativeSpec("character", modulus=modulus, index=index)


def steinhaus(seed: int) -> MultiplicativeSpec:
    return MultiplicativeSpec("random_steinhaus", seed=seed)


def rademacher(seed: int) -> MultiplicativeSpec:
    return MultiplicativeSpec("random_rademacher", seed=seed)


def table(values: Mapping[int, complex], extension_rule: str = "prescribed") -> MultiplicativeSpec:
    return MultiplicativeSpec(
        "table", values=tuple(sorted((int(k), complex(v)) for k, v in values.items())),
        extension_rule=extension_rule,
    )


def zero_on_primes() -> MultiplicativeSpec:
    """f(1) = 1 and f(p^k) = 0 for every prime power."""
    return MultiplicativeSpec("table", values=(), extension_rule="prescribed")


def canonical_battery() -> list[MultiplicativeSpec]:
    """The fixed list of test functions used to measure implied constants."""
    specs = [one(), moebius(), liouville()]
    specs += [ntoialpha(a) for a in (1.0, -1.0, 2.0, -2.0)]
    specs += [character(3, 1), character(4, 1)]
    specs += [steinhaus(s) for s in range(1, 11)]
    specs += [rademacher(s) for s in range(11, 21)]
    return specs


# -- evaluation over ranges ---------------------------------------------------


def evaluate(spec: MultiplicativeSpec, tables: PrimeTables, n: int) -> complex:
    """f(n) as the product of f(p^e) over the factorization of n."""
    n = int(n)
    if n > tables.limit:
        raise CapacityError(f"n = {n} exceeds sieve limit {tables.limit}")
    out = 1 + 0j
    for p, e in factorize(tables, n):
        out *= complex(spec.prime_power_values(np.array([p]), np.array([e]))[0])
    return out


def evaluate_range(spec: MultiplicativeSpec, tables: PrimeTables, n_max: int) -> np.ndarray:
    """Array ``f`` with ``f[n]`` = f(n) for 1 <= n <= n_max and ``f[0]`` = 0."""
    n_max = int(n_max)
    if n_max > tables.limit:
        raise CapacityError(f"n = {n_max} exceeds sieve limit {tables.limit}")
    out = np.zeros(n_max + 1, dtype=np.complex128)
    if n_max >= 1:
        out[1] = 1.0
    if n_max < 2:
        return out
    vals = np.ones(n_max - 1, dtype=np.complex128)
    cur = np.arange(2, n_max + 1, dtype=np.int64)
    live = np.arange(n_max - 1)
    while live.size:
        p, k, rest = prime_power_split(tables, cur[live])
        vals[live] *= spec.prime_power_values(p, k)
        cur[live] = rest
        live = live[rest > 1]
    out[2:] = vals
    return out


def prefix_sums(values: np.ndarray, chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> np.ndarray:
    """Running sums of ``values`` with a fixed, thread-count-independent order.

    Each chunk is summed left to right on its own; chunk offsets are then
    accumulated in index order. The result depends on ``chunk_size`` but
    never on ``threads``.
    """
    n = values.shape[0]
    starts = list(range(0, n, chunk_size))
    out = np.empty_like(values)

    def local(s: int) -> None:
        np.cumsum(values[s : s + chunk_size], out=out[s : s + chunk_size])

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(local, starts))
    else:
        for s in starts:
            local(s)
    for s in starts[1:]:
        out[s : s + chunk_size] += out[s - 1]
    return out


class _ValueCache:
    """Small LRU of f-values and prefix sums keyed by (tables, spec)."""

    def __init__(self, size: int = 6):
        self.size = size
        self.lock = threading.Lock()
        self.entries: OrderedDict = OrderedDict()

    def get(self, spec, tables, n_max, chunk_size=None, threads=1):
        key = (id(tables), spec)
        with self.lock:
            entry = self.entries.get(key)
            if entry is not None and entry["tables"] is tables and entry["f"].shape[0] > n_max:
                self.entries.move_to_end(key)
            else:
                entry = None
        if entry is None:
            entry = {"tables": tables, "f": evaluate_range(spec, tables, n_max), "S": {}}
            with self.lock:
                self.entries[key] = entry
                while len(self.entries) > self.size:
                    self.entries.popitem(last=False)
        if chunk_size is None:
            return entry["f"]
        S = entry["S"].get(chunk_size)
        if S is None:
            S = prefix_sums(entry["f"], chunk_size, threads)
            entry["S"][chunk_size] = S
        return S

    def clear(self) -> None:
        with self.lock:
            self.entries.clear()


_CACHE = _ValueCache()


def values_upto(spec: MultiplicativeSpec, tables: PrimeTables, n_max: int) -> np.ndarray:
    """Cached f-values covering at least ``[0, n_max]``."""
    if n_max > tables.limit:
        raise CapacityError(f"x = {n_max} exceeds sieve limit {tables.limit}")
    return _CACHE.get(spec, tables, n_max)


def summatory_prefix(spec, tables, n_max: int, chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> np.ndarray:
    """Cached array ``S`` with ``S[n]`` = sum of f(m) for m <= n, covering [0, n_max]."""
    if n_max > tables.limit:
        raise CapacityError(f"x = {n_max} exceeds sieve limit {tables.limit}")
    return _CACHE.get(spec, tables, n_max, chunk_size, threads)


def _floor(x: float) -> int:
    return int(math.floor(x))


def summatory(spec, tables, x: float, chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> complex:
    """S(x), the sum of f(n) over n <= x."""
    n = _floor(x)
    if n > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    if n < 1:
        return 0j
    return complex(summatory_prefix(spec, tables, n, chunk_size, threads)[n])


@dataclass(frozen=True, eq=False)
class SummatoryTable:
    """S evaluated at ascending checkpoints; S(y) depends only on floor(y)."""

    x: float
    checkpoints: np.ndarray
    values: np.ndarray

    def lookup(self, y) -> np.ndarray:
        """Values at points ``y``, each of which must floor to a checkpoint floor."""
        keys = np.floor(self.checkpoints).astype(np.int64)
        y = np.floor(np.asarray(y, dtype=np.float64)).astype(np.int64)
        pos = np.searchsorted(keys, y)
        pos = np.minimum(pos, max(keys.size - 1, 0))
        if keys.size == 0 or np.any(keys[pos] != y):
            raise KeyError("query point is not among the table checkpoints")
        return self.values[pos]


def summatory_table(spec, tables, checkpoints, chunk_size: int = DEFAULT_CHUNK, threads: int = 1) -> SummatoryTable:
    """S at every checkpoint from a single sieve pass."""
    cps = np.asarray(checkpoints, dtype=np.float64)
    if cps.size and np.any(np.diff(cps) < 0):
        raise ValueError("checkpoints must be ascending")
    if cps.size == 0:
        return SummatoryTable(0.0, cps, np.zeros(0, dtype=np.complex128))
    top = _floor(cps[-1])
    if top > tables.limit:
        raise CapacityError(f"checkpoint {cps[-1]} exceeds sieve limit {tables.limit}")
    S = summatory_prefix(spec, tables, max(top, 1), chunk_size, threads)
    idx = np.maximum(np.floor(cps).astype(np.int64), 0)
    return SummatoryTable(float(cps[-1]), cps, S[idx].copy())


def log_weighted_sum(spec, tables, x: float) -> complex:
    """Sum of f(n) log n over n <= x."""
    n = _floor(x)
    if n > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    if n < 2:
        return 0j
    f = values_upto(spec, tables, n)[1 : n + 1]
    return complex(np.sum(f * np.log(np.arange(1, n + 1, dtype=np.float64))))


def log_ratio_sum(x: float) -> float:
    """Sum of log(x/n) over n <= x, equal to floor(x) log x - log(floor(x)!)."""
    n = _floor(x)
    return n * math.log(x) - math.lgamma(n + 1)


@dataclass(frozen=True)
class IdentityCheck:
    lhs: complex
    rhs: complex
    defect: float


def identity_check(spec, tables, x: float) -> IdentityCheck:
    """Compare S(x) log x with the split sum of f(n)(log n + log(x/n))."""
    if x < 2:
        raise ValueError("identity_check needs x >= 2")
    n = _floor(x)
    if n > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    f = values_upto(spec, tables, n)[1 : n + 1]
    logs = np.log(np.arange(1, n + 1, dtype=np.float64))
    lhs = complex(np.sum(f)) * math.log(x)
    rhs = complex(np.sum(f * logs)) + complex(np.sum(f * (math.log(x) - logs)))
    return IdentityCheck(lhs, rhs, abs(lhs - rhs))

