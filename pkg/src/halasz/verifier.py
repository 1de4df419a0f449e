"""Prime-block decomposition of S(x) and the analytic bounds on each block.

The primes p in P = ((log x)^4, x/2] are cut into blocks

    P_k = P  intersected with  (x^(1 - e^(1-k)), x^(1 - e^(-k))],

and for each block the triple convolution

    S_k(x) = sum_{pqn <= x, p in P_k} f(p) log p / log(x/p) * f(q) log q * f(n)

is computed exactly as a sum over (p, q) of weights times S(x/(pq)). The
analytic side samples the polynomials

    P_k(s) = sum_{p in P_k} f(p) log p / (p^s log(x/p)),
    Q_k(s) = sum_{q <= x^(e^(1-k))} f(q) log q / q^s

on the Euler-product grid and integrates over |t| <= log^2 x.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .dirichlet import fsum_complex, grid_sum, interval_weights
from .errors import CapacityError, CoverageError, DomainError
from .euler import EulerGrid, LxResult, build_euler_grid, compute_L
from .meanvalue import CoefficientFamily
from .multiplicative import DEFAULT_CHUNK, MultiplicativeSpec, SummatoryTable, summatory_prefix, summatory_table
from .primes import PrimeTables
from .reporting import write_csv, write_json

MIN_X = 100.0


def lower_cutoff(x: float) -> float:
    return math.log(x) ** 4


def decomposition_admissible(x: float, lower: float | None = None) -> bool:
    """Whether the prime range ((log x)^4, x/2] is nonempty as an interval."""
    lower = lower_cutoff(x) if lower is None else lower
    return x >= 16 and lower < x / 2


def block_count(x: float) -> int:
    """Smallest k with x^(1 - e^(-k)) >= x/2, i.e. ceil(log(log x / log 2))."""
    return max(1, int(math.ceil(math.log(math.log(x) / math.log(2)) - 1e-12)))


@dataclass(frozen=True, eq=False)
class PrimeBlock:
    """Primes p with lo < p <= hi."""

    k: int
    lo: float
    hi: float
    primes: np.ndarray = field(repr=False)

    @property
    def primes_in_block(self) -> int:
        return int(self.primes.size)


def block_edges(x: float, lower: float | None = None) -> list[tuple[float, float]]:
    """(lo, hi) for k = 1 .. block_count(x); consecutive blocks share an edge."""
    lower = lower_cutoff(x) if lower is None else lower
    K = block_count(x)
    raw = [x ** (1 - math.exp(-k)) for k in range(0, K + 1)]
    raw[0] = 1.0
    return [(max(lower, raw[k - 1]), min(x / 2, raw[k])) for k in range(1, K + 1)]


def partition_primes(tables: PrimeTables, x: float, lower: float | None = None) -> list[PrimeBlock]:
    """Split the primes of ((log x)^4, x/2] into the blocks P_k.

    ``lower`` replaces the (log x)^4 cutoff; it exists so the exact triple sums
    can be cross-checked at sizes where the default range is empty.

    Raises:
        DomainError: if x < 16 or the lower cutoff is not below x/2.
    """
    if x < 16:
        raise DomainError(f"x = {x} is below 16")
    if not decomposition_admissible(x, lower):
        raise DomainError(f"x = {x:g} too small for the decomposition: (log x)^4 >= x/2")
    if x / 2 > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    blocks = []
    for k, (lo, hi) in enumerate(block_edges(x, lower), start=1):
        primes = tables.primes_in(lo, hi) if hi > lo else tables.primes[:0]
        blocks.append(PrimeBlock(k, lo, hi, primes))
    return blocks


def _blocks_or_empty(tables, x, lower) -> list[PrimeBlock]:
    if decomposition_admissible(x, lower):
        return partition_primes(tables, x, lower)
    return []


def q_limit(x: float, k: int) -> float:
    return x ** math.exp(1 - k)


def auxiliary_prime_sum(tables: PrimeTables, x: float, lower: float | None = None) -> float:
    """sum_{p in P} log p / (p log(x/p)); grows like log log x."""
    lower = lower_cutoff(x) if lower is None else lower
    p = tables.primes_in(lower, x / 2).astype(np.float64)
    return math.fsum(np.log(p) / (p * np.log(x / p)))


# -- exact triple sums ------------------------------------------------------


def _pairs(tables: PrimeTables, x: float, block: PrimeBlock):
    """All (p, q) pairs with p in the block and q prime, pq <= x."""
    X = int(math.floor(x))
    p = block.primes
    counts = np.searchsorted(tables.primes, X // p, side="right")
    q = np.concatenate([tables.primes[:c] for c in counts]) if p.size else tables.primes[:0]
    rep = np.repeat(np.arange(p.size), counts)
    return p, q, rep, counts, X // (p[rep] * q)


def sk_checkpoints(tables: PrimeTables, x: float, blocks) -> np.ndarray:
    """Distinct floor(x/(pq)) values needed by the blocks, ascending."""
    needed = [np.array([1], dtype=np.int64)]
    for b in blocks:
        needed.append(_pairs(tables, x, b)[4])
    return np.unique(np.concatenate(needed)).astype(np.float64)


@dataclass(frozen=True)
class SkResult:
    value: complex
    max_q: int
    pairs: int


def _sk(spec: MultiplicativeSpec, tables: PrimeTables, summ: SummatoryTable, x: float, block: PrimeBlock) -> SkResult:
    if block.primes.size == 0:
        return SkResult(0j, 0, 0)
    p, q, rep, counts, thresholds = _pairs(tables, x, block)
    if q.size == 0:
        return SkResult(0j, 0, 0)
    S = summ.lookup(thresholds)
    inner_terms = spec.prime_power_values(q, 1) * np.log(q.astype(np.float64)) * S
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    nonempty = counts > 0
    inner = np.zeros(p.size, dtype=np.complex128)
    inner[nonempty] = np.add.reduceat(inner_terms, starts[nonempty])
    pf = p.astype(np.float64)
    weight = spec.prime_power_values(p, 1) * np.log(pf) / np.log(x / pf)
    return SkResult(fsum_complex(weight * inner), int(q.max()), int(q.size))


def compute_Sk(spec: MultiplicativeSpec, tables: PrimeTables, summtable: SummatoryTable, x: float, k: int,
               lower: float | None = None) -> complex:
    """S_k(x) evaluated exactly from S at the points floor(x/(pq))."""
    blocks = partition_primes(tables, x, lower)
    if not 1 <= k <= len(blocks):
        return 0j
    return _sk(spec, tables, summtable, x, blocks[k - 1]).value


def summatory_for_blocks(spec, tables, x, blocks, chunk_size=DEFAULT_CHUNK, threads=1) -> SummatoryTable:
    cps = sk_checkpoints(tables, x, blocks)
    cps = np.unique(np.concatenate([cps, [math.floor(x)]]))
    return summatory_table(spec, tables, cps, chunk_size, threads)


def _first_level(spec, tables, x, S, primes) -> complex:
    """(1/log x) sum_p f(p) log p S(x/p) over the given primes."""
    if primes.size == 0:
        return 0j
    X = int(math.floor(x))
    pf = primes.astype(np.float64)
    terms = spec.prime_power_values(primes, 1) * np.log(pf) * S[X // primes]
    return fsum_complex(terms) / math.log(x)


@dataclass(frozen=True)
class DecompositionCheck:
    x: float
    S_direct: complex
    S_reassembled: complex
    defect: float
    normalized_defect: float
    admissible: bool
    discarded_small: complex
    discarded_large: complex


def decomposition_check(spec, tables, x: float, chunk_size: int = DEFAULT_CHUNK, threads: int = 1,
                        lower: float | None = None) -> DecompositionCheck:
    """Compare S(x) with (1/log x) sum_k S_k(x).

    When ((log x)^4, x/2] holds no admissible range every block is empty and the
    reassembled value is 0. The two ``discarded_*`` fields report the first-level
    contribution of the primes p <= (log x)^4 and x/2 < p <= x.
    """
    if x < 16:
        raise DomainError(f"x = {x} is below 16")
    if x > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    blocks = _blocks_or_empty(tables, x, lower)
    summ = summatory_for_blocks(spec, tables, x, blocks, chunk_size, threads)
    S_direct = complex(summ.lookup([x])[0])
    parts = [_sk(spec, tables, summ, x, b).value for b in blocks]
    return _decomposition_record(spec, tables, x, S_direct, parts, bool(blocks), lower, chunk_size, threads)


def _decomposition_record(spec, tables, x, S_direct, parts, admissible, lower, chunk_size, threads):
    logx = math.log(x)
    reassembled = fsum_complex(parts) / logx if parts else 0j
    defect = abs(S_direct - reassembled)
    S = summatory_prefix(spec, tables, int(math.floor(x)), chunk_size, threads)
    cut = lower_cutoff(x) if lower is None else lower
    small = _first_level(spec, tables, x, S, tables.primes_in(0, min(cut, x)))
    large = _first_level(spec, tables, x, S, tables.primes_in(max(cut, x / 2), x))
    return DecompositionCheck(
        x=float(x),
        S_direct=S_direct,
        S_reassembled=reassembled,
        defect=defect,
        normalized_defect=defect / (x * math.log(logx) / logx),
        admissible=admissible,
        discarded_small=small,
        discarded_large=large,
    )


# -- analytic side ---------------------------------------------------------


@dataclass(frozen=True)
class BlockReport:
    k: int
    lo: float
    hi: float
    primes_in_block: int
    S_k: complex
    max_q: int
    trivial_ratio: float
    I1: float
    I2: float
    I2_windowed: float
    cs_integral: float
    perron_majorant: float
    eq32_ratio: float
    I1_ratio: float
    I2_ratio: float
    chain_ratio: float
    perron_ratio: float
    window_terms: dict = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self, with_windows: bool = False) -> dict:
        d = asdict(self)
        d["S_k"] = [self.S_k.real, self.S_k.imag]
        d["abs_S_k"] = abs(self.S_k)
        if with_windows:
            d["window_terms"] = {str(h): v for h, v in sorted(self.window_terms.items())}
        else:
            d.pop("window_terms")
        return d


def _integration_range(grid: EulerGrid, x: float) -> tuple[int, np.ndarray]:
    T = math.log(x) ** 2
    return interval_weights(grid.t0, grid.grid_step, len(grid), -T, T)


def block_polynomials(spec, tables, grid: EulerGrid, x: float, block: PrimeBlock, threads: int = 1):
    """P_k and Q_k sampled at every grid node."""
    p = block.primes.astype(np.float64)
    cp = spec.prime_power_values(block.primes, 1) * np.log(p) / (p * np.log(x / p)) if p.size else np.zeros(0)
    P = grid_sum(cp, np.log(p), grid.t0, grid.grid_step, len(grid), threads)
    q_int = tables.primes_in(0, q_limit(x, block.k))
    q = q_int.astype(np.float64)
    cq = spec.prime_power_values(q_int, 1) * np.log(q) / q
    Q = grid_sum(cq, np.log(q), grid.t0, grid.grid_step, len(grid), threads)
    return P, Q


def _analytic(spec, tables, grid, lx, x, block, threads):
    P, Q = block_polynomials(spec, tables, grid, x, block, threads)
    i0, w = _integration_range(grid, x)
    sl = slice(i0, i0 + w.size)
    t = grid.t_values[sl]
    absP = np.abs(P[sl])
    absQ = np.abs(Q[sl])
    absF = np.abs(grid.F_values[sl])
    inv_s = 1 / np.sqrt(1 + t * t)
    cs = math.fsum(w * absP * absQ * absF * inv_s)
    I1 = math.fsum(w * absP**2)
    I2 = math.fsum(w * (absQ * absF * inv_s) ** 2)

    Q2 = np.abs(Q) ** 2
    terms = {}
    for N, sup in lx.window_sups.items():
        j0, wN = interval_weights(grid.t0, grid.grid_step, len(grid), N - 0.5, N + 0.5)
        terms[N] = sup**2 / (N * N + 1) * math.fsum(wN * Q2[j0 : j0 + wN.size])
    windowed = math.fsum(terms.values())
    return {"I1": I1, "I2": I2, "cs": cs, "windowed": windowed, "terms": terms}


def perron_majorant(spec, tables, grid: EulerGrid, x: float, k: int, lower: float | None = None,
                    threads: int = 1) -> float:
    """x * int_{|t| <= log^2 x} |P_k Q_k F_x|(1+it) dt / |1+it| + x."""
    _check_grid(grid, x)
    block = partition_primes(tables, x, lower)[k - 1]
    lx = compute_L(grid)
    return x * _analytic(spec, tables, grid, lx, x, block, threads)["cs"] + x


def compute_I1(spec, tables, grid: EulerGrid, x: float, k: int, lower: float | None = None, threads: int = 1) -> float:
    """int_{|t| <= log^2 x} |P_k(1+it)|^2 dt."""
    _check_grid(grid, x)
    block = partition_primes(tables, x, lower)[k - 1]
    P, _ = block_polynomials(spec, tables, grid, x, block, threads)
    i0, w = _integration_range(grid, x)
    return math.fsum(w * np.abs(P[i0 : i0 + w.size]) ** 2)


@dataclass(frozen=True)
class I2Result:
    I2: float
    windowed: float
    window_terms: dict = field(repr=False)


def compute_I2(spec, tables, grid: EulerGrid, lx: LxResult, x: float, k: int, lower: float | None = None,
               threads: int = 1) -> I2Result:
    """I2 directly, and its majorant with |F|^2 and 1/|s|^2 replaced per unit window."""
    _check_grid(grid, x)
    block = partition_primes(tables, x, lower)[k - 1]
    a = _analytic(spec, tables, grid, lx, x, block, threads)
    return I2Result(a["I2"], a["windowed"], a["terms"])


def i1_family(spec, tables, x: float, k: int, lower: float | None = None) -> CoefficientFamily:
    """Coefficients a_p = f(p)/log(x/p) on P_k, so a_p Lambda(p) matches the P_k weights."""
    block = partition_primes(tables, x, lower)[k - 1]
    p = block.primes
    a = spec.prime_power_values(p, 1) / np.log(x / p.astype(np.float64)) if p.size else np.zeros(0)
    return CoefficientFamily(p, a, f"{spec.name} block {k}", math.log(x) ** 2, x)


def _check_grid(grid: EulerGrid, x: float) -> None:
    if grid.x != float(x):
        raise CoverageError(f"grid was built for x = {grid.x}, not {x}")
    if grid.t_values[-1] < math.log(x) ** 2:
        raise CoverageError("grid does not reach log^2 x")


def trivial_bound_check(report: BlockReport, x: float) -> float:
    """|S_k| / (e^-k x log x)."""
    return abs(report.S_k) / (math.exp(-report.k) * x * math.log(x))


# -- end to end ----------------------------------------------------------


@dataclass(frozen=True)
class HalaszReport:
    spec: dict
    x: float
    grid_step: float
    L: float
    S: complex
    S_abs: float
    bound: float
    theorem_ratio: float
    cutoff_k: int
    decomposition: DecompositionCheck
    blocks: list
    lx: LxResult = field(repr=False, compare=False)

    @property
    def decomposition_defect(self) -> float:
        return self.decomposition.defect

    def to_dict(self, with_windows: bool = False) -> dict:
        dec = asdict(self.decomposition)
        for key in ("S_direct", "S_reassembled", "discarded_small", "discarded_large"):
            dec[key] = [dec[key].real, dec[key].imag]
        return {
            "spec": self.spec,
            "x": self.x,
            "grid_step": self.grid_step,
            "L": self.L,
            "S": [self.S.real, self.S.imag],
            "S_abs": self.S_abs,
            "bound": self.bound,
            "theorem_ratio": self.theorem_ratio,
            "cutoff_k": self.cutoff_k,
            "decomposition": dec,
            "blocks": [b.to_dict(with_windows) for b in self.blocks],
        }


def theorem_bound(x: float, L: float) -> float:
    """x L/log x * log(100 log x / L) + x log log x / log x."""
    logx = math.log(x)
    return x * L / logx * math.log(100 * logx / L) + x * math.log(logx) / logx


def cutoff(x: float, L: float) -> int:
    return int(math.floor(math.log(100 * math.log(x) / L)))


def halasz_bound(
    spec: MultiplicativeSpec,
    tables: PrimeTables,
    x: float,
    grid_step: float | None = None,
    chunk_size: int = DEFAULT_CHUNK,
    threads: int = 1,
    lower: float | None = None,
) -> HalaszReport:
    """Run the whole chain at one x and collect every measured quantity.

    Raises:
        DomainError: if x < 100.
    """
    if x < MIN_X:
        raise DomainError(f"x = {x:g} is below {MIN_X:g}; the decomposition needs (log x)^4 < x/2")
    if x > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    grid = build_euler_grid(spec, tables, x, grid_step, threads)
    lx = compute_L(grid)
    L = lx.L
    logx = math.log(x)

    blocks = _blocks_or_empty(tables, x, lower)
    summ = summatory_for_blocks(spec, tables, x, blocks, chunk_size, threads)
    S = complex(summ.lookup([x])[0])
    reports = []
    for block in blocks:
        sk = _sk(spec, tables, summ, x, block)
        a = _analytic(spec, tables, grid, lx, x, block, threads)
        k = block.k
        majorant = x * a["cs"] + x
        reports.append(
            BlockReport(
                k=k,
                lo=block.lo,
                hi=block.hi,
                primes_in_block=block.primes_in_block,
                S_k=sk.value,
                max_q=sk.max_q,
                trivial_ratio=abs(sk.value) / (math.exp(-k) * x * logx),
                I1=a["I1"],
                I2=a["I2"],
                I2_windowed=a["windowed"],
                cs_integral=a["cs"],
                perron_majorant=majorant,
                eq32_ratio=abs(sk.value) / (x * L + x),
                I1_ratio=a["I1"] / (math.exp(k) / logx),
                I2_ratio=a["I2"] / (L * L * math.exp(-k) * logx),
                chain_ratio=math.sqrt(a["I1"] * a["I2"]) / L,
                perron_ratio=abs(sk.value) / majorant,
                window_terms=a["terms"],
            )
        )
    dec = _decomposition_record(
        spec, tables, x, S, [b.S_k for b in reports], bool(blocks), lower, chunk_size, threads
    )
    bound = theorem_bound(x, L)
    return HalaszReport(
        spec=spec.to_dict(),
        x=float(x),
        grid_step=grid.grid_step,
        L=L,
        S=S,
        S_abs=abs(S),
        bound=bound,
        theorem_ratio=abs(S) / bound,
        cutoff_k=cutoff(x, L),
        decomposition=dec,
        blocks=reports,
        lx=lx,
    )


@dataclass(frozen=True)
class SmoothCheck:
    x: float
    theta: float
    S_abs: float
    L: float
    smooth_bound: float
    ratio: float


def smooth_variant_check(spec, tables, x: float, theta: float = 0.999, grid_step: float | None = None,
                         threads: int = 1, chunk_size: int = DEFAULT_CHUNK) -> SmoothCheck:
    """|S(x)| against (x / log x)(L(x) + 1) for f supported on x^theta-smooth numbers.

    Raises:
        DomainError: if f(p^k) != 0 for some prime p > x^theta.
    """
    if x > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    big = tables.primes_in(x**theta, x)
    for k in (1, 2, 3):
        if big.size and np.any(spec.prime_power_values(big, k) != 0):
            raise DomainError(f"{spec.name} is not supported on x^{theta:g}-smooth numbers")
    grid = build_euler_grid(spec, tables, x, grid_step, threads)
    L = compute_L(grid).L
    S = summatory_prefix(spec, tables, int(math.floor(x)), chunk_size, threads)[int(math.floor(x))]
    bound = x / math.log(x) * (L + 1)
    return SmoothCheck(float(x), float(theta), abs(S), L, bound, abs(S) / bound)


def write_report_json(path, reports, header: dict | None = None, with_windows: bool = False) -> None:
    write_json(path, {"header": header or {}, "reports": [r.to_dict(with_windows) for r in reports]})


BLOCK_COLUMNS = [
    "spec", "x", "k", "lo", "hi", "primes_in_block", "abs_S_k", "trivial_ratio", "I1", "I2",
    "I2_windowed", "perron_majorant", "eq32_ratio", "I1_ratio", "I2_ratio", "chain_ratio",
    "perron_ratio", "L", "cutoff_k",
]


def block_rows(reports) -> list[dict]:
    rows = []
    for r in reports:
        name = MultiplicativeSpec.from_dict(r.spec).name
        for b in r.blocks:
            d = b.to_dict()
            d.update(spec=name, x=r.x, L=r.L, cutoff_k=r.cutoff_k)
            rows.append(d)
    return rows


def write_block_csv(path, reports, header: dict | None = None) -> None:
    """One row per (spec, x, k)."""
    write_csv(path, BLOCK_COLUMNS, block_rows(reports), header)
