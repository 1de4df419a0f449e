"""Truncated Euler products on the 1-line and the windowed functional L(x).

Small primes are handled factor by factor (principal logarithms, with a
direct product for factors that nearly vanish). For p > SMALL_PRIME_CUTOFF
every local factor is within 1/(p-1) of 1, so its principal logarithm is
expanded as a power series in p^(-s); those terms form one long Dirichlet
polynomial that is evaluated on the whole grid by
:func:`halasz.dirichlet.grid_sum`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dirichlet import fsum_complex, grid_sum
from .errors import CapacityError, CoverageError
from .multiplicative import MultiplicativeSpec
from .primes import PrimeTables
from .reporting import write_csv, write_json

TAIL_TOL = 1e-14
ZERO_FACTOR = 1e-14
SMALL_PRIME_CUTOFF = 30


def k_max_for(p) -> np.ndarray | int:
    """Smallest k >= 1 with p^-(k+1) / (1 - 1/p) < 1e-14."""
    p_arr = np.asarray(p, dtype=np.float64)
    bound = -np.log(TAIL_TOL * (1 - 1 / p_arr))
    k = np.maximum(np.floor(bound / np.log(p_arr)).astype(np.int64), 1)
    # guard the floor against rounding at the boundary
    k = np.where(p_arr ** (-(k + 1.0)) / (1 - 1 / p_arr) >= TAIL_TOL, k + 1, k)
    return int(k) if np.ndim(p) == 0 else k


def log_series_terms(p) -> np.ndarray:
    """Number of log-series terms J with (2/p)^(J+1) / (1 - 2/p) < 1e-14 (p >= 3)."""
    p_arr = np.asarray(p, dtype=np.float64)
    r = 2 / p_arr
    J = np.maximum(np.floor(np.log(TAIL_TOL * (1 - r)) / np.log(r)).astype(np.int64), 1)
    J = np.where(r ** (J + 1.0) / (1 - r) >= TAIL_TOL, J + 1, J)
    return J


def _horner(a: np.ndarray, w) -> np.ndarray:
    """1 + sum_k a[k-1] w^k; ``a`` has shape (K, ...) broadcasting against w."""
    acc = np.zeros(np.broadcast(a[0], w).shape, dtype=np.complex128)
    for ak in a[::-1]:
        acc = (acc + ak) * w
    return 1 + acc


def prime_power_matrix(spec: MultiplicativeSpec, primes: np.ndarray, K: int) -> np.ndarray:
    """Array of shape (K, len(primes)) holding f(p^k) for k = 1..K."""
    primes = np.asarray(primes, dtype=np.int64)
    k = np.arange(1, K + 1, dtype=np.int64)[:, None]
    p = np.broadcast_to(primes[None, :], (K, primes.size))
    return spec.prime_power_values(p, np.broadcast_to(k, p.shape))


def euler_factor(spec: MultiplicativeSpec, p: int, t: float, k_max: int | None = None) -> complex:
    """Local factor 1 + sum_{k <= k_max} f(p^k) p^(-k(1+it))."""
    if k_max is None:
        k_max = k_max_for(p)
    a = prime_power_matrix(spec, np.array([p]), k_max)[:, 0]
    w = np.exp(-1j * t * math.log(p)) / p
    return complex(_horner(a, w))


def _factors_at(spec: MultiplicativeSpec, primes: np.ndarray, t: float) -> np.ndarray:
    out = np.empty(primes.size, dtype=np.complex128)
    kmax = k_max_for(primes) if primes.size else np.zeros(0, dtype=np.int64)
    for K in np.unique(kmax):
        sel = np.flatnonzero(kmax == K)
        ps = primes[sel]
        a = prime_power_matrix(spec, ps, int(K))
        w = np.exp(-1j * t * np.log(ps.astype(np.float64))) / ps
        out[sel] = _horner(a, w)
    return out


def truncated_euler_product(spec: MultiplicativeSpec, tables: PrimeTables, x: float, t: float) -> complex:
    """F_x(1+it) at a single t, factor by factor.

    This is the reference path: every local factor is formed explicitly and
    the principal logarithms are summed with a correctly rounded sum.
    """
    if x > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    primes = tables.primes_in(0, x)
    fac = _factors_at(spec, primes, t)
    tiny = np.abs(fac) < ZERO_FACTOR
    direct = complex(np.prod(fac[tiny])) if np.any(tiny) else 1 + 0j
    return complex(np.exp(fsum_complex(np.log(fac[~tiny])))) * direct


def trivial_majorant(tables: PrimeTables, x: float) -> float:
    """prod_{p <= x} (1 - 1/p)^-1, the largest possible |F_x(1+it)|."""
    p = tables.primes_in(0, x).astype(np.float64)
    return math.exp(-math.fsum(np.log1p(-1 / p)))


def default_step(x: float) -> float:
    return min(0.01, 1 / (4 * math.log(x)))


def window_count(x: float) -> int:
    """Largest integer N with N <= log^2 x + 1."""
    return int(math.floor(math.log(x) ** 2 + 1))


@dataclass(frozen=True, eq=False)
class EulerGrid:
    """F_x(1+it) sampled at ``t_values = (j - n_half) * grid_step``."""

    x: float
    t_values: np.ndarray
    F_values: np.ndarray
    grid_step: float
    spec_name: str = ""

    @property
    def t0(self) -> float:
        return float(self.t_values[0])

    def __len__(self) -> int:
        return self.t_values.size

    def to_csv(self, path, header: dict | None = None) -> None:
        rows = ({"t": t, "re_F": F.real, "im_F": F.imag, "abs_F": abs(F)} for t, F in zip(self.t_values, self.F_values))
        write_csv(path, ["t", "re_F", "im_F", "abs_F"], rows, header)


def build_euler_grid(
    spec: MultiplicativeSpec,
    tables: PrimeTables,
    x: float,
    grid_step: float | None = None,
    threads: int = 1,
) -> EulerGrid:
    """Evaluate F_x(1+it) for |t| <= log^2 x + 1.5 on a uniform grid.

    Raises:
        CapacityError: if x exceeds the sieve.
        CoverageError: if ``grid_step`` exceeds min(0.01, 1/(4 log x)).
    """
    if x > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    bound = default_step(x)
    step = bound if grid_step is None else float(grid_step)
    if step <= 0 or step > bound * (1 + 1e-12):
        raise CoverageError(f"grid_step {step} exceeds the resolution bound {bound:.6g}")
    R = math.log(x) ** 2 + 1.5
    n_half = int(math.ceil(R / step - 1e-9))
    t = (np.arange(2 * n_half + 1, dtype=np.float64) - n_half) * step
    t.flags.writeable = False

    primes = tables.primes_in(0, x)
    small = primes[primes <= SMALL_PRIME_CUTOFF]
    large = primes[primes > SMALL_PRIME_CUTOFF]

    log_part = np.zeros(t.size, dtype=np.complex128)
    direct = np.ones(t.size, dtype=np.complex128)
    for p in small:
        K = k_max_for(int(p))
        a = prime_power_matrix(spec, np.array([p]), K)
        w = np.exp(-1j * t * math.log(p)) / p
        fac = _horner(a, w)
        tiny = np.abs(fac) < ZERO_FACTOR
        if np.any(tiny):
            direct[tiny] *= fac[tiny]
            log_part[~tiny] += np.log(fac[~tiny])
        else:
            log_part += np.log(fac)

    if large.size:
        coeffs, freqs = _log_series(spec, large)
        log_part += grid_sum(coeffs, freqs, float(t[0]), step, t.size, threads)

    F = np.exp(log_part) * direct
    F.flags.writeable = False
    return EulerGrid(x=float(x), t_values=t, F_values=F, grid_step=step, spec_name=spec.name)


def _log_series(spec: MultiplicativeSpec, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients and frequencies of sum_p log(local factor) as a Dirichlet series."""
    J = log_series_terms(primes)
    K = int(J.max())
    a = prime_power_matrix(spec, primes, K)
    b = np.zeros_like(a)
    # j b_j = j a_j - sum_{i<j} i b_i a_{j-i}
    for j in range(1, K + 1):
        acc = j * a[j - 1]
        for i in range(1, j):
            acc = acc - i * b[i - 1] * a[j - i - 1]
        b[j - 1] = acc / j
    logp = np.log(primes.astype(np.float64))
    coeffs, freqs = [], []
    for j in range(1, K + 1):
        sel = J >= j
        coeffs.append(b[j - 1, sel] * primes[sel].astype(np.float64) ** (-j))
        freqs.append(j * logp[sel])
    return np.concatenate(coeffs), np.concatenate(freqs)


@dataclass(frozen=True, eq=False)
class LxResult:
    x: float
    window_sups: dict = field(repr=False)
    L: float = 0.0
    grid_step: float = 0.0

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "grid_step": self.grid_step,
            "L": self.L,
            "window_sups": {str(N): s for N, s in sorted(self.window_sups.items())},
        }

    def to_json(self, path, header: dict | None = None) -> None:
        write_json(path, {"header": header or {}, **self.to_dict()})


def window_slice(grid: EulerGrid, N: int) -> slice:
    """Grid indices with |t - N| <= 1/2 (shared endpoints belong to both windows)."""
    eps = 1e-9 * grid.grid_step
    lo = np.searchsorted(grid.t_values, N - 0.5 - eps, side="left")
    hi = np.searchsorted(grid.t_values, N + 0.5 + eps, side="right")
    return slice(int(lo), int(hi))


def compute_L(grid: EulerGrid) -> LxResult:
    """Assemble L(x)^2 = sum_{|N| <= log^2 x + 1} sup_{|t-N|<=1/2} |F|^2 / (N^2 + 1).

    Raises:
        CoverageError: if the grid misses part of a window or is too coarse.
    """
    x = grid.x
    Nmax = window_count(x)
    eps = 1e-9 * grid.grid_step
    if grid.grid_step > default_step(x) * (1 + 1e-12):
        raise CoverageError("grid is too coarse for the windowed sup")
    if grid.t_values[0] > -(Nmax + 0.5) + eps or grid.t_values[-1] < Nmax + 0.5 - eps:
        raise CoverageError("grid does not cover every window")
    modulus = np.abs(grid.F_values)
    sups = {}
    for N in range(-Nmax, Nmax + 1):
        sups[N] = float(np.max(modulus[window_slice(grid, N)]))
    L2 = math.fsum(s * s / (N * N + 1) for N, s in sups.items())
    return LxResult(x=x, window_sups=sups, L=math.sqrt(L2), grid_step=grid.grid_step)


def lx(spec: MultiplicativeSpec, tables: PrimeTables, x: float, grid_step: float | None = None,
       threads: int = 1) -> tuple[EulerGrid, LxResult]:
    grid = build_euler_grid(spec, tables, x, grid_step, threads)
    return grid, compute_L(grid)
