"""Dirichlet polynomials on uniform t-grids, plus trapezoid weights.

A sum ``sum_m c_m exp(-i t omega_m)`` at ``t_j = t0 + j*step`` is evaluated
blockwise: with ``j = b*B + r``,

    exp(-i t_j w) = exp(-i r*step*w) * exp(-i (t0 + b*B*step) w),

so each chunk of terms contributes one complex matrix product of shape
``(B, terms) @ (terms, blocks)``. Chunks are summed in index order and BLAS
is pinned to one thread, which keeps results bit-identical for any
``threads`` value.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import CoverageError

TERM_CHUNK = 4096
RESET_EVERY = 64


def phase_table(w: np.ndarray, start: float, delta: float, count: int) -> np.ndarray:
    """Rows ``exp(-i (start + r*delta) w)`` for r < count.

    Rows are built by repeated multiplication and re-anchored with an exact
    exponential every RESET_EVERY rows, keeping the error near 1e-14.
    """
    out = np.empty((count, w.size), dtype=np.complex128)
    z = np.exp(-1j * delta * w)
    for r in range(count):
        if r % RESET_EVERY == 0:
            out[r] = np.exp(-1j * (start + r * delta) * w)
        else:
            np.multiply(out[r - 1], z, out=out[r])
    return out


def _block_size(n: int) -> int:
    return int(min(512, max(16, math.isqrt(max(n, 1)))))


def grid_sum(coeffs, freqs, t0: float, step: float, n: int, threads: int = 1) -> np.ndarray:
    """Evaluate ``sum_m coeffs[m] * exp(-1j * t * freqs[m])`` on a uniform grid.

    Args:
        coeffs: complex coefficients.
        freqs: real frequencies (``log n`` for a Dirichlet polynomial).
        t0, step, n: grid ``t_j = t0 + j*step`` for ``j < n``.
        threads: worker threads; does not affect the result.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    freqs = np.asarray(freqs, dtype=np.float64)
    if n <= 0:
        return np.zeros(0, dtype=np.complex128)
    if coeffs.size == 0:
        return np.zeros(n, dtype=np.complex128)
    B = _block_size(n)
    nb = -(-n // B)
    starts = range(0, coeffs.size, TERM_CHUNK)

    def partial(s: int) -> np.ndarray:
        w = freqs[s : s + TERM_CHUNK]
        M = phase_table(w, 0.0, step, B)
        V = phase_table(w, t0, B * step, nb).T * coeffs[s : s + TERM_CHUNK, None]
        return M @ V

    with threadpool_limits(limits=1, user_api="blas"):
        if threads > 1 and len(starts) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(partial, starts))
        else:
            parts = [partial(s) for s in starts]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total.T.reshape(-1)[:n]


def dirichlet_on_grid(n, coeffs, t0: float, step: float, count: int, threads: int = 1) -> np.ndarray:
    """``sum coeffs[i] * n[i]**(-1j*t)`` on a uniform grid (the line Re s = 0)."""
    n = np.asarray(n, dtype=np.float64)
    return grid_sum(coeffs, np.log(n), t0, step, count, threads)


def fsum_complex(values) -> complex:
    """Correctly rounded sum of complex values (order independent)."""
    values = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def interval_weights(t0: float, step: float, n: int, a: float, b: float) -> tuple[int, np.ndarray]:
    """Nonnegative weights integrating the piecewise-linear interpolant over [a, b].

    Returns ``(i0, w)`` such that the integral of the interpolant of node values
    ``y`` is ``w @ y[i0 : i0 + len(w)]``. Endpoints that sit on nodes (to within
    1e-9 of a step) are snapped, so node-aligned intervals give the composite
    trapezoid rule exactly.

    Raises:
        CoverageError: if [a, b] is not inside the grid.
    """
    if b < a:
        raise ValueError("interval must satisfy a <= b")
    ua = (a - t0) / step
    ub = (b - t0) / step
    snap = 1e-9
    if abs(ua - round(ua)) < snap:
        ua = float(round(ua))
    if abs(ub - round(ub)) < snap:
        ub = float(round(ub))
    if ua < 0 or ub > n - 1:
        raise CoverageError(f"interval [{a}, {b}] is not covered by the grid")
    ia = int(math.floor(ua))
    ib = int(math.ceil(ub))
    if ib == ia:
        return ia, np.zeros(1)
    panels = np.arange(ia, ib)
    sl = np.maximum(panels, ua) - panels
    sr = np.minimum(panels + 1, ub) - panels
    half = (sr**2 - sl**2) / 2
    w = np.zeros(ib - ia + 1)
    w[:-1] += (sr - sl) - half
    w[1:] += half
    return ia, w * step
