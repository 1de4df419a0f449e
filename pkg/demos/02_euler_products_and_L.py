"""Truncated Euler products on the 1-line and the windowed functional L(x)."""

import math

import numpy as np

from halasz import multiplicative as mf
from halasz.euler import build_euler_grid, compute_L, trivial_majorant, truncated_euler_product
from halasz.primes import build_tables

tables = build_tables(10**5)
x = 10**5

# A single value, formed factor by factor.
F = truncated_euler_product(mf.moebius(), tables, x, 0.0)
print("F_x(1) for the Moebius function:", F, "(compare 1/zeta(1) = 0)")
print("largest possible |F_x|:", trivial_majorant(tables, x))

# The grid covers |t| <= log^2 x + 1.5 with step min(0.01, 1/(4 log x)).
grid = build_euler_grid(mf.one(), tables, x)
print("grid nodes:", len(grid), "step:", grid.grid_step)
peak = int(np.argmax(np.abs(grid.F_values)))
print("|F| peaks at t =", grid.t_values[peak], "with", abs(grid.F_values[peak]))

# L(x)^2 sums the squared window sups weighted by 1/(N^2 + 1).
for spec in (mf.one(), mf.ntoialpha(2.0), mf.moebius(), mf.steinhaus(3)):
    res = compute_L(build_euler_grid(spec, tables, x))
    print(f"{spec.name:>14s}: L = {res.L:8.4f}, L/log x = {res.L / math.log(x):.4f}")

# With f = 0 on every prime, F is identically 1 and L^2 is a plain sum of 1/(N^2+1).
res = compute_L(build_euler_grid(mf.zero_on_primes(), tables, x))
print("f = 0 on primes: L^2 =", res.L**2)
