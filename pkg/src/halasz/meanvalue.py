"""Both sides of the prime-supported mean value inequality

    int_{-T}^{T} |sum_{T^2 <= n <= x} a_n Lambda(n) n^(-1-it)|^2 dt
        << sum_{T^2 <= n <= x} |a_n|^2 Lambda(n) / n,

measured numerically, together with the weaker bound that the classical
mean value theorem gives (a Lambda(n)^2 multiplier instead of Lambda(n)).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import splitmix
from .dirichlet import fsum_complex, grid_sum
from .errors import CapacityError, DomainError, ResolutionError
from .multiplicative import MultiplicativeSpec
from .primes import PrimeTables
from .reporting import write_json

ZERO_LHS = 1e-12


@dataclass(frozen=True, eq=False)
class CoefficientFamily:
    """Coefficients a_n on an ascending integer support inside [T^2, x]."""

    support: np.ndarray
    a: np.ndarray
    description: str
    T: float
    x: float

    def __post_init__(self) -> None:
        support = np.asarray(self.support, dtype=np.int64)
        a = np.asarray(self.a, dtype=np.complex128)
        if support.shape != a.shape:
            raise ValueError("support and coefficients differ in length")
        if support.size and (np.any(np.diff(support) <= 0)):
            raise ValueError("support must be strictly increasing")
        if not np.all(np.isfinite(a)):
            raise ValueError("coefficients must be finite")
        if support.size and (support[0] < self.T**2 or support[-1] > self.x):
            raise DomainError(f"support must lie in [T^2, x] = [{self.T**2:g}, {self.x:g}]")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "a", a)

    def scaled(self, c: complex) -> "CoefficientFamily":
        return CoefficientFamily(self.support, self.a * c, f"{c}*({self.description})", self.T, self.x)


def single_term(n0: int, a: complex, T: float, x: float | None = None) -> CoefficientFamily:
    return CoefficientFamily(np.array([n0]), np.array([a]), f"single n={n0}", T, float(x or n0))


def prime_family(tables: PrimeTables, T: float, x: float, values=None, description: str = "") -> CoefficientFamily:
    """Coefficients on the primes in [T^2, x]; ``values`` maps a prime array to a_p (default 1)."""
    if x > tables.limit:
        raise CapacityError(f"x = {x} exceeds sieve limit {tables.limit}")
    p = tables.primes_in(T**2, x, lo_inclusive=True)
    a = np.ones(p.size, dtype=np.complex128) if values is None else np.asarray(values(p), dtype=np.complex128)
    return CoefficientFamily(p, a, description or "1 on primes", T, x)


def steinhaus_family(tables: PrimeTables, T: float, x: float, seed: int) -> CoefficientFamily:
    """Independent uniform unit-circle coefficients on primes (splitmix64 stream)."""
    return prime_family(
        tables, T, x, lambda p: np.exp(2j * np.pi * splitmix.uniform(seed, p)), f"steinhaus seed {seed}"
    )


def twisted_family(spec: MultiplicativeSpec, tables: PrimeTables, T: float, x: float, h: float) -> CoefficientFamily:
    """a_q = f(q) q^(-ih) on primes q in [T^2, x]."""

    def vals(q):
        return spec.prime_power_values(q, 1) * np.exp(-1j * h * np.log(q.astype(np.float64)))

    return prime_family(tables, T, x, vals, f"{spec.name}(q) q^(-i*{h:g})")


FAMILIES = ("single", "steinhaus", "twisted", "ones")


def lemma1_battery(tables: PrimeTables, T: float, x: float, specs=(), seeds=range(1, 21), h_values=(0.0, 1.0),
                   families=FAMILIES) -> list[CoefficientFamily]:
    """The regression families at one (T, x).

    ``single`` puts a_p = 1 on the smallest prime >= T^2, ``ones`` puts 1 on
    every prime, ``steinhaus`` draws one family per seed and ``twisted`` gives
    a_q = f(q) q^(-ih) for each spec and h.
    """
    fams = []
    if "single" in families:
        first = tables.primes_in(T * T, x, lo_inclusive=True)
        if first.size:
            fams.append(single_term(int(first[0]), 1.0, T, x))
    if "ones" in families:
        fams.append(prime_family(tables, T, x))
    if "steinhaus" in families:
        fams += [steinhaus_family(tables, T, x, s) for s in seeds]
    if "twisted" in families:
        fams += [twisted_family(spec, tables, T, x, h) for spec in specs for h in h_values]
    return fams


def _weights(coeffs: CoefficientFamily, tables: PrimeTables) -> np.ndarray:
    if coeffs.support.size and coeffs.support[-1] > tables.limit:
        raise CapacityError(f"support exceeds sieve limit {tables.limit}")
    return tables.lam[coeffs.support]


def prime_poly_eval(coeffs: CoefficientFamily, tables: PrimeTables, t):
    """sum a_n Lambda(n) n^(-1-it) at a scalar t (or an array of t)."""
    lam = _weights(coeffs, tables)
    n = coeffs.support.astype(np.float64)
    c = coeffs.a * lam / n
    if np.ndim(t) == 0:
        return fsum_complex(c * np.exp(-1j * float(t) * np.log(n)))
    t = np.asarray(t, dtype=np.float64)
    return np.array([fsum_complex(c * np.exp(-1j * tv * np.log(n))) for tv in t])


def max_step(x: float) -> float:
    return min(0.01, 1 / (4 * math.log(max(x, 2.0))))


def quadrature_nodes(T: float, step: float) -> tuple[float, int]:
    """(h, panels) of the uniform partition of [-T, T] with h <= step and an even panel count."""
    panels = max(2, int(math.ceil(2 * T / step - 1e-9)))
    panels += panels % 2
    return 2 * T / panels, panels


def lemma1_lhs(coeffs: CoefficientFamily, tables: PrimeTables, T: float, quadrature_step: float | None = None,
               threads: int = 1) -> float:
    """Composite Simpson value of int_{-T}^{T} |sum a_n Lambda(n) n^(-1-it)|^2 dt.

    Raises:
        ResolutionError: if the step exceeds min(0.01, 1/(4 log x)).
    """
    x = float(coeffs.support[-1]) if coeffs.support.size else 2.0
    bound = max_step(x)
    step = bound if quadrature_step is None else float(quadrature_step)
    if step <= 0 or step > bound * (1 + 1e-12):
        raise ResolutionError(f"quadrature step {step} exceeds {bound:.6g}")
    lam = _weights(coeffs, tables)
    if coeffs.support.size == 0 or not np.any(lam * np.abs(coeffs.a)):
        return 0.0
    h, panels = quadrature_nodes(T, step)
    n = coeffs.support.astype(np.float64)
    vals = grid_sum(coeffs.a * lam / n, np.log(n), -T, h, panels + 1, threads)
    g = np.abs(vals) ** 2
    w = np.full(panels + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return h / 3 * math.fsum(w * g)


def lemma1_rhs(coeffs: CoefficientFamily, tables: PrimeTables) -> float:
    """sum |a_n|^2 Lambda(n) / n."""
    lam = _weights(coeffs, tables)
    return math.fsum(np.abs(coeffs.a) ** 2 * lam / coeffs.support)


@dataclass(frozen=True)
class MeanValueReport:
    T: float
    x: float
    description: str
    lhs: float
    rhs: float
    ratio: float
    quadrature_step: float

    def to_row(self) -> dict:
        return asdict(self)


def _check_support(coeffs: CoefficientFamily, T: float) -> None:
    if coeffs.support.size and coeffs.support[0] < T**2:
        raise DomainError(f"support starts at {coeffs.support[0]} < T^2 = {T**2:g}")


def lemma1_report(coeffs: CoefficientFamily, tables: PrimeTables, T: float, quadrature_step: float | None = None,
                  threads: int = 1) -> MeanValueReport:
    """Both sides and their ratio; a vanishing right side demands a vanishing integral."""
    _check_support(coeffs, T)
    x = float(coeffs.support[-1]) if coeffs.support.size else coeffs.x
    step = max_step(x) if quadrature_step is None else float(quadrature_step)
    lhs = lemma1_lhs(coeffs, tables, T, step, threads)
    rhs = lemma1_rhs(coeffs, tables)
    if rhs == 0:
        if lhs > ZERO_LHS:
            raise ArithmeticError(f"integral {lhs} is nonzero although the weighted sum vanishes")
        ratio = 0.0
    else:
        ratio = lhs / rhs
    return MeanValueReport(float(T), float(coeffs.x), coeffs.description, lhs, rhs, ratio, step)


@dataclass(frozen=True)
class MeanValueContrast:
    lemma1_rhs: float
    lambda_squared_rhs: float
    classical_bound: float
    gap: float


def classical_mv_contrast(coeffs: CoefficientFamily, tables: PrimeTables, T: float) -> MeanValueContrast:
    """Set the Lambda(n) weighted sum beside its Lambda(n)^2 counterparts.

    ``lambda_squared_rhs`` is 2T sum |a_n|^2 Lambda(n)^2 / n^2 (the main term of
    the classical theorem) and ``classical_bound`` keeps the n-term as well,
    sum |a_n|^2 Lambda(n)^2 / n^2 (2T + n). ``gap`` is lambda_squared_rhs over
    lemma1_rhs (0 when both vanish).
    """
    _check_support(coeffs, T)
    lam = _weights(coeffs, tables)
    n = coeffs.support.astype(np.float64)
    a2 = np.abs(coeffs.a) ** 2
    lin = math.fsum(a2 * lam / n)
    sq = math.fsum(a2 * lam**2 / n**2)
    full = math.fsum(a2 * lam**2 / n**2 * (2 * T + n))
    lsq = 2 * T * sq
    return MeanValueContrast(lin, lsq, full, lsq / lin if lin else 0.0)


def write_reports(path, reports, header: dict | None = None) -> None:
    write_json(path, {"header": header or {}, "rows": [r.to_row() for r in reports]})
