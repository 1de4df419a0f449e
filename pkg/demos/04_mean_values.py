"""Mean values of prime-supported Dirichlet polynomials."""

from halasz import multiplicative as mf
from halasz.meanvalue import (
    classical_mv_contrast,
    lemma1_report,
    prime_family,
    single_term,
    steinhaus_family,
    twisted_family,
)
from halasz.primes import build_tables

tables = build_tables(10**6)
x, T = 10**6, 10.0

families = [
    single_term(101, 1.0, T, x),
    prime_family(tables, T, x),
    steinhaus_family(tables, T, x, seed=1),
    twisted_family(mf.moebius(), tables, T, x, h=1.0),
]
print(f"{'family':>28s} {'lhs':>12s} {'rhs':>12s} {'ratio':>8s}")
for fam in families:
    rep = lemma1_report(fam, tables, T)
    print(f"{fam.description:>28s} {rep.lhs:12.6g} {rep.rhs:12.6g} {rep.ratio:8.4f}")

# The classical mean value theorem weights by Lambda(n)^2 and keeps an n-term,
# which for long polynomials is far larger than the Lambda(n)-weighted sum.
con = classical_mv_contrast(prime_family(tables, T, x), tables, T)
print("Lambda-weighted:", con.lemma1_rhs)
print("Lambda^2 main term:", con.lambda_squared_rhs, " with n-term:", con.classical_bound)
