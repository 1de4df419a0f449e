import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from halasz import multiplicative as mf
from halasz.errors import DomainError, ResolutionError
from halasz.meanvalue import (
    CoefficientFamily,
    classical_mv_contrast,
    lemma1_battery,
    lemma1_lhs,
    lemma1_report,
    lemma1_rhs,
    max_step,
    prime_family,
    prime_poly_eval,
    single_term,
    steinhaus_family,
    twisted_family,
)

import oracles


def test_single_term_exact(small_tables):
    # |a Lambda(n)/n|^2 is constant in t, so the integral is 2T times it
    fam = single_term(2, 1.0, T=1.0)
    rep = lemma1_report(fam, small_tables, 1.0)
    assert rep.lhs == pytest.approx(2 * math.log(2) ** 2 / 4, rel=1e-12)
    assert rep.rhs == pytest.approx(math.log(2) / 2, rel=1e-14)
    assert rep.ratio == pytest.approx(math.log(2), rel=1e-12)


def test_support_below_T_squared(small_tables):
    with pytest.raises(DomainError):
        CoefficientFamily(np.array([3]), np.array([1.0]), "bad", T=2.0, x=10)
    with pytest.raises(DomainError):
        lemma1_report(single_term(7, 1.0, T=2.0), small_tables, 5.0)


def test_zero_coefficients(small_tables):
    fam = CoefficientFamily(np.array([6, 10, 12]), np.array([1.0, 1.0, 1.0]), "non prime powers", 1.0, 12)
    rep = lemma1_report(fam, small_tables, 1.0)
    assert rep.lhs == 0 and rep.rhs == 0 and rep.ratio == 0


def test_resolution_error(small_tables):
    fam = prime_family(small_tables, 1.0, 1000)
    with pytest.raises(ResolutionError):
        lemma1_lhs(fam, small_tables, 1.0, quadrature_step=0.1)


@pytest.mark.parametrize("T", [1.0, 5.0, 10.0])
def test_lhs_against_closed_form(small_tables, T):
    fam = steinhaus_family(small_tables, T, 400, seed=3)
    lam = small_tables.lam[fam.support]
    c = [complex(a) * l / n for a, l, n in zip(fam.a, lam, fam.support)]
    exact = oracles.exact_mean_square(list(fam.support), c, T)
    assert lemma1_lhs(fam, small_tables, T) == pytest.approx(exact, rel=1e-4)


def test_refinement_stability(tables):
    for fam in [prime_family(tables, 5.0, 10**5), steinhaus_family(tables, 10.0, 10**5, 9)]:
        a = lemma1_lhs(fam, tables, fam.T)
        b = lemma1_lhs(fam, tables, fam.T, max_step(fam.x) / 2)
        assert abs(a - b) <= 1e-4 * b


@settings(max_examples=20, deadline=None)
@given(re=st.floats(-3, 3), im=st.floats(-3, 3))
def test_quadratic_scaling(re, im):
    c = complex(re, im)
    fam = steinhaus_family(_T, 1.0, 300, 1)
    a = lemma1_report(fam, _T, 1.0)
    b = lemma1_report(fam.scaled(c), _T, 1.0)
    assert b.lhs == pytest.approx(abs(c) ** 2 * a.lhs, rel=1e-9, abs=1e-300)
    assert b.rhs == pytest.approx(abs(c) ** 2 * a.rhs, rel=1e-12, abs=1e-300)


def test_prime_poly_eval(small_tables):
    fam = twisted_family(mf.character(4, 1), small_tables, 2.0, 500, h=1.5)
    for t in (0.0, 1.25, -3.0):
        want = sum(a * math.log(p) * p ** (-1 - 1j * t) for a, p in zip(fam.a, fam.support))
        assert prime_poly_eval(fam, small_tables, t) == pytest.approx(complex(want), abs=1e-12)
    arr = prime_poly_eval(fam, small_tables, np.array([0.0, 1.25]))
    assert arr[1] == pytest.approx(prime_poly_eval(fam, small_tables, 1.25))


def test_rhs_definition(small_tables):
    fam = prime_family(small_tables, 3.0, 2000)
    assert lemma1_rhs(fam, small_tables) == pytest.approx(
        math.fsum(math.log(p) / p for p in oracles.primes_upto(2000) if p >= 9), rel=1e-14
    )


def test_classical_contrast(tables):
    fam = prime_family(tables, 10.0, 10**6)
    con = classical_mv_contrast(fam, tables, 10.0)
    assert con.lemma1_rhs == pytest.approx(lemma1_rhs(fam, tables))
    assert con.classical_bound >= con.lambda_squared_rhs
    # for a large support the Lambda^2 main term is the smaller one, yet the n-term dominates
    assert con.classical_bound > con.lemma1_rhs
    assert con.gap == pytest.approx(con.lambda_squared_rhs / con.lemma1_rhs)


def test_battery_contents(small_tables):
    fams = lemma1_battery(small_tables, 5.0, 10**4, [mf.one(), mf.moebius()], seeds=range(1, 4), h_values=(0.0,))
    descs = [f.description for f in fams]
    assert descs[0] == "single n=29"
    assert "1 on primes" in descs
    assert sum(d.startswith("steinhaus") for d in descs) == 3
    assert len(fams) == 1 + 1 + 3 + 2
    for f in fams:
        assert f.support[0] >= 25


from halasz.primes import build_tables  # noqa: E402

_T = build_tables(1000)
