import math

import mpmath
import pickle

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpl.errors import (
    DomainError,
    EmptyCoeffs,
    IndexOverCap,
    NegativeShift,
    NonFinite,
    NotInDomain,
    ParamMismatch,
)
from qpl.qcore import validate_q
from qpl.specfun import (
    LIMIT,
    Polynomial,
    Sampled,
    combine,
    delta_bar,
    dilate,
    evaluate,
    i_bar,
    is_invertible,
    poly_fn,
    sampled_fn,
    sup_norm,
    to_sampled,
)

from conftest import QS

coeff_lists = st.lists(st.floats(-5, 5), min_size=1, max_size=21)
qs = st.sampled_from(QS)


def dq(f, p, n):
    """Difference quotients at Index 0..n, evaluated in 60-digit arithmetic."""
    with mpmath.workdps(60):
        x = [mpmath.mpf(v) for v in p.grid(n + 1)]
        c = [mpmath.mpf(v) for v in f.coeffs]
        val = [mpmath.polyval(c[::-1], t) for t in x]
        return np.array([float((val[k] - val[k + 1]) / (x[k] - x[k + 1])) for k in range(n + 1)])


def series_ibar(f, p, n):
    """(1 - q^2) x sum_m q^(2m) f(q^(2m) x), summed with fsum until q^(2m) < 1e-20."""
    terms = int(math.log(1e-20) / math.log(p.q2)) + 1
    v = [evaluate(f, k) for k in range(n + terms + 1)]
    w = [p.q2**m for m in range(terms + 1)]
    return np.array([
        (1 - p.q2) * p.point(k) * math.fsum(w[m] * v[k + m] for m in range(terms + 1))
        for k in range(n + 1)
    ])


# constructors and evaluation

def test_poly_fn_examples(p5):
    one = poly_fn(p5, [1])
    assert one(0) == 1 and one(LIMIT) == 1
    x = poly_fn(p5, [0, 1])
    assert x(1) == 0.25 and x(LIMIT) == 0
    assert poly_fn(p5, [0, 0, 1])(2) == 0.00390625
    assert poly_fn(p5, [0, 0, 1])(1) == 0.0625
    assert poly_fn(p5, [7])(42) == 7


def test_poly_fn_errors(p5):
    with pytest.raises(EmptyCoeffs):
        poly_fn(p5, [])
    with pytest.raises(NonFinite):
        poly_fn(p5, [1, math.nan])


def test_evaluate_index_cap(p5):
    x = poly_fn(p5, [0, 1])
    with pytest.raises(IndexOverCap):
        x(p5.n_cap + 1)
    with pytest.raises(IndexOverCap):
        x(-1)


def test_limit_singleton_pickles():
    assert pickle.loads(pickle.dumps(LIMIT)) is LIMIT


def test_sampled_tail_certificate(p5):
    f = sampled_fn(p5, [1.0, 0.5, 0.25], 0.25, 0.0)
    assert f(10) == 0.25 and f(LIMIT) == 0.25
    with pytest.raises(DomainError):
        sampled_fn(p5, [1.0, 0.5], 0.0, 0.0)
    with pytest.raises(DomainError):
        sampled_fn(p5, [1.0, 0.5], 0.0, 1.0)  # |0.5| > 1 * q^2
    with pytest.raises(EmptyCoeffs):
        sampled_fn(p5, [], 0.0, 0.0)
    with pytest.raises(NonFinite):
        sampled_fn(p5, [math.inf], 0.0, 1.0)


# combine

def test_combine_examples(p5):
    x = poly_fn(p5, [0, 1])
    assert combine("add", x, poly_fn(p5, [0])) == x
    assert combine("mul", x, x) == poly_fn(p5, [0, 0, 1])
    assert combine("scale", x, alpha=2.0)(1) == 0.5


def test_combine_param_mismatch(p5):
    with pytest.raises(ParamMismatch):
        combine("add", poly_fn(p5, [1]), poly_fn(validate_q(0.3), [1]))


def test_combine_mixed_kinds(p):
    f = poly_fn(p, [1, -2, 0.5])
    g = to_sampled(poly_fn(p, [0.3, 1.0]))
    for op, ref in (("add", lambda a, b: a + b), ("mul", lambda a, b: a * b)):
        h = combine(op, f, g)
        assert isinstance(h, Sampled)
        for k in (0, 1, 5, 20):
            assert h(k) == pytest.approx(ref(f(k), evaluate(g, k)), abs=1e-13)
        assert h(LIMIT) == pytest.approx(ref(f(LIMIT), g(LIMIT)), abs=1e-13)


def test_mixed_product_slopes_follow_leibniz(p):
    f = to_sampled(poly_fn(p, [1, -2, 0.5]))
    g = to_sampled(poly_fn(p, [0.3, 1.0, 2.0]))
    prod = combine("mul", f, g)
    exact = delta_bar(poly_fn(p, [1, -2, 0.5]) * poly_fn(p, [0.3, 1.0, 2.0]))
    n = 30
    assert np.max(np.abs(prod.slope_values(n) - exact.values(n))) < 1e-10


# dilation

def test_dilate_examples(p5):
    x = poly_fn(p5, [0, 1])
    assert dilate(x, 0) is x
    assert dilate(x, 1)(0) == 0.25
    c = dilate(poly_fn(p5, [3]), 5)
    assert all(c(k) == 3 for k in range(10)) and c(LIMIT) == 3
    with pytest.raises(NegativeShift):
        dilate(x, -1)


@given(coeffs=coeff_lists, q=qs, j=st.integers(0, 12))
def test_dilate_shifts_index(coeffs, q, j):
    p = validate_q(q)
    f = poly_fn(p, coeffs)
    g = dilate(f, j)
    s = dilate(to_sampled(f), j)
    for n in range(0, 40, 3):
        assert g(n) == pytest.approx(f(n + j), abs=1e-12 * (1 + abs(f(n + j))))
        assert s(n) == evaluate(to_sampled(f), n + j)
    assert g(LIMIT) == f(LIMIT)


# delta_bar

def test_delta_bar_examples(p5):
    assert delta_bar(poly_fn(p5, [4])) == poly_fn(p5, [0])
    assert delta_bar(poly_fn(p5, [0, 1])) == poly_fn(p5, [1])
    direct = (1 - 0.0625) / (1 - 0.25)
    assert delta_bar(poly_fn(p5, [0, 0, 1]))(0) == pytest.approx(1.25, abs=1e-15)
    assert direct == pytest.approx(1.25, abs=1e-15)


@given(coeffs=coeff_lists, q=qs)
def test_delta_bar_coefficients_match_difference_quotients(coeffs, q):
    p = validate_q(q)
    f = poly_fn(p, coeffs)
    d = delta_bar(f)
    direct = dq(f, p, 29)
    assert np.max(np.abs(d.values(29) - direct)) <= 1e-10 * (1 + f.tail_coefficient())
    assert d(LIMIT) == (f.coeffs[1] if len(f.coeffs) > 1 else 0.0)


def test_delta_bar_of_sampled_without_slopes(p5):
    f = poly_fn(p5, [1, 2])
    raw = sampled_fn(p5, f.values(12), 1.0, 2.0)
    d = delta_bar(raw)
    assert np.max(np.abs(d.values(12) - 2.0)) < 1e-9
    assert d(LIMIT) == pytest.approx(2.0, abs=1e-9)


def test_delta_bar_not_in_domain(p5):
    # samples oscillate, so the difference quotients are not Cauchy
    vals = [(-1) ** k * p5.point(k) for k in range(30)]
    f = sampled_fn(p5, vals, 0.0, 4.0)
    with pytest.raises(NotInDomain):
        delta_bar(f)


@given(a=coeff_lists, b=coeff_lists, q=qs)
def test_twisted_leibniz(a, b, q):
    p = validate_q(q)
    f, g = poly_fn(p, a), poly_fn(p, b)
    lhs = delta_bar(f * g).values(60)
    rhs = delta_bar(f).values(60) * g.values(60) + dilate(f, 1).values(60) * delta_bar(g).values(60)
    scale = 1 + sup_norm(f).value * sup_norm(g).value * 100
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * scale


@given(coeffs=coeff_lists, q=qs)
def test_dilation_intertwining(coeffs, q):
    p = validate_q(q)
    f = poly_fn(p, coeffs)
    lhs = delta_bar(dilate(f, 1)).values(60)
    rhs = p.q2 * dilate(delta_bar(f), 1).values(60)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * (1 + np.max(np.abs(lhs)))


# i_bar

def test_i_bar_examples(p5):
    assert i_bar(poly_fn(p5, [0])) == poly_fn(p5, [0])
    assert i_bar(poly_fn(p5, [1])) == poly_fn(p5, [0, 1])
    assert i_bar(poly_fn(p5, [0, 1])).coeffs == pytest.approx((0, 0, 0.8), abs=1e-15)


@given(coeffs=coeff_lists, q=qs)
def test_i_bar_matches_series(coeffs, q):
    p = validate_q(q)
    f = poly_fn(p, coeffs)
    ref = series_ibar(f, p, 20)
    assert np.max(np.abs(i_bar(f).values(20) - ref)) <= 1e-12 * (1 + sup_norm(f).value)


def test_i_bar_of_sampled_matches_polynomial(p):
    f = poly_fn(p, [0.7, -1.0, 2.0])
    a = i_bar(to_sampled(f))
    b = i_bar(f)
    n = 40
    assert np.max(np.abs(a.values(n) - b.values(n))) < 1e-12
    assert a(LIMIT) == 0.0


@given(coeffs=coeff_lists, q=qs)
def test_inverse_identities(coeffs, q):
    p = validate_q(q)
    f = poly_fn(p, coeffs)
    nf = sup_norm(f).value
    assert np.max(np.abs(delta_bar(i_bar(f)).values(60) - f.values(60))) <= 1e-10 * (1 + nf)
    back = i_bar(delta_bar(f)).values(60)
    assert np.max(np.abs(back - (f.values(60) - f(LIMIT)))) <= 1e-10 * (1 + nf)


@given(coeffs=coeff_lists, q=qs)
def test_i_bar_contracts_and_is_injective(coeffs, q):
    p = validate_q(q)
    f = poly_fn(p, coeffs)
    nf = sup_norm(f).value
    ni = sup_norm(i_bar(f)).value
    assert ni <= nf + 1e-12
    if nf > 100 * p.tol:
        assert ni > p.tol


def test_inverse_on_sampled_input(p):
    f = to_sampled(poly_fn(p, [0.5, 1.0, -3.0]))
    back = delta_bar(i_bar(f))
    assert np.max(np.abs(back.values(60) - f.values(60))) < 1e-10 * (1 + sup_norm(f).value)


# norms and invertibility

def test_sup_norm_examples(p5):
    assert sup_norm(poly_fn(p5, [-3])).value == 3
    assert sup_norm(poly_fn(p5, [0, 1])).value == 1
    assert sup_norm(poly_fn(p5, [0, 1, -1])).value == pytest.approx(0.1875, abs=1e-16)


def test_sup_norm_matches_scan(p):
    f = poly_fn(p, [0.1, 2.0, -5.0, 1.0])
    s = sup_norm(f)
    brute = max(max(abs(f(k)) for k in range(2000)), abs(f(LIMIT)))
    assert abs(s.value - brute) <= s.error_bound + 1e-15


def test_is_invertible_examples(p5):
    assert is_invertible(poly_fn(p5, [1]))
    r = is_invertible(poly_fn(p5, [0, 1]))
    assert not r and r.witness is LIMIT
    indicator = sampled_fn(p5, [1.0, 0.0], 0.0, 0.0)
    r = is_invertible(indicator)
    assert not r and r.witness == 1


def test_operators(p5):
    x = poly_fn(p5, [0, 1])
    assert (x + 1) == poly_fn(p5, [1, 1])
    assert (1 - x) == poly_fn(p5, [1, -1])
    assert (-x) == poly_fn(p5, [0, -1])
    assert (2 * x)(0) == 2
