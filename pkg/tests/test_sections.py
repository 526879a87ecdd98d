import numpy as np
import pytest

from qpl.errors import DivergentSection
from qpl.gauge import ConnectionForm, defective_spots, solve_gauge_to_standard
from qpl.qcore import validate_q
from qpl.sections import (
    HolomorphicSection,
    kernel_dim_lower_bound,
    kernel_sections,
    section_for,
    section_residual,
)
from qpl.specfun import LIMIT, evaluate, poly_fn, sup_norm

from conftest import defect_fn


def telescoped_residual(h, n, f, p, upto=80):
    """[f_k (1 - h(q^(2k+2n)) + h(q^(2k+2n+2))) - q^(2n) f_(k+1)] / (1 - q^2), from point values."""
    xn = p.point(n)
    r = [
        (evaluate(f, k) * (1 - evaluate(h, k + n) + evaluate(h, k + n + 1)) - xn * evaluate(f, k + 1))
        / (1 - p.q2)
        for k in range(upto)
    ]
    return max(abs(v) for v in r) / sup_norm(f).value


def two_spot_generator(p, s1, s2):
    """a x + b x^2 with defective spots at s1 and s2."""
    def row(s):
        u, v = p.point(s - 1), p.point(s)
        return [u - v, u * u - v * v]

    a, b = np.linalg.solve(np.array([row(s1), row(s2)]), np.ones(2))
    return poly_fn(p, [0.0, a, b])


def test_residual_examples(p):
    zero = poly_fn(p, [0])
    assert section_residual(zero, HolomorphicSection(0, poly_fn(p, [3.0]), 0.0)) == 0.0
    assert section_residual(zero, HolomorphicSection(1, poly_fn(p, [1.0]), 0.0)) == pytest.approx(1.0, abs=1e-15)


def test_zero_connection_single_section(p):
    rep = kernel_sections(ConnectionForm(poly_fn(p, [0])))
    assert rep.dim_lower_bound == 1 and len(rep.sections) == 1
    s = rep.sections[0]
    assert s.n == 0 and all(s.f(k) == 1.0 for k in range(10)) and s.f(LIMIT) == 1.0


def test_indicator_section(p):
    rep = kernel_sections(poly_fn(p, [0, 1 / (1 - p.q2)]))
    assert len(rep.sections) == 1
    f = rep.sections[0].f
    assert f(0) == 1.0 and all(f(k) == 0.0 for k in range(1, 20)) and f(LIMIT) == 0.0


@pytest.mark.parametrize("N", range(1, 9))
def test_single_spot_family(p, N):
    h = defect_fn(p, N)
    rep = kernel_sections(h)
    assert rep.dim_lower_bound == N == kernel_dim_lower_bound(h)
    assert [s.n for s in rep.sections] == list(range(N))
    for s in rep.sections:
        assert s.f(0) == 1.0
        assert s.residual <= 1e-9
        assert abs(section_residual(h, s) - s.residual) == 0.0
        assert telescoped_residual(h, s.n, s.f, p) <= 1e-9
        assert all(s.f(m) != 0.0 for m in range(N - s.n))
        assert all(s.f(m) == 0.0 for m in range(N - s.n, N - s.n + 20))
        assert s.first_zero_index == N - s.n
        assert s.f(LIMIT) == 0.0


def test_section_values_follow_recursion():
    p = validate_q(0.5)
    h = defect_fn(p, 5)
    for n in range(5):
        f = section_for(h, n).f
        acc = 1.0
        for m in range(1, 5 - n):
            acc *= (1 - h(n + m - 1) + h(n + m)) / p.point(n)
            assert f(m) == pytest.approx(acc, rel=1e-13)


def test_divergence_guard(p):
    h = defect_fn(p, 3)
    for n in (3, 4, 7):
        with pytest.raises(DivergentSection):
            section_for(h, n)
    with pytest.raises(DivergentSection):
        section_for(poly_fn(p, [0, 1]), 1)


def test_gauge_covariance_at_zero(p):
    h = poly_fn(p, [0.3, 1.0, -0.4])
    assert not defective_spots(h).spots
    s = kernel_sections(h).sections[0]
    g = solve_gauge_to_standard(h).g
    for k in range(80):
        assert s.f(k) / s.f(0) == pytest.approx(g(k) / g(0), abs=1e-10)
    assert s.residual <= 1e-9


def test_kernel_dim_examples():
    p = validate_q(0.5)
    assert kernel_dim_lower_bound(poly_fn(p, [0])) == 1
    assert kernel_dim_lower_bound(defect_fn(p, 4)) == 4
    assert kernel_dim_lower_bound(poly_fn(p, [0.1, 0.2, -0.1])) == 1


def test_multi_spot_generator(p):
    h = two_spot_generator(p, 2, 5)
    assert defective_spots(h).spots == (2, 5)
    rep = kernel_sections(h)
    assert [s.n for s in rep.sections] == [0, 1, 2, 3, 4]
    assert [s.first_zero_index for s in rep.sections] == [2, 1, 3, 2, 1]
    assert all(s.residual <= 1e-9 for s in rep.sections)
    assert any("multiple defective spots" in note for note in rep.notes)
