import numpy as np
import pytest
from hypothesis import settings

from qpl.qcore import validate_q
from qpl.specfun import poly_fn

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

QS = (0.3, 0.5, 0.9)


@pytest.fixture(params=QS, ids=lambda q: f"q={q}")
def p(request):
    return validate_q(request.param)


@pytest.fixture
def p5():
    return validate_q(0.5)


def defect_fn(p, N):
    """x / (q^(2N-2) - q^(2N)), the generator whose only spot is N."""
    return poly_fn(p, [0.0, 1.0 / (p.point(N - 1) - p.point(N))])


def random_poly(p, rng, max_degree=20, bound=5.0):
    deg = int(rng.integers(0, max_degree + 1))
    return poly_fn(p, rng.uniform(-bound, bound, size=deg + 1))
