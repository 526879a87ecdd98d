"""Continuous functions on the spectrum ``{0} U {q^(2n)}`` of B_0.

An element of C*(1, B_0) is stored through its image under functional
calculus, either as a polynomial in ``x`` or as a finite table of samples
``v_0..v_N`` followed by a constant tail equal to ``limit``.

Sampled functions may also carry ``slopes``, the values of the q-difference
quotient at ``q^(2k)``.  Constructions that know their own difference
quotient exactly (product solutions, q-integrals) record it there, because
recovering it from the samples divides a rounding error by ``q^(2k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from qpl import _kernels
from qpl.errors import (
    DomainError,
    EmptyCoeffs,
    IndexOverCap,
    NegativeShift,
    NonFinite,
    NotInDomain,
    ParamMismatch,
)
from qpl.qcore import CertifiedValue, QParam, q_geom_sum

_EPS = float(np.finfo(float).eps)


class _Limit:
    """The spectrum point 0, reached as the limit of ``q^(2n)``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "LIMIT"

    def __reduce__(self):
        return (_Limit, ())


LIMIT = _Limit()
SpectrumPoint = Union[int, _Limit]


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _trim(coeffs) -> tuple:
    c = [float(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c)


class SpectralFunction:
    """Common interface of :class:`Polynomial` and :class:`Sampled`."""

    params: QParam

    @property
    def limit(self) -> float:
        raise NotImplementedError

    def values(self, n: int) -> np.ndarray:
        """Values at Index ``0..n``."""
        raise NotImplementedError

    def slope_values(self, n: int) -> np.ndarray:
        """Values of the q-difference quotient at Index ``0..n``."""
        return delta_bar(self).values(n)

    def scan_depth(self) -> int:
        """Index beyond which the function is within ``tol`` of its limit."""
        raise NotImplementedError

    def __call__(self, pt: SpectrumPoint) -> float:
        return evaluate(self, pt)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = poly_fn(self.params, [other])
        return combine("add", self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __neg__(self):
        return combine("scale", self, alpha=-1.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return combine("scale", self, alpha=float(other))
        return combine("mul", self, other)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=True, repr=False)
class Polynomial(SpectralFunction):
    params: QParam
    coeffs: tuple

    def __repr__(self):
        return f"Polynomial(q={self.params.q}, coeffs={list(self.coeffs)})"

    @property
    def limit(self) -> float:
        return self.coeffs[0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def tail_coefficient(self) -> float:
        """``sum_{k>=1} |c_k|``, so that ``|f(x) - f(0)| <= x * tail_coefficient``."""
        return float(sum(abs(c) for c in self.coeffs[1:]))

    def values(self, n: int) -> np.ndarray:
        return _kernels.horner(np.array(self.coeffs), self.params.grid(n))

    def slope_values(self, n: int) -> np.ndarray:
        return delta_bar(self).values(n)

    def depth_for(self, eps: float) -> int:
        """Smallest ``n`` with ``q^(2n) * tail_coefficient < eps`` (capped at n_cap)."""
        S = self.tail_coefficient()
        if S == 0.0:
            return 0
        x = self.params.grid(self.params.n_cap)
        hit = np.flatnonzero(x * S < eps)
        return int(hit[0]) if hit.size else self.params.n_cap

    def scan_depth(self) -> int:
        return self.depth_for(self.params.tol)


@dataclass(frozen=True, eq=False, repr=False)
class Sampled(SpectralFunction):
    """Samples ``v_0..v_N`` then the constant ``limit`` for every index past N.

    ``delta_bound`` bounds ``|delta_bar f|`` on the tail, which certifies
    ``|v_N - limit| <= delta_bound * q^(2N)``.  ``delta_bound == 0`` means the
    tail is exactly constant, so ``v_N == limit``.
    """

    params: QParam
    samples: np.ndarray
    limit_value: float
    delta_bound: float
    slopes: Optional[np.ndarray] = None
    limit_error: float = 0.0

    def __repr__(self):
        return (
            f"Sampled(q={self.params.q}, N={self.N}, limit={self.limit_value!r}, "
            f"delta_bound={self.delta_bound!r})"
        )

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def limit(self) -> float:
        return self.limit_value

    @property
    def exact_tail(self) -> bool:
        return self.delta_bound == 0.0

    def values(self, n: int) -> np.ndarray:
        N = self.N
        if n <= N:
            return self.samples[: n + 1]
        return np.concatenate([self.samples, np.full(n - N, self.limit_value)])

    def slope_values(self, n: int) -> np.ndarray:
        if self.slopes is None:
            return delta_bar(self).values(n)
        N = self.N
        if n <= N:
            return self.slopes[: n + 1]
        tail = 0.0 if self.exact_tail else self.slopes[-1]
        return np.concatenate([self.slopes, np.full(n - N, tail)])

    def scan_depth(self) -> int:
        return self.N

    def tail_deviation(self) -> float:
        return self.delta_bound * self.params.point(self.N + 1)


def poly_fn(p: QParam, coeffs) -> Polynomial:
    """Polynomial element ``sum_k coeffs[k] B_0^k``."""
    coeffs = list(coeffs)
    if not coeffs:
        raise EmptyCoeffs("polynomial needs at least one coefficient")
    if not all(math.isfinite(float(c)) for c in coeffs):
        raise NonFinite("polynomial coefficients must be finite")
    return Polynomial(p, _trim(coeffs))


def sampled_fn(
    p: QParam,
    values,
    limit: float,
    delta_bound: float,
    slopes=None,
    limit_error: float = 0.0,
) -> Sampled:
    """Sampled element with a validated tail certificate."""
    values = _readonly(values)
    if values.ndim != 1 or values.shape[0] == 0:
        raise EmptyCoeffs("sampled function needs at least one value")
    N = values.shape[0] - 1
    if N > p.n_cap:
        raise IndexOverCap(f"{N + 1} samples exceed n_cap={p.n_cap}")
    limit = float(limit)
    delta_bound = float(delta_bound)
    if not (np.all(np.isfinite(values)) and math.isfinite(limit)):
        raise NonFinite("sampled values must be finite")
    if not (math.isfinite(delta_bound) and delta_bound >= 0):
        raise DomainError(f"delta_bound must be finite and >= 0, got {delta_bound}")
    if slopes is not None:
        slopes = _readonly(slopes)
        if slopes.shape != values.shape or not np.all(np.isfinite(slopes)):
            raise DomainError("slopes must be finite and match the samples")
    gap = abs(values[-1] - limit)
    if delta_bound == 0.0:
        if gap != 0.0:
            raise DomainError("exact tail requires the last sample to equal the limit")
    else:
        slack = limit_error + 16 * _EPS * max(abs(values[-1]), abs(limit), 1.0)
        if gap > delta_bound * p.point(N) * (1 + 1e-9) + slack:
            raise DomainError(
                f"tail certificate violated: |v_N - limit| = {gap:.3e} "
                f"> delta_bound * q^(2N) = {delta_bound * p.point(N):.3e}"
            )
    return Sampled(p, values, limit, delta_bound, slopes, float(limit_error))


def evaluate(f: SpectralFunction, pt: SpectrumPoint) -> float:
    """Value of ``f`` at ``q^(2n)`` (``pt = n``) or at 0 (``pt = LIMIT``)."""
    if pt is LIMIT:
        return float(f.limit)
    n = int(pt)
    if n < 0 or n > f.params.n_cap:
        raise IndexOverCap(f"spectrum index {n} outside 0..{f.params.n_cap}")
    if isinstance(f, Polynomial):
        x = f.params.grid(n)[n:]
        return float(_kernels.horner(np.array(f.coeffs), x)[0])
    if n <= f.N:
        return float(f.samples[n])
    return float(f.limit)


def _check_params(f, g):
    if f.params != g.params:
        raise ParamMismatch(f"q parameters differ: {f.params} vs {g.params}")


def to_sampled(f: SpectralFunction, n: Optional[int] = None) -> Sampled:
    """Materialise ``f`` with at least ``n + 1`` samples."""
    p = f.params
    if isinstance(f, Sampled):
        if n is None or n <= f.N:
            return f
        tail_slope = 0.0 if f.exact_tail or f.slopes is None else f.slopes[-1]
        slopes = None
        if f.slopes is not None:
            slopes = np.concatenate([f.slopes, np.full(n - f.N, tail_slope)])
        vals = f.values(n)
        if f.exact_tail:
            return sampled_fn(p, vals, f.limit, 0.0, slopes)
        # padding with the limit keeps |v_n - limit| = 0
        return Sampled(p, _readonly(vals), f.limit, f.delta_bound,
                       None if slopes is None else _readonly(slopes), f.limit_error)
    depth = max(f.depth_for(p.prod_tol), n or 0)
    if f.degree == 0:
        return sampled_fn(p, np.full(depth + 1, f.limit), f.limit, 0.0, np.zeros(depth + 1))
    d = delta_bar(f)
    bound = float(sum(abs(c) for c in d.coeffs))
    return sampled_fn(p, f.values(depth), f.limit, bound, d.values(depth),
                      limit_error=f.tail_coefficient() * p.point(depth))


def combine(op: str, f: SpectralFunction, g: Optional[SpectralFunction] = None,
            alpha: Optional[float] = None) -> SpectralFunction:
    """Pointwise ``add``, ``mul`` or ``scale`` (by ``alpha``, ``g`` unused)."""
    if op == "scale":
        if alpha is None or not math.isfinite(alpha):
            raise NonFinite("scale needs a finite alpha")
        if isinstance(f, Polynomial):
            return Polynomial(f.params, _trim(alpha * c for c in f.coeffs))
        slopes = None if f.slopes is None else alpha * f.slopes
        return Sampled(f.params, _readonly(alpha * f.samples), alpha * f.limit,
                       abs(alpha) * f.delta_bound,
                       None if slopes is None else _readonly(slopes),
                       abs(alpha) * f.limit_error)
    if op not in ("add", "mul"):
        raise DomainError(f"unknown combine op {op!r}")
    if g is None:
        raise DomainError(f"{op} needs two operands")
    _check_params(f, g)
    p = f.params
    if isinstance(f, Polynomial) and isinstance(g, Polynomial):
        a, b = np.array(f.coeffs), np.array(g.coeffs)
        if op == "add":
            out = np.zeros(max(a.size, b.size))
            out[: a.size] += a
            out[: b.size] += b
        else:
            out = np.convolve(a, b)
        return Polynomial(p, _trim(out))

    N = max(_depth(f), _depth(g))
    fs, gs = to_sampled(f, N), to_sampled(g, N)
    fv, gv = fs.values(N), gs.values(N)
    have_slopes = fs.slopes is not None and gs.slopes is not None
    exact = fs.exact_tail and gs.exact_tail
    if op == "add":
        vals = fv + gv
        limit = fs.limit + gs.limit
        bound = fs.delta_bound + gs.delta_bound
        slopes = fs.slope_values(N) + gs.slope_values(N) if have_slopes else None
        err = fs.limit_error + gs.limit_error
    else:
        vals = fv * gv
        limit = fs.limit * gs.limit
        sf, sg = sup_norm(fs).value, sup_norm(gs).value
        bound = fs.delta_bound * sg + sf * gs.delta_bound
        slopes = None
        if have_slopes:
            # q-Leibniz: dbar(fg)(x) = dbar f(x) g(x) + f(q^2 x) dbar g(x)
            f_next = fs.values(N + 1)[1:]
            slopes = fs.slope_values(N) * gv + f_next * gs.slope_values(N)
        err = fs.limit_error * abs(gs.limit) + abs(fs.limit) * gs.limit_error
    if exact:
        return sampled_fn(p, vals, limit, 0.0, slopes)
    if bound == 0.0:
        bound = float(np.finfo(float).tiny)
    return Sampled(p, _readonly(vals), limit, bound,
                   None if slopes is None else _readonly(slopes), err)


def _depth(f: SpectralFunction) -> int:
    if isinstance(f, Polynomial):
        return f.depth_for(f.params.prod_tol)
    return f.N


def dilate(f: SpectralFunction, j: int) -> SpectralFunction:
    """``m_{q^(2j)} f``: the function ``x -> f(q^(2j) x)``."""
    if j < 0:
        raise NegativeShift(f"only contracting dilations are bounded, got j={j}")
    if j == 0:
        return f
    p = f.params
    c = p.point(j)
    if isinstance(f, Polynomial):
        return Polynomial(p, _trim(ck * c**k for k, ck in enumerate(f.coeffs)))
    N = f.N
    if j <= N:
        vals = f.samples[j:]
        slopes = None if f.slopes is None else c * f.slopes[j:]
    else:
        vals = np.array([f.limit])
        slopes = None if f.slopes is None else c * f.slope_values(j)[j:]
    return Sampled(p, _readonly(vals), f.limit, f.delta_bound,
                   None if slopes is None else _readonly(slopes), f.limit_error)


def delta_bar(f: SpectralFunction) -> SpectralFunction:
    """The q-difference quotient ``(f(x) - f(q^2 x)) / (x - q^2 x)``.

    Polynomials map coefficientwise.  For sampled input the value at 0 is the
    quotient at the last stored index; ``NotInDomain`` is raised when the
    last two quotients differ by more than ``tol``.
    """
    p = f.params
    if isinstance(f, Polynomial):
        if f.degree == 0:
            return Polynomial(p, (0.0,))
        new = [ck * q_geom_sum(p, k) for k, ck in enumerate(f.coeffs) if k > 0]
        return Polynomial(p, _trim(new))

    N = f.N
    if f.slopes is not None:
        d = np.array(f.slopes)
    elif f.exact_tail:
        nxt = np.append(f.samples[1:], f.limit)
        d = (f.samples - nxt) / p.widths(N)
    else:
        # the certified tail is only approximately constant: use quotients
        # between stored samples and take the deepest as the value at 0
        if N < 1:
            raise NotInDomain("a single sample does not determine a difference quotient")
        d = -np.diff(f.samples) / p.widths(N - 1)
        N -= 1
    if f.exact_tail:
        if d[-1] != 0.0:
            d[-1] = 0.0  # slopes table may carry rounding at the frozen tail
        return sampled_fn(p, d, 0.0, 0.0)
    cauchy = abs(d[-1] - d[-2]) if N >= 1 else 0.0
    if cauchy > p.tol:
        raise NotInDomain(
            f"difference quotients not Cauchy at index {N}: defect {cauchy:.3e} > tol {p.tol:.1e}"
        )
    bound = cauchy / p.widths(N)[N - 1] if N >= 1 else 0.0
    bound = max(bound, float(np.finfo(float).tiny))
    return Sampled(p, _readonly(d), float(d[-1]), bound, None, cauchy)


def i_bar(f: SpectralFunction) -> SpectralFunction:
    """The q-integral, right inverse of :func:`delta_bar` vanishing at 0."""
    p = f.params
    if isinstance(f, Polynomial):
        new = [0.0] + [ck / q_geom_sum(p, k + 1) for k, ck in enumerate(f.coeffs)]
        return Polynomial(p, _trim(new))

    N = f.N
    sums = _kernels.q_integral_sums(f.samples, f.limit, p.q2)
    head = (1.0 - p.q2) * p.grid(N) * sums
    if f.exact_tail and f.limit == 0.0:
        return sampled_fn(p, head, 0.0, 0.0, f.samples)
    sup = sup_norm(f).value
    if f.limit == 0.0:
        depth = N
    else:
        x = p.grid(p.n_cap)
        hit = np.flatnonzero(x[N:] * abs(f.limit) <= p.prod_tol)
        depth = N + int(hit[0]) if hit.size else p.n_cap
    tail = p.grid(depth)[N + 1:] * f.limit
    vals = np.concatenate([head, tail])
    bound = max(sup, float(np.finfo(float).tiny))
    return Sampled(p, _readonly(vals), 0.0, bound, _readonly(f.values(depth)),
                   abs(f.limit) * p.point(depth + 1))


def sup_norm(f: SpectralFunction) -> CertifiedValue:
    """Supremum of ``|f|`` over the spectrum, with the unscanned-tail bound."""
    if isinstance(f, Polynomial):
        n = f.scan_depth()
        vals = f.values(n)
        value = max(float(np.max(np.abs(vals))), abs(f.limit))
        return CertifiedValue(value, f.tail_coefficient() * f.params.point(n), terms=n)
    value = max(float(np.max(np.abs(f.samples))), abs(f.limit))
    return CertifiedValue(value, f.tail_deviation() + f.limit_error, terms=f.N)


@dataclass(frozen=True)
class Invertibility:
    invertible: bool
    witness: Optional[SpectrumPoint] = None

    def __bool__(self):
        return self.invertible


def is_invertible(f: SpectralFunction) -> Invertibility:
    """``f`` is invertible iff it stays more than ``tol`` away from 0 on the spectrum.

    Past the scan depth a polynomial is within ``tol`` of its value at 0, so
    a vanishing there is reported at ``LIMIT``.
    """
    tol = f.params.tol
    if isinstance(f, Polynomial):
        n = f.scan_depth()
        vals = f.values(n)[:n]
    else:
        vals = f.samples
    small = np.flatnonzero(np.abs(vals) <= tol)
    if small.size:
        return Invertibility(False, int(small[0]))
    if abs(f.limit) <= tol:
        return Invertibility(False, LIMIT)
    return Invertibility(True)


def decrements(f: SpectralFunction, n: int) -> np.ndarray:
    """``f(q^(2k-2)) - f(q^(2k))`` for ``k = 1..n``, computed as width times slope."""
    if n <= 0:
        return np.zeros(0)
    p = f.params
    return p.widths(n - 1) * f.slope_values(n - 1)


def slope_bound(f: SpectralFunction) -> float:
    """Upper bound on ``sup |delta_bar f|`` over the whole spectrum."""
    if isinstance(f, Polynomial):
        d = delta_bar(f)
        s = sup_norm(d)
        return s.value + s.error_bound
    d = f.slope_values(f.N)
    return max(float(np.max(np.abs(d))), f.delta_bound)
