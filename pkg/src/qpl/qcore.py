"""Deformation parameter, spectrum grid and certified infinite products."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

from qpl.errors import CapExceeded, DomainError, NoDecayCertificate, NonFinite, QOutOfRange

DEFAULT_TOL = 1e-9
DEFAULT_PROD_TOL = 1e-12
DEFAULT_N_CAP = 10_000
Q_MAX = 0.99

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class QParam:
    """Deformation parameter ``0 < q < 1`` together with the numeric policy.

    ``q2`` is computed once; every spectrum point ``q^(2n)`` used anywhere in
    the package is read from :meth:`grid`, so two code paths that evaluate a
    function at the same index see bit-identical abscissae.
    """

    q: float
    tol: float = DEFAULT_TOL
    prod_tol: float = DEFAULT_PROD_TOL
    n_cap: int = DEFAULT_N_CAP
    q2: float = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "q2", self.q * self.q)

    def point(self, n: int) -> float:
        return float(self.grid(n)[n])

    def grid(self, n: int) -> np.ndarray:
        """Spectrum points ``q^(2k)`` for ``k = 0..n`` (read-only)."""
        if n < 0:
            raise DomainError(f"negative spectrum index {n}")
        if n > self.n_cap + 1:
            raise CapExceeded(f"index {n} exceeds n_cap={self.n_cap}")
        return _grid(self.q2, self.n_cap)[: n + 1]

    def widths(self, n: int) -> np.ndarray:
        """Gaps ``q^(2k) - q^(2k+2)`` for ``k = 0..n``."""
        x = self.grid(n + 1)
        return x[:-1] - x[1:]


@lru_cache(maxsize=32)
def _grid(q2: float, n_cap: int) -> np.ndarray:
    # python pow rather than np.power so point() and grid() agree bitwise
    x = np.array([q2**k for k in range(n_cap + 3)], dtype=float)
    x.flags.writeable = False
    return x


@dataclass(frozen=True)
class CertifiedValue:
    value: float
    error_bound: float
    vanishing_index: Optional[int] = None
    terms: int = 0


def validate_q(
    q: float,
    *,
    tol: Optional[float] = None,
    prod_tol: Optional[float] = None,
    n_cap: Optional[int] = None,
) -> QParam:
    """Build a :class:`QParam`, rejecting values outside ``(0, 0.99]``.

    ``q > 0.99`` is accepted only when ``n_cap`` is raised far enough that
    ``q^(2 n_cap)`` is no larger than ``0.99^(2 * 10000)``.
    """
    q = float(q)
    if not math.isfinite(q):
        raise NonFinite(f"q must be finite, got {q}")
    if not 0.0 < q < 1.0:
        raise QOutOfRange(f"q must lie in (0, 1), got {q}")
    if n_cap is not None and (int(n_cap) != n_cap or n_cap < 1):
        raise DomainError(f"n_cap must be a positive integer, got {n_cap}")
    if q > Q_MAX:
        needed = math.ceil(DEFAULT_N_CAP * math.log(Q_MAX) / math.log(q))
        if n_cap is None or n_cap < needed:
            raise QOutOfRange(f"q={q} > {Q_MAX} requires n_cap >= {needed}")
    for name, value in (("tol", tol), ("prod_tol", prod_tol)):
        if value is not None and not (math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be a positive finite number, got {value}")
    return QParam(
        q=q,
        tol=DEFAULT_TOL if tol is None else float(tol),
        prod_tol=DEFAULT_PROD_TOL if prod_tol is None else float(prod_tol),
        n_cap=DEFAULT_N_CAP if n_cap is None else int(n_cap),
    )


def q_geom_sum(p: QParam, n: int) -> float:
    """``sum_{k<n} q^(2k)`` in closed form, ``(1 - q^(2n)) / (1 - q^2)``."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    return (1.0 - p.q2**n) / (1.0 - p.q2)


Factors = Union[Callable[[int], float], Sequence[float], np.ndarray]


def tail_log_bound(p: QParam, decay: float, K: int) -> float:
    """Bound on ``sum_{k>K} |log factor_k|`` given ``|1 - factor_k| <= decay q^(2k)``.

    Uses ``|log(1-u)| <= 2|u|`` for ``|u| <= 1/2``.
    """
    return 2.0 * decay * p.q2 ** (K + 1) / (1.0 - p.q2)


def product_terms(p: QParam, decay: Optional[float], onset: int = 1) -> int:
    """Smallest ``K >= onset`` whose tail log-sum bound is below ``prod_tol``."""
    if decay is None:
        raise NoDecayCertificate("certified_product needs a decay constant")
    if not (math.isfinite(decay) and decay >= 0):
        raise NoDecayCertificate(f"invalid decay constant {decay}")
    K = max(int(onset), 1)
    while tail_log_bound(p, decay, K) >= p.prod_tol or decay * p.q2 ** (K + 1) > 0.5:
        K += 1
        if K > p.n_cap:
            raise CapExceeded(f"product needs more than n_cap={p.n_cap} factors")
    return K


def certified_product(
    p: QParam, factors: Factors, decay: Optional[float], onset: int = 1
) -> CertifiedValue:
    """Evaluate ``prod_{k>=1} factor_k`` with a rigorous tail bound.

    ``factors`` is either a callable ``k -> factor_k`` (``k >= 1``) or a
    sequence whose entry ``k-1`` is ``factor_k``.  ``decay`` is the constant
    ``C`` with ``|1 - factor_k| <= C q^(2k)`` for all ``k > onset``.
    """
    K = product_terms(p, decay, onset)

    if callable(factors):
        vals = np.array([factors(k) for k in range(1, K + 1)], dtype=float)
    else:
        if len(factors) < K:
            raise CapExceeded(f"need {K} factors, sequence has {len(factors)}")
        vals = np.asarray(factors[:K], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFinite("non-finite product factor")

    zero = np.flatnonzero(np.abs(vals) <= p.tol)
    if zero.size:
        return CertifiedValue(0.0, 0.0, vanishing_index=int(zero[0]) + 1, terms=K)
    value = float(np.prod(vals))
    T = tail_log_bound(p, decay, K)
    err = abs(value) * (math.expm1(T) + 2 * K * _EPS)
    return CertifiedValue(value, err, terms=K)
