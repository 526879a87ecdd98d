"""Defective spots and gauge transformations for connections ``theta = dbar h``.

Sign convention: a spot at ``n`` means the product factor
``1 - f(q^(2n-2)) + f(q^(2n))`` vanishes.  That is the condition which kills
the product solution, and every worked example satisfies it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from qpl import _kernels
from qpl.errors import CapExceeded, DomainError
from qpl.qcore import CertifiedValue, QParam, certified_product, product_terms, tail_log_bound
from qpl.specfun import (
    Polynomial,
    SpectralFunction,
    decrements,
    delta_bar,
    q_geom_sum,
    sampled_fn,
    slope_bound,
)

SIGN_CONVENTION = (
    "sign convention: product-factor vanishing "
    "(spot at n iff 1 - f(q^(2n-2)) + f(q^(2n)) = 0)"
)

_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class ConnectionForm:
    """The connection form ``theta = dbar h`` with ``h`` in C*(1, B_0)."""

    generator: SpectralFunction

    def __post_init__(self):
        delta_bar(self.generator)  # raises NotInDomain

    @property
    def params(self) -> QParam:
        return self.generator.params


@dataclass(frozen=True)
class DefectSet:
    spots: tuple
    scan_bound: int
    certificate: float
    spot_defects: tuple = ()

    def __bool__(self):
        return bool(self.spots)


@dataclass(frozen=True)
class GaugeResult:
    g: SpectralFunction
    invertible: bool
    residual: float
    obstruction: Optional[int] = None
    limit: Optional[CertifiedValue] = None
    notes: tuple = field(default=(SIGN_CONVENTION,))


class GaugeClass(str, enum.Enum):
    STANDARD = "Standard"
    NON_STANDARD = "NonStandard"


@dataclass(frozen=True)
class ClassVerdict:
    verdict: GaugeClass
    defects: DefectSet


def scan_cut(f: SpectralFunction) -> tuple:
    """``(N_cut, M)``: past ``N_cut`` every factor exceeds 1/2, with ``M >= sup |dbar f|``."""
    p = f.params
    M = slope_bound(f)
    if M == 0.0:
        return 1, 0.0
    x = p.grid(p.n_cap)
    hit = np.flatnonzero(M * (1.0 - p.q2) * x < 0.5)
    if not hit.size:
        raise CapExceeded(f"defect scan would exceed n_cap={p.n_cap} (|dbar f| <= {M:.3e})")
    return int(hit[0]) + 1, M


def _decay(p: QParam, M: float) -> float:
    # |f(q^(2k-2)) - f(q^(2k))| <= M (1 - q^2) q^(2k-2) = [M (1 - q^2) / q^2] q^(2k)
    return M * (1.0 - p.q2) / p.q2


def defective_spots(f: SpectralFunction) -> DefectSet:
    """Indices ``n >= 1`` where ``|1 - f(q^(2n-2)) + f(q^(2n))| <= tol``.

    Only ``n <= N_cut`` can qualify: beyond it ``M (1 - q^2) q^(2n-2) < 1/2``.
    """
    p = f.params
    cut, M = scan_cut(f)
    factors = 1.0 - decrements(f, cut)
    idx = np.flatnonzero(np.abs(factors) <= p.tol)
    return DefectSet(
        spots=tuple(int(i) + 1 for i in idx),
        scan_bound=cut,
        certificate=M * (1.0 - p.q2) * p.point(cut - 1),
        spot_defects=tuple(float(abs(factors[i])) for i in idx),
    )


def gauge_residual(
    g: SpectralFunction,
    f: SpectralFunction,
    h: Optional[SpectralFunction] = None,
    upto: Optional[int] = None,
) -> float:
    """``max_k |dbar g - g dbar f + (dbar h) m_{q^2} g|`` at Index ``0..upto``."""
    n = g.scan_depth() if upto is None else upto
    gv = g.values(n + 1)
    r = g.slope_values(n) - gv[:-1] * f.slope_values(n)
    if h is not None:
        r = r + h.slope_values(n) * gv[1:]
    return float(np.max(np.abs(r)))


def _check_g1(g1: float):
    if not math.isfinite(g1) or g1 == 0.0:
        raise DomainError(f"g(1) must be finite and nonzero, got {g1}")


def solve_gauge_to_standard(f: SpectralFunction, g1: float = 1.0, depth: int = 0) -> GaugeResult:
    """Solve ``dbar g = g dbar f`` by ``g(q^(2n)) = g(1) prod_k (1 - f(q^(2k-2)) + f(q^(2k)))``.

    ``depth`` forces at least that many samples in the returned ``g``.
    """
    _check_g1(g1)
    delta_bar(f)
    p = f.params
    cut, M = scan_cut(f)
    C = _decay(p, M)
    K = product_terms(p, C, cut)
    n = max(K, depth)
    drops = decrements(f, n + 1)
    factors = 1.0 - drops
    cert = certified_product(p, factors, C, onset=cut)
    vals, status = _kernels.product_recursion(factors[:n], g1, p.tol)
    w = p.widths(len(vals) - 1)
    snapped = np.abs(factors) <= p.tol
    eff = np.where(snapped, 1.0, drops)
    if status > 0:
        m = status
        slopes = vals * eff[: m + 1] / w
        slopes[-1] = 0.0
        g = sampled_fn(p, vals, 0.0, 0.0, slopes)
        cert = CertifiedValue(0.0, 0.0, vanishing_index=m, terms=cert.terms)
        return GaugeResult(g, False, gauge_residual(g, f), obstruction=m, limit=cert)

    limit = float(vals[-1])
    err = abs(limit) * (math.expm1(tail_log_bound(p, C, n)) + 2 * n * _EPS)
    slopes = vals * eff[: n + 1] / w
    bound = (float(np.max(np.abs(vals))) + err) * M
    g = sampled_fn(p, vals, limit, bound, slopes, limit_error=err)
    return GaugeResult(
        g,
        True,
        gauge_residual(g, f),
        limit=CertifiedValue(limit, err, terms=n),
    )


def solve_gauge_between(f: SpectralFunction, h: SpectralFunction, depth: int = 0) -> GaugeResult:
    """Solve ``dbar g = g dbar f - (dbar h) m_{q^2} g`` by the ratio recursion.

    ``g(q^(2n+2)) [1 - h(q^(2n)) + h(q^(2n+2))] = g(q^(2n)) [1 - f(q^(2n)) + f(q^(2n+2))]``.
    Where both factors vanish the previous value is carried forward.  Where
    only one does, no invertible ``g`` exists; the first such index is the
    obstruction and a nonzero, non-invertible solution is returned.
    """
    if f.params != h.params:
        from qpl.errors import ParamMismatch

        raise ParamMismatch("f and h use different q parameters")
    delta_bar(f)
    delta_bar(h)
    p = f.params
    cut_f, Mf = scan_cut(f)
    cut_h, Mh = scan_cut(h)
    cut = max(cut_f, cut_h)
    # past the cut |den| > 1/2, so |1 - num/den| <= 2 (|drop_f| + |drop_h|)
    C = 2.0 * (_decay(p, Mf) + _decay(p, Mh))
    n = max(product_terms(p, C, cut), depth)
    df = decrements(f, n + 1)
    dh = decrements(h, n + 1)
    num, den = 1.0 - df, 1.0 - dh
    vals, cases, obstruction = _kernels.ratio_recursion(num[:n], den[:n], 1.0, p.tol)

    w = p.widths(n)
    slopes = np.empty(n + 1)
    diff = (vals[:-1] - vals[1:]) / w[:-1]
    is_ratio = cases == _kernels.RATIO
    ratio = np.divide(vals[:-1] * (df[:n] - dh[:n]), den[:n] * w[:-1],
                      out=np.zeros(n), where=is_ratio)
    slopes[:n] = np.where(is_ratio, ratio, diff)
    slopes[n] = vals[n] * (df[n] - dh[n]) / (den[n] * w[n])

    limit = float(vals[-1])
    T = tail_log_bound(p, C, n)
    err = abs(limit) * (math.expm1(T) + 2 * n * _EPS)
    bound = (float(np.max(np.abs(vals))) + err) * (Mf + Mh)
    if limit == 0.0 or bound == 0.0:
        slopes[n] = 0.0
        g = sampled_fn(p, vals, limit, 0.0, slopes)
    else:
        g = sampled_fn(p, vals, limit, bound, slopes, limit_error=err)
    invertible = obstruction < 0
    return GaugeResult(
        g,
        invertible,
        gauge_residual(g, f, h),
        obstruction=None if invertible else int(obstruction),
        limit=CertifiedValue(limit, err, terms=n),
    )


def is_standard_class(f: SpectralFunction) -> ClassVerdict:
    """Gauge-trivial exactly when ``f`` has no defective spot."""
    spots = defective_spots(f)
    verdict = GaugeClass.NON_STANDARD if spots.spots else GaugeClass.STANDARD
    return ClassVerdict(verdict, spots)


def exp_series_g(p: QParam, degree: int) -> Polynomial:
    """Truncated power series solving ``dbar g = g`` with ``g(0) = 1``.

    Coefficients ``a_0 = 1``, ``a_n = a_(n-1) / [n]`` with
    ``[n] = (1 - q^(2n)) / (1 - q^2)``.  The truncation leaves
    ``dbar g - g = -a_degree x^degree``.
    """
    if degree < 0:
        raise DomainError(f"degree must be nonnegative, got {degree}")
    a = [1.0]
    for k in range(1, degree + 1):
        a.append(a[-1] / q_geom_sum(p, k))
    return Polynomial(p, tuple(a))
