"""Holomorphic sections ``f B_-^n`` of the line bundle ``L_0`` with connection ``theta = dbar h``."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from qpl import _kernels
from qpl.errors import DivergentSection, DomainError
from qpl.gauge import (
    SIGN_CONVENTION,
    ConnectionForm,
    DefectSet,
    _decay,
    defective_spots,
    scan_cut,
    solve_gauge_to_standard,
)
from qpl.specfun import SpectralFunction, decrements, delta_bar, q_geom_sum, sampled_fn, sup_norm

Connection = Union[ConnectionForm, SpectralFunction]


@dataclass(frozen=True)
class HolomorphicSection:
    n: int
    f: SpectralFunction
    residual: float

    @property
    def first_zero_index(self) -> Optional[int]:
        """First Index where ``f`` is exactly zero, or ``None``."""
        z = np.flatnonzero(self.f.values(self.f.scan_depth()) == 0.0)
        return int(z[0]) if z.size else None


@dataclass(frozen=True)
class KernelReport:
    sections: tuple
    dim_lower_bound: int
    defects: DefectSet
    independence_rank: Optional[int] = None
    notes: tuple = field(default=())


def _generator(h: Connection) -> SpectralFunction:
    return h.generator if isinstance(h, ConnectionForm) else h


def coefficient_values(h: Connection, n: int, f: SpectralFunction, upto: int) -> np.ndarray:
    """Pointwise coefficient of ``nabla_theta(f B_-^n)`` at Index ``0..upto``.

    ``q^(2n) x dbar f(x) + [n] f(x) - q^(2n) x dbar h(q^(2n) x) f(x)`` with
    ``[n] = (1 - q^(2n)) / (1 - q^2)``.
    """
    hg = _generator(h)
    p = hg.params
    x = p.grid(upto)
    xn = p.point(n)
    fv = f.values(upto)
    dh = hg.slope_values(upto + n)[n:]
    return xn * x * f.slope_values(upto) + q_geom_sum(p, n) * fv - xn * x * dh * fv


def section_residual(h: Connection, s: HolomorphicSection) -> float:
    """Max of the coefficient over the scanned indices, relative to ``sup |f|``."""
    f = s.f
    n = f.scan_depth()
    r = float(np.max(np.abs(coefficient_values(h, s.n, f, n))))
    scale = sup_norm(f).value
    return r / scale if scale > 0 else r


def section_for(h: Connection, n: int, defects: Optional[DefectSet] = None) -> HolomorphicSection:
    """Section ``f B_-^n`` with ``f(1) = 1`` built by

    ``f(q^(2m)) = f(q^(2m-2)) (1 - h(q^(2n+2m-2)) + h(q^(2n+2m))) / q^(2n)``.

    Raises :class:`DivergentSection` when no spot lies above ``n`` and
    ``n >= 1``: every step then multiplies by at least ``(1 - eps) / q^(2n)``.
    """
    hg = _generator(h)
    delta_bar(hg)
    if n < 0:
        raise DomainError(f"section power must be nonnegative, got {n}")
    p = hg.params
    defects = defective_spots(hg) if defects is None else defects
    above = [s for s in defects.spots if s > n]
    if not above:
        if n == 0:
            g = solve_gauge_to_standard(hg).g
            sec = HolomorphicSection(0, g, 0.0)
            return HolomorphicSection(0, g, section_residual(hg, sec))
        cut, M = scan_cut(hg)
        start = max(cut, n + 1)
        growth = (1.0 - _decay(p, M) * p.point(start)) / p.point(n)
        raise DivergentSection(
            f"section with B_-^{n} diverges: no defective spot above {n}, "
            f"per-step growth >= {growth:.6g} past index {start - n}"
        )

    stop = above[0]
    xn = p.point(n)
    drops = decrements(hg, stop)[n:]
    factors = 1.0 - drops
    factors[-1] = 0.0  # the spot itself; within tol by construction
    vals, status = _kernels.product_recursion(factors / xn, 1.0, 0.0)
    m = stop - n
    if status != m:
        # an earlier near-zero step would have been a spot
        raise DomainError(f"section recursion for n={n} vanished at step {status}, expected {m}")
    w = p.widths(m - 1)
    eff = drops.copy()
    eff[-1] = 1.0
    slopes = np.zeros(m + 1)
    slopes[:m] = vals[:m] * (eff - (1.0 - xn)) / (xn * w)
    f = sampled_fn(p, vals, 0.0, 0.0, slopes)
    sec = HolomorphicSection(n, f, 0.0)
    return HolomorphicSection(n, f, section_residual(hg, sec))


def kernel_sections(h: Connection) -> KernelReport:
    """One section per ``n = 0..max(S_h) - 1``, or the single ``n = 0`` section."""
    hg = _generator(h)
    delta_bar(hg)
    defects = defective_spots(hg)
    top = max(defects.spots) if defects.spots else 1
    sections = tuple(section_for(hg, n, defects) for n in range(top))
    notes = [SIGN_CONVENTION, "dim_lower_bound is a lower bound on dim ker"]
    if len(defects.spots) > 1:
        notes.append(
            f"multiple defective spots {list(defects.spots)}: section n uses the first spot above n"
        )
    return KernelReport(sections, len(sections), defects, None, tuple(notes))


def kernel_dim_lower_bound(h: Connection) -> int:
    spots = defective_spots(_generator(h)).spots
    return max(spots) if spots else 1
