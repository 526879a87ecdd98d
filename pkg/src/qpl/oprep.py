"""Truncated l^2 matrices of B_0, B_+, B_- and of functions of B_0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from qpl.errors import DimOutOfRange, DimTooSmall, ZeroAtTop
from qpl.qcore import QParam
from qpl.specfun import SpectralFunction, delta_bar, dilate, poly_fn, q_geom_sum, sup_norm

MAX_DIM = 4096

REL_MINUS_ZERO = "B_- B_0 = q^2 B_0 B_-"
REL_PLUS_ZERO = "B_+ B_0 = q^-2 B_0 B_+"
REL_MINUS_PLUS = "B_- B_+ = q^2 B_0 (1 - q^2 B_0)"
REL_PLUS_MINUS = "B_+ B_- = B_0 (1 - B_0)"
REL_ADJOINT = "B_+^T = B_-"
REL_DILATION = "B_- f = (m_{q^2} f) B_-"
REL_DILATION_2 = "B_-^2 f = (m_{q^4} f) B_-^2"


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    dim: int
    entries: np.ndarray
    label: str = ""

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        return TruncatedOperator(self.dim, self.entries @ other.entries,
                                 f"{self.label} {other.label}".strip())


@dataclass(frozen=True, eq=False)
class Generators:
    B0: TruncatedOperator
    Bminus: TruncatedOperator
    Bplus: TruncatedOperator


def _check_dim(D: int, low: int = 1):
    if int(D) != D or not low <= D <= MAX_DIM:
        raise DimOutOfRange(f"dimension must be an integer in {low}..{MAX_DIM}, got {D}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def rep_generators(p: QParam, D: int) -> Generators:
    """``B_0 e_n = q^(2n) e_n``, ``B_- e_n = q^n sqrt(1 - q^(2n)) e_(n-1)``,
    ``B_+ e_n = q^(n+1) sqrt(1 - q^(2n+2)) e_(n+1)``, cut to ``span(e_0..e_(D-1))``."""
    _check_dim(D)
    if D > p.n_cap:
        raise DimOutOfRange(f"dimension {D} exceeds n_cap={p.n_cap}")
    x = p.grid(D)
    n = np.arange(D)
    # q^n sqrt(1 - q^(2n)) = sqrt(q^(2n) (1 - q^(2n)))
    hop = np.sqrt(x[1:D] * (1.0 - x[1:D]))
    b0 = np.diag(x[:D].copy())
    bm = np.zeros((D, D))
    bm[n[:-1], n[1:]] = hop
    bp = np.zeros((D, D))
    bp[n[1:], n[:-1]] = hop
    return Generators(
        TruncatedOperator(D, _frozen(b0), "B_0"),
        TruncatedOperator(D, _frozen(bm), "B_-"),
        TruncatedOperator(D, _frozen(bp), "B_+"),
    )


def rep_function(f: SpectralFunction, D: int) -> TruncatedOperator:
    """``pi(f) = diag(f(1), f(q^2), ..., f(q^(2D-2)))``."""
    _check_dim(D)
    if D - 1 > f.params.n_cap:
        raise DimOutOfRange(f"dimension {D} exceeds n_cap={f.params.n_cap}")
    return TruncatedOperator(D, _frozen(np.diag(f.values(D - 1).copy())), "f(B_0)")


def _interior(m: np.ndarray) -> float:
    return float(np.max(np.abs(m[:, :-1])))


def relation_residuals(p: QParam, D: int, f: Optional[SpectralFunction] = None) -> dict:
    """Max-abs entry of ``LHS - RHS`` on columns ``0..D-2`` for each relation.

    ``f`` (default ``x^2``) is the function used in the dilation identities.
    """
    _check_dim(D, 3)
    g = rep_generators(p, D)
    B0, Bm, Bp = g.B0.entries, g.Bminus.entries, g.Bplus.entries
    eye = np.eye(D)
    q2 = p.q2
    f = poly_fn(p, [0.0, 0.0, 1.0]) if f is None else f
    F = rep_function(f, D).entries
    F1 = rep_function(dilate(f, 1), D).entries
    F2 = rep_function(dilate(f, 2), D).entries
    Bm2 = Bm @ Bm
    return {
        REL_MINUS_ZERO: _interior(Bm @ B0 - q2 * B0 @ Bm),
        REL_PLUS_ZERO: _interior(Bp @ B0 - B0 @ Bp / q2),
        REL_MINUS_PLUS: _interior(Bm @ Bp - q2 * B0 @ (eye - q2 * B0)),
        REL_PLUS_MINUS: _interior(Bp @ Bm - B0 @ (eye - B0)),
        REL_ADJOINT: _interior(Bp.T - Bm),
        REL_DILATION: _interior(Bm @ F - F1 @ Bm),
        REL_DILATION_2: _interior(Bm2 @ F - F2 @ Bm2),
    }


def boundary_defect(p: QParam, D: int) -> float:
    """Column ``D-1`` defect of ``B_- B_+ = q^2 B_0 (1 - q^2 B_0)`` (the dropped ``e_D`` round trip)."""
    _check_dim(D, 2)
    g = rep_generators(p, D)
    B0, Bm, Bp = g.B0.entries, g.Bminus.entries, g.Bplus.entries
    lhs = Bm @ Bp
    rhs = p.q2 * B0 @ (np.eye(D) - p.q2 * B0)
    return float(np.max(np.abs((lhs - rhs)[:, -1])))


def section_matrix(f: SpectralFunction, n: int, D: int) -> np.ndarray:
    """``pi(f) pi(B_-)^n``."""
    Bm = rep_generators(f.params, D).Bminus.entries
    return rep_function(f, D).entries @ np.linalg.matrix_power(Bm, n)


def independence_rank(sections: Sequence, p: QParam, D: int) -> int:
    """Numerical rank of the flattened ``pi(f_i) pi(B_-)^(n_i)``.

    Each row is scaled to unit max-abs entry; singular values below
    ``tol * sigma_max`` are discarded.
    """
    sections = list(sections)
    if not sections:
        return 0
    top = max(s.n for s in sections)
    if D <= top + 2:
        raise DimTooSmall(f"dimension {D} must exceed max section power {top} + 2")
    _check_dim(D)
    rows = []
    for s in sections:
        if s.f(0) == 0.0:
            raise ZeroAtTop(f"section n={s.n} has f(1) = 0")
        row = section_matrix(s.f, s.n, D).ravel()
        peak = np.max(np.abs(row))
        rows.append(row / peak if peak > 0 else row)
    sv = np.linalg.svd(np.vstack(rows), compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > p.tol * sv[0]))


def section_residual_matrix(h: SpectralFunction, s, D: int) -> float:
    """Interior max of ``pi(coefficient of nabla_theta(f B_-^n))``, relative to ``sup |f|``.

    Evaluates ``q^(2n) B_0 dbar f + [n] f - q^(2n) (m_{q^(2n)} dbar h) B_0 f``
    as diagonal matrices.
    """
    if hasattr(h, "generator"):
        h = h.generator
    p = h.params
    n, f = s.n, s.f
    B0 = rep_generators(p, D).B0.entries
    xn = p.point(n)
    F = rep_function(f, D).entries
    dF = rep_function(delta_bar(f), D).entries
    dH = rep_function(dilate(delta_bar(h), n), D).entries
    coeff = xn * B0 @ dF + q_geom_sum(p, n) * F - xn * dH @ B0 @ F
    scale = sup_norm(f).value
    r = _interior(coeff)
    return r / scale if scale > 0 else r
