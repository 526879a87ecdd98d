"""Text specifications of polynomial elements of C*(1, B_0).

Grammar (whitespace ignored, ``+`` is a left-associative sum)::

    spec  := term ('+' term)*
    term  := 'poly:' num (',' num)*
           | 'defect:' int
           | 'scale:' num ':(' spec ')'

``defect:N`` denotes ``x / (q^(2N-2) - q^(2N))``, whose only defective spot is ``N``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from qpl.errors import DefectTooDeep, DegreeTooHigh, ParseError
from qpl.qcore import QParam
from qpl.specfun import Polynomial, poly_fn

MAX_DEGREE = 64
MAX_DEFECT = 100

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_INT = re.compile(r"\d+")


@dataclass(frozen=True)
class Poly:
    coeffs: tuple


@dataclass(frozen=True)
class Defect:
    N: int


@dataclass(frozen=True)
class Scale:
    alpha: float
    inner: "FnSpec"


Term = Union[Poly, Defect, Scale]


@dataclass(frozen=True)
class FnSpec:
    terms: tuple

    def degree(self) -> int:
        return max(_term_degree(t) for t in self.terms)


def _term_degree(t: Term) -> int:
    if isinstance(t, Poly):
        c = list(t.coeffs)
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        return len(c) - 1
    if isinstance(t, Defect):
        return 1
    return t.inner.degree()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        # drop whitespace but keep original offsets for error positions
        self.pos_map = [i for i, ch in enumerate(text) if not ch.isspace()]
        self.s = "".join(text[i] for i in self.pos_map)
        self.i = 0

    def where(self, i=None) -> int:
        i = self.i if i is None else i
        return self.pos_map[i] if i < len(self.pos_map) else len(self.text)

    def fail(self, msg, i=None, cls=ParseError):
        raise cls(msg, self.where(i))

    def expect(self, lit: str):
        if not self.s.startswith(lit, self.i):
            self.fail(f"expected {lit!r}")
        self.i += len(lit)

    def number(self) -> float:
        m = _NUMBER.match(self.s, self.i)
        if not m:
            self.fail("expected a decimal number")
        value = float(m.group())
        if not math.isfinite(value):
            self.fail("number out of floating-point range")
        self.i = m.end()
        return value

    def spec(self) -> FnSpec:
        terms = [self.term()]
        while self.i < len(self.s) and self.s[self.i] == "+":
            self.i += 1
            terms.append(self.term())
        return FnSpec(tuple(terms))

    def term(self) -> Term:
        start = self.i
        if self.s.startswith("poly:", self.i):
            self.i += 5
            coeffs = [self.number()]
            while self.i < len(self.s) and self.s[self.i] == ",":
                self.i += 1
                coeffs.append(self.number())
            return Poly(tuple(coeffs))
        if self.s.startswith("defect:", self.i):
            self.i += 7
            m = _INT.match(self.s, self.i)
            if not m:
                self.fail("expected a positive integer")
            N = int(m.group())
            if N < 1:
                self.fail("defect index must be at least 1")
            if N > MAX_DEFECT:
                self.fail(f"defect index {N} exceeds {MAX_DEFECT}", cls=DefectTooDeep)
            self.i = m.end()
            return Defect(N)
        if self.s.startswith("scale:", self.i):
            self.i += 6
            alpha = self.number()
            self.expect(":(")
            inner = self.spec()
            self.expect(")")
            return Scale(alpha, inner)
        self.fail("expected 'poly:', 'defect:' or 'scale:'", start)


def parse_fnspec(text: str, max_degree: int = MAX_DEGREE) -> FnSpec:
    """Parse ``text``; raises :class:`ParseError` carrying the offending offset."""
    p = _Parser(text)
    if not p.s:
        raise ParseError("empty function specification", 0)
    spec = p.spec()
    if p.i != len(p.s):
        p.fail(f"unexpected {p.s[p.i]!r}")
    deg = spec.degree()
    if deg > max_degree:
        raise DegreeTooHigh(f"polynomial degree {deg} exceeds {max_degree}", 0)
    return spec


def render(spec: FnSpec) -> str:
    """Inverse of :func:`parse_fnspec`; floats are written with ``repr``."""
    return "+".join(_render_term(t) for t in spec.terms)


def _render_term(t: Term) -> str:
    if isinstance(t, Poly):
        return "poly:" + ",".join(repr(float(c)) for c in t.coeffs)
    if isinstance(t, Defect):
        return f"defect:{t.N}"
    return f"scale:{float(t.alpha)!r}:({render(t.inner)})"


def build(spec: FnSpec, p: QParam) -> Polynomial:
    """The polynomial denoted by ``spec`` at parameter ``p``."""
    total = poly_fn(p, [0.0])
    for t in spec.terms:
        total = total + _build_term(t, p)
    return total


def _build_term(t: Term, p: QParam) -> Polynomial:
    if isinstance(t, Poly):
        return poly_fn(p, t.coeffs)
    if isinstance(t, Defect):
        return poly_fn(p, [0.0, 1.0 / (p.point(t.N - 1) - p.point(t.N))])
    return float(t.alpha) * build(t.inner, p)
