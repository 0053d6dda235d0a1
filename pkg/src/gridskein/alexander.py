"""Laurent polynomials, grid Euler characteristics and a Fox-calculus oracle.

Exponents are stored doubled so that ``t^(1/2)`` is exact.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import sympy

from .grid import GradingCalculator, GridDiagram, LinkStructure, enumerate_states


@dataclass(frozen=True)
class LaurentPoly:
    """Finitely supported map from doubled exponent to integer coefficient."""

    terms: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_dict(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        return cls(tuple(sorted((e, c) for e, c in coeffs.items() if c != 0)))

    @classmethod
    def from_exponents(cls, coeffs: dict[int, int]) -> "LaurentPoly":
        """Build from ordinary (undoubled) integer exponents."""
        return cls.from_dict({2 * e: c for e, c in coeffs.items()})

    @classmethod
    def monomial(cls, doubled_exp: int, coeff: int = 1) -> "LaurentPoly":
        return cls.from_dict({doubled_exp: coeff})

    def as_dict(self) -> dict[int, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        d = defaultdict(int, self.as_dict())
        for e, c in other.terms:
            d[e] += c
        return LaurentPoly.from_dict(d)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-other)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        d: dict[int, int] = defaultdict(int)
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                d[e1 + e2] += c1 * c2
        return LaurentPoly.from_dict(d)

    def __pow__(self, k: int) -> "LaurentPoly":
        out = LaurentPoly.monomial(0)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, doubled: int) -> "LaurentPoly":
        return LaurentPoly(tuple((e + doubled, c) for e, c in self.terms))

    def normalized(self) -> "LaurentPoly":
        """Lowest exponent 0 and positive leading coefficient."""
        if not self.terms:
            return self
        p = self.shift(-self.terms[0][0])
        if p.terms[-1][1] < 0:
            p = -p
        return p

    def symmetrized(self) -> "LaurentPoly":
        """Shift so the exponent range is centred at 0 (sign untouched)."""
        if not self.terms:
            return self
        lo, hi = self.terms[0][0], self.terms[-1][0]
        return self.shift(-(lo + hi) // 2)

    def equiv(self, other: "LaurentPoly") -> bool:
        """Equality up to multiplication by +-t^k."""
        return self.normalized() == other.normalized()

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.terms):
            exp = f"{e // 2}" if e % 2 == 0 else f"{e}/2"
            mono = "" if e == 0 else ("t" if e == 2 else f"t^{exp}")
            coef = "" if abs(c) == 1 and mono else str(abs(c))
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {coef}{mono}".rstrip())
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def euler_characteristic(g: GridDiagram) -> LaurentPoly:
    """Sum over all grid states of ``(-1)^M t^A``."""
    calc = GradingCalculator(g)
    d: dict[int, int] = defaultdict(int)
    for perm in enumerate_states(g):
        gr = calc(perm)
        d[2 * gr.s] += -1 if gr.m % 2 else 1
    return LaurentPoly.from_dict(d)


_t = sympy.Symbol("t")


def alexander_oracle(link: LinkStructure) -> LaurentPoly:
    """Single-variable Alexander polynomial from a Wirtinger presentation.

    Fox derivatives of the crossing relations give a ``c x a`` matrix; one
    column (and one row, when square) is deleted and the determinant taken.
    """
    rows = []
    a = link.num_arcs
    for cr in link.crossings:
        row = [sympy.Integer(0)] * a
        if cr.sign > 0:
            coeffs = ((cr.over_arc, 1 - _t), (cr.under_in, _t), (cr.under_out, -1))
        else:
            coeffs = ((cr.over_arc, _t - 1), (cr.under_in, 1), (cr.under_out, -_t))
        for k, v in coeffs:
            row[k] += v
        rows.append(row)
    c = len(rows)
    if a - 1 > c:
        return LaurentPoly()
    if a == 1 and c == 0:
        return LaurentPoly.monomial(0)
    mat = sympy.Matrix(rows)[:, 1:]
    if c > a - 1:
        mat = mat[1:, :]
    det = sympy.expand(mat.det(method="berkowitz"))
    poly = sympy.Poly(det, _t)
    d = {2 * m[0]: int(coef) for m, coef in zip(poly.monoms(), poly.coeffs())}
    return LaurentPoly.from_dict(d).normalized()


def skein_relation_holds(d_plus: LaurentPoly, d_minus: LaurentPoly, d_zero: LaurentPoly) -> bool:
    """``D+ - D- = (t^1/2 - t^-1/2) D0`` for some choice of units.

    Each polynomial is centred and may be negated independently; the relation
    must hold exactly for at least one sign choice.
    """
    z = LaurentPoly.from_dict({1: 1, -1: -1})
    p, m, o = d_plus.symmetrized(), d_minus.symmetrized(), (z * d_zero).symmetrized()
    for sp in (1, -1):
        for sm in (1, -1):
            for so in (1, -1):
                lhs = _scale(p, sp) - _scale(m, sm)
                if lhs == _scale(o, so):
                    return True
    return False


def _scale(p: LaurentPoly, s: int) -> LaurentPoly:
    return p if s == 1 else -p
