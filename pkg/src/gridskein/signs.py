"""Sign assignments on empty rectangles.

A sign assignment depends only on the grid size: it is a function of the
source state and the ordered column pair of an empty rectangle, markings
play no role.  Writing ``eps = (-1)^v`` the three axioms are linear over
the two-element field in the unknowns ``v``:

* two decompositions ``r1*r2 = r1'*r2'`` of one domain from ``x`` to
  ``z != x``:  ``v1 + v2 + v1' + v2' = 1``;
* ``r1*r2`` a vertical annulus:  ``v1 + v2 = 1``;
* ``r1*r2`` a horizontal annulus:  ``v1 + v2 = 0``.

The system is solved by elimination with every free unknown set to 0, so
the result is deterministic.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .grid import rect_between_cols

RectKey = tuple[tuple[int, ...], int, int]   # (source state, i, j)


class SignError(RuntimeError):
    pass


def _domain(n: int, x, i: int, j: int) -> tuple[int, int, int, int]:
    w, h, _ = rect_between_cols(n, x, i, j)
    return i, w, x[i], h


def _cells(n: int, rect) -> list[tuple[int, int]]:
    left, w, bottom, h = rect
    return [((left + a) % n, (bottom + b) % n) for a in range(w) for b in range(h)]


def _swap(x, i, j):
    y = list(x)
    y[i], y[j] = x[j], x[i]
    return tuple(y)


def empty_rectangles(n: int) -> list[RectKey]:
    out = []
    for x in itertools.permutations(range(n)):
        for i in range(n):
            for j in range(n):
                if i != j and rect_between_cols(n, x, i, j)[2]:
                    out.append((x, i, j))
    return out


@dataclass(frozen=True)
class Relation:
    kind: str                   # "square", "vertical", "horizontal"
    rects: tuple[RectKey, ...]
    rhs: int                    # required sum of exponents mod 2


def axiom_relations(n: int) -> list[Relation]:
    """Every instance of the three axioms on an ``n x n`` torus."""
    rects = empty_rectangles(n)
    by_source: dict = defaultdict(list)
    for key in rects:
        by_source[key[0]].append(key)
    rels = []
    for x in sorted(by_source):
        groups: dict = defaultdict(list)
        for r1 in by_source[x]:
            y = _swap(x, r1[1], r1[2])
            for r2 in by_source[y]:
                z = _swap(y, r2[1], r2[2])
                mult: dict = defaultdict(int)
                for cell in _cells(n, _domain(n, *r1)) + _cells(n, _domain(n, *r2)):
                    mult[cell] += 1
                groups[(z, tuple(sorted(mult.items())))].append((r1, r2))
        for (z, dom), decs in sorted(groups.items()):
            if z != x:
                if len(decs) != 2:
                    raise SignError(f"domain from {x} to {z} has {len(decs)} decompositions")
                (a, b), (c, d) = decs
                rels.append(Relation("square", (a, b, c, d), 1))
                continue
            for a, b in decs:
                cols = {c for (c, _), _ in dom}
                rows = {r for (_, r), _ in dom}
                if len(cols) == 1 and len(rows) == n:
                    rels.append(Relation("vertical", (a, b), 1))
                elif len(rows) == 1 and len(cols) == n:
                    rels.append(Relation("horizontal", (a, b), 0))
                else:
                    raise SignError(f"closed domain at {x} is not an annulus")
    return rels


class SignAssignment:
    """Queryable ``eps(x, i, j)`` for empty rectangles of an ``n x n`` grid."""

    def __init__(self, n: int, table: dict):
        self.n = n
        self.table = table

    def sign(self, x, i: int, j: int) -> int:
        return self.table[(tuple(x), i, j)]

    def violations(self) -> list[Relation]:
        bad = []
        for rel in axiom_relations(self.n):
            prod = 1
            for r in rel.rects:
                prod *= self.table[r]
            want = -1 if rel.rhs else 1
            if prod != want:
                bad.append(rel)
        return bad


@lru_cache(maxsize=None)
def _solve(n: int) -> SignAssignment:
    rects = empty_rectangles(n)
    var = {r: k for k, r in enumerate(rects)}
    rhs_bit = 1 << len(rects)
    pivots: dict[int, int] = {}
    for rel in axiom_relations(n):
        row = rhs_bit if rel.rhs else 0
        for r in rel.rects:
            row ^= 1 << var[r]
        while row & (rhs_bit - 1):
            top = (row & (rhs_bit - 1)).bit_length() - 1
            if top not in pivots:
                pivots[top] = row
                break
            row ^= pivots[top]
        else:
            if row:
                raise SignError(f"sign axioms are inconsistent for n={n}")
    value = [0] * len(rects)
    for top in sorted(pivots):
        row = pivots[top]
        v = 1 if row & rhs_bit else 0
        rest = row & (rhs_bit - 1) & ~(1 << top)
        while rest:
            low = rest & -rest
            v ^= value[low.bit_length() - 1]
            rest ^= low
        value[top] = v
    table = {r: -1 if value[k] else 1 for r, k in var.items()}
    return SignAssignment(n, table)


def sign_assignment(g_or_n) -> SignAssignment:
    """Sign assignment for a grid (or a grid size); verified before returning."""
    n = g_or_n if isinstance(g_or_n, int) else g_or_n.n
    sa = _solve(n)
    bad = sa.violations()
    if bad:
        raise SignError(f"constructed assignment violates the {bad[0].kind} axiom at {bad[0].rects}")
    return sa
