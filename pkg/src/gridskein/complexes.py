"""Bigraded chain complexes over polynomial rings built from grid diagrams.

A complex stores, for each generator, a sparse map
``{(target_index, monomial): coefficient}``.  Monomials are exponent tuples
over the ring's ``num_vars`` variables; after specialisation only the
representative of each identified class may carry an exponent.  With
``modulus=2`` coefficients live in the two-element field (the default);
``modulus=0`` means integers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .grid import (GradingCalculator, GridDiagram, enumerate_states, in_rect,
                   rect_between_cols)

Monomial = tuple[int, ...]
Terms = dict[tuple[int, Monomial], int]


class ComplexError(ValueError):
    pass


class RingSpec:
    """Polynomial ring in ``num_vars`` U-variables modulo zero/identification relations."""

    def __init__(self, num_vars: int, relations: Iterable[tuple] = ()):
        self.num_vars = num_vars
        self._parent = list(range(num_vars))
        self._zero: set[int] = set()
        self.relations: list[tuple] = []
        for rel in relations:
            self._add(rel)

    def _find(self, i: int) -> int:
        while self._parent[i] != i:
            self._parent[i] = self._parent[self._parent[i]]
            i = self._parent[i]
        return i

    def _check(self, i: int) -> None:
        if not (0 <= i < self.num_vars):
            raise ComplexError(f"variable index {i} out of range 0..{self.num_vars - 1}")

    def _add(self, rel: tuple) -> None:
        if rel[0] == "zero":
            self._check(rel[1])
            self._zero.add(rel[1])
        elif rel[0] == "eq":
            self._check(rel[1])
            self._check(rel[2])
            a, b = self._find(rel[1]), self._find(rel[2])
            if a != b:
                lo, hi = min(a, b), max(a, b)
                self._parent[hi] = lo
        else:
            raise ComplexError(f"unknown relation {rel!r}")
        self.relations.append(tuple(rel))

    def with_relations(self, relations: Iterable[tuple]) -> "RingSpec":
        return RingSpec(self.num_vars, list(self.relations) + list(relations))

    def rep(self, i: int) -> Optional[int]:
        """Representative of ``U_i``'s class, or ``None`` if it is zero."""
        r = self._find(i)
        zero_reps = {self._find(z) for z in self._zero}
        return None if r in zero_reps else r

    def free_reps(self) -> list[int]:
        return sorted({r for r in (self.rep(i) for i in range(self.num_vars)) if r is not None})

    def normalize(self, mono: Monomial) -> Optional[Monomial]:
        out = [0] * self.num_vars
        for i, e in enumerate(mono):
            if e:
                r = self.rep(i)
                if r is None:
                    return None
                out[r] += e
        return tuple(out)

    def key(self) -> tuple:
        return tuple(self.rep(i) for i in range(self.num_vars))

    def __eq__(self, other) -> bool:
        return isinstance(other, RingSpec) and self.num_vars == other.num_vars and self.key() == other.key()

    def __repr__(self) -> str:
        return f"RingSpec({self.num_vars}, {self.relations!r})"


def zero_mono(k: int) -> Monomial:
    return (0,) * k


def mono_add(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _reduce(terms: Terms, modulus: int) -> Terms:
    if modulus:
        return {k: v % modulus for k, v in terms.items() if v % modulus}
    return {k: v for k, v in terms.items() if v}


@dataclass
class BigradedComplex:
    ring: RingSpec
    labels: list[Hashable]
    grading: list[tuple[int, int]]   # (m, s) per generator
    diff: list[Terms]
    modulus: int = 2
    provenance: str = ""
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.diff = [_reduce(t, self.modulus) for t in self.diff]

    def __len__(self) -> int:
        return len(self.labels)

    def dump(self) -> str:
        """Deterministic text dump: ``gen`` lines then sorted ``d`` lines."""
        lines = []
        for i, lab in enumerate(self.labels):
            m, s = self.grading[i]
            lines.append(f"gen {_label_str(lab)} m={m} s={s}")
        for i, terms in enumerate(self.diff):
            for (j, mono), coef in sorted(terms.items()):
                sign = coef if self.modulus == 0 else 1
                lines.append(f"d {_label_str(self.labels[i])} -> {_label_str(self.labels[j])} "
                             f"U^{','.join(map(str, mono))} sign={sign:+d}")
        return "\n".join(lines) + "\n"


def _label_str(lab) -> str:
    if isinstance(lab, tuple) and all(isinstance(v, int) for v in lab):
        return "".join(map(str, lab)) if all(v < 10 for v in lab) else ",".join(map(str, lab))
    if isinstance(lab, tuple):
        return ":".join(_label_str(p) for p in lab)
    return str(lab)


# --------------------------------------------------------------------------
# Rectangle counting


@dataclass(frozen=True)
class RectCount:
    """Marking multiplicities of one rectangle, as seen by an acceptance rule."""

    O_mult: tuple[int, ...]
    counts: dict


def rectangle_terms(
    n: int,
    O_cells: Sequence[tuple[int, int]],
    sources: Sequence[tuple[int, ...]],
    target_index: dict,
    accept: Callable[[dict], bool],
    marks: dict[str, Sequence[tuple[int, int]]],
    sign: Optional[Callable] = None,
    modulus: int = 2,
) -> list[Terms]:
    """Count empty rectangles out of each source state.

    ``marks`` names cell sets; ``accept`` receives ``{name: count}`` for each
    empty rectangle and decides whether it contributes.  Targets outside
    ``target_index`` are dropped.  The weight is ``U^{O(r)}``.
    """
    out = []
    for x in sources:
        terms: dict = defaultdict(int)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                w, h, empty = rect_between_cols(n, x, i, j)
                if not empty:
                    continue
                y = list(x)
                y[i], y[j] = x[j], x[i]
                y = tuple(y)
                tgt = target_index.get(y)
                if tgt is None:
                    continue
                b = x[i]
                counts = {name: sum(in_rect(n, i, w, b, h, c, r) for c, r in cells)
                          for name, cells in marks.items()}
                if not accept(counts):
                    continue
                mono = tuple(int(in_rect(n, i, w, b, h, c, r)) for c, r in O_cells)
                eps = sign(x, i, j) if sign is not None else 1
                terms[(tgt, mono)] += eps
        out.append(_reduce(terms, modulus))
    return out


def build_complex(
    g: GridDiagram,
    flavor: str = "minus",
    ring: Optional[RingSpec] = None,
    signs=None,
) -> BigradedComplex:
    """CFK-minus (``flavor="minus"``) or tilde complex of a grid.

    Minus: empty rectangles with no X, weight ``U^{O(r)}``.  Tilde: empty
    rectangles with no markings at all.  ``signs`` is an optional
    :class:`~gridskein.signs.SignAssignment`, switching to integer
    coefficients.
    """
    n = g.n
    if ring is None:
        ring = RingSpec(n)
    if ring.num_vars != n:
        raise ComplexError(f"ring has {ring.num_vars} variables, grid has {n} O-markings")
    if flavor not in ("minus", "tilde"):
        raise ComplexError(f"unknown flavor {flavor!r}")
    states = list(enumerate_states(g))
    index = {s: k for k, s in enumerate(states)}
    calc = GradingCalculator(g)
    grading = [(gr.m, gr.s) for gr in map(calc, states)]
    marks = {"X": list(enumerate(g.sigma_X))}
    if flavor == "minus":
        accept = lambda c: c["X"] == 0
    else:
        marks["O"] = list(enumerate(g.sigma_O))
        accept = lambda c: c["X"] == 0 and c["O"] == 0
    modulus = 2 if signs is None else 0
    sign = None if signs is None else signs.sign
    diff = rectangle_terms(n, list(enumerate(g.sigma_O)), states, index, accept, marks,
                           sign=sign, modulus=modulus)
    c = BigradedComplex(RingSpec(n), states, grading, diff, modulus=modulus,
                        provenance=f"{flavor} grid n={n} O={g.sigma_O} X={g.sigma_X}")
    if flavor == "tilde":
        c = specialize(c, [("zero", i) for i in range(n)])
    elif ring.relations:
        c = specialize(c, ring.relations)
    return c


def specialize(c: BigradedComplex, relations: Iterable[tuple]) -> BigradedComplex:
    """Quotient by ``("zero", i)`` and ``("eq", i, j)`` relations."""
    ring = c.ring.with_relations(relations)
    diff = []
    for terms in c.diff:
        new: dict = defaultdict(int)
        for (j, mono), coef in terms.items():
            nm = ring.normalize(mono)
            if nm is not None:
                new[(j, nm)] += coef
        diff.append(dict(new))
    return BigradedComplex(ring, list(c.labels), list(c.grading), diff,
                           modulus=c.modulus, provenance=c.provenance)


# --------------------------------------------------------------------------
# Composition of sparse maps


def compose(first: list[Terms], second: list[Terms], modulus: int = 2) -> list[Terms]:
    """Terms of ``second o first`` (apply ``first``, then ``second``)."""
    out = []
    for terms in first:
        acc: dict = defaultdict(int)
        for (j, m1), c1 in terms.items():
            for (k, m2), c2 in second[j].items():
                acc[(k, mono_add(m1, m2))] += c1 * c2
        out.append(_reduce(acc, modulus))
    return out


def add_terms(a: list[Terms], b: list[Terms], modulus: int = 2, scale_b: int = 1) -> list[Terms]:
    out = []
    for ta, tb in zip(a, b):
        acc = defaultdict(int, ta)
        for k, v in tb.items():
            acc[k] += scale_b * v
        out.append(_reduce(acc, modulus))
    return out


def normalize_terms(terms: list[Terms], ring: RingSpec, modulus: int = 2) -> list[Terms]:
    out = []
    for t in terms:
        acc: dict = defaultdict(int)
        for (j, mono), v in t.items():
            nm = ring.normalize(mono)
            if nm is not None:
                acc[(j, nm)] += v
        out.append(_reduce(acc, modulus))
    return out


def first_nonzero(terms: list[Terms], labels: Sequence) -> Optional[tuple]:
    for i, t in enumerate(terms):
        if t:
            (j, mono), v = min(t.items())
            return labels[i], j, mono, v
    return None


def d_squared_check(c: BigradedComplex) -> tuple[bool, Optional[tuple]]:
    """``(True, None)`` iff the differential squares to zero over ``c.ring``.

    Otherwise the counterexample is ``(source label, target label, monomial,
    coefficient)``.
    """
    sq = normalize_terms(compose(c.diff, c.diff, c.modulus), c.ring, c.modulus)
    bad = first_nonzero(sq, c.labels)
    if bad is None:
        return True, None
    src, j, mono, v = bad
    return False, (src, c.labels[j], mono, v)


def grading_shift_violations(c: BigradedComplex) -> list[tuple]:
    """Terms whose bigrading shift is not exactly ``(-1, 0)``."""
    bad = []
    for i, terms in enumerate(c.diff):
        m, s = c.grading[i]
        for (j, mono), _ in terms.items():
            deg = sum(mono)
            tm, ts = c.grading[j]
            if (tm - 2 * deg, ts - deg) != (m - 1, s):
                bad.append((c.labels[i], c.labels[j], mono))
    return bad


def u_equals_one_complex(g: GridDiagram) -> BigradedComplex:
    """X-free rectangles with every ``U_i = 1``, graded by ``N = M - 2A``.

    Returned with gradings ``(N, 0)`` and an empty ring.
    """
    states = list(enumerate_states(g))
    index = {s: k for k, s in enumerate(states)}
    calc = GradingCalculator(g)
    grading = [(gr.n_grading, 0) for gr in map(calc, states)]
    diff = rectangle_terms(g.n, [], states, index, lambda c: c["X"] == 0,
                           {"X": list(enumerate(g.sigma_X))})
    return BigradedComplex(RingSpec(0), states, grading, diff,
                           provenance=f"U=1 grid n={g.n}")
