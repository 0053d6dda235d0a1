"""Bigraded homology ranks, chain maps, mapping cones and rank-table utilities.

All linear algebra is over the two-element field.  A basis element of a
complex over ``F2[U...]`` in bigrading ``(m, s)`` is ``U^e * x`` with
``N(x) = m - 2s`` and ``deg e = A(x) - s``; every bigraded piece is finite,
and the differential maps ``(m, s)`` to ``(m - 1, s)``, so ranks computed in
a window are exact.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .complexes import (BigradedComplex, RingSpec, Terms, add_terms, compose,
                        first_nonzero, mono_add, normalize_terms, zero_mono)


class HomologyError(ValueError):
    pass


# --------------------------------------------------------------------------
# GF(2) elimination on int bitsets


def gf2_rank(rows: Iterable[int]) -> int:
    pivots: dict[int, int] = {}
    for v in rows:
        while v:
            p = v.bit_length() - 1
            piv = pivots.get(p)
            if piv is None:
                pivots[p] = v
                break
            v ^= piv
    return len(pivots)


def gf2_kernel(images: Sequence[int]) -> list[int]:
    """Kernel basis of the map sending basis vector ``i`` to ``images[i]``.

    Kernel vectors are returned as bitsets over the source basis.
    """
    pivots: dict[int, tuple[int, int]] = {}
    kernel = []
    for i, v in enumerate(images):
        tag = 1 << i
        while v:
            p = v.bit_length() - 1
            piv = pivots.get(p)
            if piv is None:
                pivots[p] = (v, tag)
                break
            v ^= piv[0]
            tag ^= piv[1]
        if not v:
            kernel.append(tag)
    return kernel


# --------------------------------------------------------------------------
# Rank tables


@dataclass(frozen=True)
class Window:
    m0: int
    m1: int
    s0: int
    s1: int

    def __contains__(self, ms) -> bool:
        m, s = ms
        return self.m0 <= m <= self.m1 and self.s0 <= s <= self.s1

    def points(self):
        for s in range(self.s0, self.s1 + 1):
            for m in range(self.m0, self.m1 + 1):
                yield m, s

    @classmethod
    def parse(cls, text: str) -> "Window":
        """``m0:m1,s0:s1``."""
        try:
            mpart, spart = text.split(",")
            m0, m1 = (int(v) for v in mpart.split(":"))
            s0, s1 = (int(v) for v in spart.split(":"))
        except ValueError:
            raise HomologyError(f"bad window {text!r}; expected m0:m1,s0:s1") from None
        if m0 > m1 or s0 > s1:
            raise HomologyError(f"empty window {text!r}")
        return cls(m0, m1, s0, s1)

    def __str__(self) -> str:
        return f"{self.m0}:{self.m1},{self.s0}:{self.s1}"


@dataclass
class RankTable:
    entries: dict[tuple[int, int], int]
    window: Optional[Window] = None

    def __post_init__(self):
        self.entries = {k: v for k, v in self.entries.items() if v}
        if any(v < 0 for v in self.entries.values()):
            raise HomologyError("negative rank")
        if self.window is not None:
            outside = [k for k in self.entries if k not in self.window]
            if outside:
                raise HomologyError(f"entries outside window: {outside}")

    def __getitem__(self, ms) -> int:
        return self.entries.get(tuple(ms), 0)

    def total(self) -> int:
        return sum(self.entries.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, RankTable) and self.entries == other.entries

    def restrict(self, window: Window) -> "RankTable":
        return RankTable({k: v for k, v in self.entries.items() if k in window}, window)

    def shifted(self, dm: int, ds: int) -> "RankTable":
        """Table ``T'`` with ``T'(m, s) = T(m - dm, s - ds)``."""
        win = self.window
        if win is not None:
            win = Window(win.m0 + dm, win.m1 + dm, win.s0 + ds, win.s1 + ds)
        return RankTable({(m + dm, s + ds): v for (m, s), v in self.entries.items()}, win)

    def serialize(self) -> str:
        head = f"# window {self.window}" if self.window is not None else "# window full"
        body = [f"{m}\t{s}\t{v}" for (m, s), v in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0]))]
        return "\n".join([head] + body) + "\n"

    def euler_by_s(self) -> dict[int, int]:
        out: dict[int, int] = defaultdict(int)
        for (m, s), v in self.entries.items():
            out[s] += -v if m % 2 else v
        return {s: v for s, v in out.items() if v}


@dataclass(frozen=True)
class GradedModuleShape:
    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if any(r <= 0 for _, _, r in self.entries):
            raise HomologyError("module ranks must be positive")


V_SHAPE = GradedModuleShape(((-1, 0, 2), (0, -1, 1), (1, 0, 1)))
W_SHAPE = GradedModuleShape(((0, 0, 1), (1, 1, 1)))


def tensor_shape(t: RankTable, shape: GradedModuleShape, window: Optional[Window] = None) -> RankTable:
    """``out(m, s) = sum r * t(m - m0, s - s0)`` over shape entries ``(m0, s0, r)``.

    When ``window`` is given every output bigrading in it must be computable
    from ``t``'s window; otherwise a :class:`HomologyError` is raised.
    """
    if window is not None and t.window is not None:
        for m, s in window.points():
            for m0, s0, _ in shape.entries:
                if (m - m0, s - s0) not in t.window:
                    raise HomologyError(
                        f"window underflow: output {(m, s)} needs input {(m - m0, s - s0)} outside {t.window}")
    out: dict = defaultdict(int)
    for (m, s), v in t.entries.items():
        for m0, s0, r in shape.entries:
            out[(m + m0, s + s0)] += r * v
    if window is not None:
        out = {k: v for k, v in out.items() if k in window}
        return RankTable(dict(out), window)
    return RankTable(dict(out))


def hat_from_tilde(t: RankTable, n: int, ell: int) -> RankTable:
    """Divide the Poincare polynomial by ``(1 + q^-1 t^-1)^(n - ell)``.

    Each factor corresponds to a rank-2 module in bigradings ``(0, 0)`` and
    ``(-1, -1)``.  Raises if the division is not exact with non-negative
    quotient.
    """
    cur = dict(t.entries)
    for _ in range(n - ell):
        # Along each line m - s = const the factor is 1 + y with y lowering both.
        lines: dict[int, dict[int, int]] = defaultdict(dict)
        for (m, s), v in cur.items():
            lines[m - s][s] = v
        quotient: dict = {}
        for k, line in lines.items():
            lo, hi = min(line), max(line)
            q: dict[int, int] = {}
            above = 0
            for s in range(hi, lo - 1, -1):
                q[s] = line.get(s, 0) - above
                above = q[s]
            if q[lo] != 0 or any(v < 0 for v in q.values()):
                raise HomologyError("tilde table is not divisible by (1 + q^-1 t^-1)")
            for s, v in q.items():
                if v:
                    quotient[(k + s, s)] = v
        cur = quotient
    return RankTable(cur)


# --------------------------------------------------------------------------
# Per-bigrading linear algebra


@lru_cache(maxsize=None)
def monomials(num_vars: int, reps: tuple[int, ...], degree: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for combo in itertools.combinations_with_replacement(reps, degree):
        e = [0] * num_vars
        for r in combo:
            e[r] += 1
        out.append(tuple(e))
    return tuple(sorted(out))


class GradedPieces:
    """Lazily built bases and differential matrices of a complex."""

    def __init__(self, c: BigradedComplex):
        if c.modulus != 2:
            raise HomologyError("homology ranks are computed over the two-element field")
        self.c = c
        self.reps = tuple(c.ring.free_reps())
        self.k = c.ring.num_vars
        self._by_n: dict[int, list[int]] = defaultdict(list)
        for i, (m, s) in enumerate(c.grading):
            self._by_n[m - 2 * s].append(i)
        self._basis: dict = {}
        self._rank: dict = {}
        self._images: dict = {}
        if not self.reps and any(any(sum(mono) for (_, mono) in t) for t in c.diff):
            raise HomologyError("nonzero monomial in a ring without free variables")

    def basis(self, m: int, s: int) -> tuple[list, dict]:
        key = (m, s)
        if key not in self._basis:
            elems = []
            for i in self._by_n.get(m - 2 * s, ()):
                d = self.c.grading[i][1] - s
                if d < 0:
                    continue
                if d > 0 and not self.reps:
                    continue
                for e in monomials(self.k, self.reps, d):
                    elems.append((i, e))
            self._basis[key] = (elems, {el: j for j, el in enumerate(elems)})
        return self._basis[key]

    def dim(self, m: int, s: int) -> int:
        return len(self.basis(m, s)[0])

    def images(self, m: int, s: int) -> list[int]:
        """Differential images of the ``(m, s)`` basis as bitsets over ``(m-1, s)``."""
        key = (m, s)
        if key not in self._images:
            src, _ = self.basis(m, s)
            _, tgt_index = self.basis(m - 1, s)
            out = []
            for i, e in src:
                v = 0
                for (j, mono), coef in self.c.diff[i].items():
                    if coef & 1:
                        pos = tgt_index.get((j, mono_add(e, mono)))
                        if pos is None:
                            raise HomologyError(
                                f"differential term from {self.c.labels[i]} leaves its bigrading")
                        v ^= 1 << pos
                out.append(v)
            self._images[key] = out
        return self._images[key]

    def rank_d(self, m: int, s: int) -> int:
        key = (m, s)
        if key not in self._rank:
            self._rank[key] = gf2_rank(self.images(m, s))
        return self._rank[key]

    def homology(self, m: int, s: int) -> int:
        return self.dim(m, s) - self.rank_d(m, s) - self.rank_d(m + 1, s)

    def cycles(self, m: int, s: int) -> list[int]:
        return gf2_kernel(self.images(m, s))

    def boundaries(self, m: int, s: int) -> list[int]:
        return self.images(m + 1, s)


def default_window(c: BigradedComplex, depth: Optional[int] = None) -> Window:
    ms = [g[0] for g in c.grading]
    ss = [g[1] for g in c.grading]
    s0, s1 = min(ss), max(ss)
    if not c.ring.free_reps():
        return Window(min(ms), max(ms), s0, s1)
    depth = (s1 - s0) if depth is None else depth
    return Window(min(ms) - 2 * depth, max(ms), s0 - depth, s1)


def bigraded_ranks(c: BigradedComplex, window: Optional[Window] = None,
                   pieces: Optional[GradedPieces] = None) -> RankTable:
    if window is None:
        window = default_window(c)
    pieces = pieces or GradedPieces(c)
    entries = {}
    for m, s in window.points():
        r = pieces.homology(m, s)
        if r < 0:
            raise HomologyError(f"negative homology at {(m, s)}: differential does not square to zero")
        if r:
            entries[(m, s)] = r
    return RankTable(entries, window)


# --------------------------------------------------------------------------
# Chain maps and cones


@dataclass
class ChainMap:
    source: BigradedComplex
    target: BigradedComplex
    terms: list[Terms]
    shift: tuple[int, int] = (0, 0)
    name: str = ""

    def __post_init__(self):
        self.terms = normalize_terms(self.terms, self.target.ring, self.target.modulus)


def identity_map(c: BigradedComplex) -> ChainMap:
    z = zero_mono(c.ring.num_vars)
    return ChainMap(c, c, [{(i, z): 1} for i in range(len(c))], (0, 0), "id")


def zero_map(c: BigradedComplex, d: BigradedComplex, shift=(0, 0)) -> ChainMap:
    return ChainMap(c, d, [{} for _ in range(len(c))], shift, "0")


def multiplication_map(c: BigradedComplex, coeffs: dict[int, int]) -> ChainMap:
    """Multiplication by ``sum coeffs[i] * U_i``; shift ``(-2, -1)``."""
    k = c.ring.num_vars
    terms = []
    for i in range(len(c)):
        t: dict = defaultdict(int)
        for var, a in coeffs.items():
            e = [0] * k
            e[var] = 1
            t[(i, tuple(e))] += a
        terms.append(dict(t))
    return ChainMap(c, c, terms, (-2, -1), "mult")


def shift_violations(f: ChainMap) -> list[tuple]:
    dm, ds = f.shift
    bad = []
    for i, terms in enumerate(f.terms):
        m, s = f.source.grading[i]
        for (j, mono) in terms:
            deg = sum(mono)
            tm, ts = f.target.grading[j]
            if (tm - 2 * deg, ts - deg) != (m + dm, s + ds):
                bad.append((f.source.labels[i], f.target.labels[j], mono))
    return bad


def chain_map_check(f: ChainMap) -> tuple[bool, Optional[tuple]]:
    """``d f + f d = 0`` over F2 (``d f - f d = 0`` over the integers) and shift check."""
    if f.source.ring.num_vars != f.target.ring.num_vars:
        return False, ("ring mismatch",)
    bad = shift_violations(f)
    if bad:
        return False, ("shift", ) + bad[0]
    mod = f.target.modulus
    df = compose(f.terms, f.target.diff, mod)
    fd = compose(f.source.diff, f.terms, mod)
    total = normalize_terms(add_terms(df, fd, mod, scale_b=1 if mod == 2 else -1), f.target.ring, mod)
    hit = first_nonzero(total, f.source.labels)
    if hit is None:
        return True, None
    src, j, mono, v = hit
    return False, (src, f.target.labels[j], mono, v)


def mapping_cone(f: ChainMap, check: bool = True) -> BigradedComplex:
    """Cone with differential ``D(x, y) = (dx, f x - dy)``.

    Source generators are relabelled ``("src", label)`` and placed in
    bigrading ``(m + dm + 1, s + ds)``; target generators become
    ``("tgt", label)`` with unchanged bigrading.
    """
    if check:
        ok, bad = chain_map_check(f)
        if not ok:
            raise HomologyError(f"mapping_cone: not a chain map, witness {bad}")
    src, tgt = f.source, f.target
    ns = len(src)
    mod = tgt.modulus
    dm, ds = f.shift
    labels = [("src", lab) for lab in src.labels] + [("tgt", lab) for lab in tgt.labels]
    grading = [(m + dm + 1, s + ds) for m, s in src.grading] + list(tgt.grading)
    diff = []
    for i in range(ns):
        t: dict = defaultdict(int)
        for (j, mono), v in src.diff[i].items():
            t[(j, mono)] += v
        for (j, mono), v in f.terms[i].items():
            t[(ns + j, mono)] += v
        diff.append(dict(t))
    for i in range(len(tgt)):
        diff.append({(ns + j, mono): -v for (j, mono), v in tgt.diff[i].items()})
    return BigradedComplex(tgt.ring, labels, grading, diff, modulus=mod,
                           provenance=f"cone({f.name})")


def induced_rank_table(f: ChainMap, window: Window,
                       src_pieces: Optional[GradedPieces] = None,
                       tgt_pieces: Optional[GradedPieces] = None) -> RankTable:
    """Rank of ``H(f)`` from bigrading ``(m, s)`` of the source, for each point of ``window``."""
    if f.target.modulus != 2:
        raise HomologyError("induced ranks need field coefficients")
    sp = src_pieces or GradedPieces(f.source)
    tp = tgt_pieces or GradedPieces(f.target)
    dm, ds = f.shift
    entries = {}
    for m, s in window.points():
        basis, _ = sp.basis(m, s)
        if not basis:
            continue
        _, tindex = tp.basis(m + dm, s + ds)
        images = []
        for i, e in basis:
            v = 0
            for (j, mono), coef in f.terms[i].items():
                if coef & 1:
                    pos = tindex.get((j, mono_add(e, mono)))
                    if pos is None:
                        raise HomologyError("chain map term leaves its declared bigrading")
                    v ^= 1 << pos
            images.append(v)
        cycles = sp.cycles(m, s)
        fz = []
        for z in cycles:
            v = 0
            while z:
                low = z & -z
                v ^= images[low.bit_length() - 1]
                z ^= low
            fz.append(v)
        bd = tp.boundaries(m + dm, s + ds)
        r = gf2_rank(bd + fz) - gf2_rank(bd)
        if r:
            entries[(m, s)] = r
    return RankTable(entries, window)


def euler_from_generators(c: BigradedComplex, s: int, window: Window) -> int:
    """Alternating count of basis elements in Alexander grading ``s`` over the window."""
    pieces = GradedPieces(c)
    total = 0
    for m in range(window.m0, window.m1 + 1):
        d = pieces.dim(m, s)
        total += -d if m % 2 else d
    return total
