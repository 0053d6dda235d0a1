"""Grid-diagram realisation of the skein exact triangle.

Geometry of a template
----------------------
``G`` is a grid presenting ``K-``.  The distinguished vertical circle is
line ``k`` (between columns ``L = k - 1`` and ``R = k``).  ``G'`` replaces it
by a curve that crosses it twice, once at the point ``a`` inside row band
``r0``; as plain grids, ``G'`` is ``G`` with columns ``L`` and ``R``
exchanged.  The four special X-type markings form a 2x2 block in rows
``r1 = r0 - 1`` and ``r0``:

==========  ==============  ================
marking     cell in ``G``   cell in ``G'``
==========  ==============  ================
A-          ``(L, r1)``     ``(L, r1)``
A0          ``(R, r0)``     ``(L, r0)``
A+          ``(R, r1)``     ``(R, r1)``
B1          ``(R, r1)``     ``(L, r1)``
B2          ``(L, r0)``     ``(R, r0)``
==========  ==============  ================

All O-markings of columns ``L``/``R`` also swap.  ``A0`` lies below ``a`` in
the thin region between the two curves, ``B2`` above it.  The O-rows of
columns ``L``, ``R`` must sit in cyclic order ``r0 < o_L < o_R < r1``.

Marking sets: ``K-`` = X0 + {A-, A0} on ``G``; ``K+`` = X0 + {A0, A+} on
``G'``; ``K0`` = X0 + {B1, B2} on either grid.  U-variables are indexed by
the ``G``-column of their O-marking.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .alexander import LaurentPoly, alexander_oracle, skein_relation_holds
from .complexes import (BigradedComplex, RingSpec, Terms, add_terms, compose,
                        d_squared_check, first_nonzero, grading_shift_violations,
                        normalize_terms, rectangle_terms, specialize)
from .grid import (GradingCalculator, GridDiagram, GridError, grid_from_fields,
                   num_components, parse_key_values, trace_link)
from .homology import (ChainMap, GradedModuleShape, GradedPieces, RankTable, V_SHAPE, W_SHAPE,
                       Window, bigraded_ranks, chain_map_check,
                       induced_rank_table, mapping_cone, multiplication_map,
                       tensor_shape)

SPECIAL = ("Aminus", "Azero", "Aplus", "B1", "B2")


class TemplateError(ValueError):
    pass


@dataclass(frozen=True)
class SkeinTemplate:
    n: int
    sigma_O: tuple[int, ...]       # O rows by G-column
    X0: tuple[tuple[int, int], ...]  # background X cells (same in G and G')
    commuted: int                  # vertical circle k; columns k-1, k swap
    cells: dict                    # special marking -> G-cell
    x: tuple[int, int]
    xprime: tuple[int, int]
    a: tuple[int, int]
    edges: dict                    # "a".."d" -> O index (G-column)
    name: str = ""

    # ---- derived geometry -------------------------------------------------

    @property
    def L(self) -> int:
        return (self.commuted - 1) % self.n

    @property
    def R(self) -> int:
        return self.commuted % self.n

    @property
    def r0(self) -> int:
        """Row of ``x``; the triangle and the 2x2 block hang off it."""
        return self.x[1]

    def swap_col(self, col: int) -> int:
        if col == self.L:
            return self.R
        if col == self.R:
            return self.L
        return col

    def gprime_cell(self, name: str) -> tuple[int, int]:
        c, r = self.cells[name]
        if name in ("Aminus", "Aplus"):
            return (c, r)
        return (self.swap_col(c), r)

    def O_cells(self, prime: bool) -> list[tuple[int, int]]:
        """O cells in variable order (indexed by G-column)."""
        if prime:
            return [(self.swap_col(c), r) for c, r in enumerate(self.sigma_O)]
        return list(enumerate(self.sigma_O))

    def marks(self, prime: bool) -> dict[str, list[tuple[int, int]]]:
        out = {"X0": list(self.X0)}
        for name in SPECIAL:
            out[name] = [self.gprime_cell(name) if prime else self.cells[name]]
        return out

    def grid(self, which: str) -> GridDiagram:
        """Plain grid for ``"K-"``, ``"K+"``, ``"K0"`` (on G) or ``"K0'"`` (on G')."""
        prime = which in ("K+", "K0'")
        xs = {"K-": ("Aminus", "Azero"), "K+": ("Azero", "Aplus"),
              "K0": ("B1", "B2"), "K0'": ("B1", "B2")}[which]
        m = self.marks(prime)
        cells = list(self.X0) + [m[k][0] for k in xs]
        sigma_X = [None] * self.n
        for c, r in cells:
            if sigma_X[c] is not None:
                raise TemplateError(f"{which}: column {c} carries two X-markings")
            sigma_X[c] = r
        if None in sigma_X:
            raise TemplateError(f"{which}: column {sigma_X.index(None)} has no X-marking")
        sigma_O = [None] * self.n
        for c, r in self.O_cells(prime):
            sigma_O[c] = r
        try:
            return GridDiagram(self.n, tuple(sigma_O), tuple(sigma_X))
        except GridError as exc:
            raise TemplateError(f"{which}: {exc}") from None

    @property
    def same_component(self) -> bool:
        return num_components(self.grid("K0")) == num_components(self.grid("K+")) + 1


def template_from_minus_grid(g: GridDiagram, k: int, name: str = "") -> SkeinTemplate:
    """Build the template whose ``K-`` grid is ``g`` with distinguished line ``k``."""
    n = g.n
    L, R = (k - 1) % n, k % n
    r0 = g.sigma_X[R]
    r1 = (r0 - 1) % n
    cells = {"Aminus": (L, g.sigma_X[L]), "Azero": (R, r0), "Aplus": (R, r1),
             "B1": (R, r1), "B2": (L, r0)}
    X0 = tuple((c, r) for c, r in enumerate(g.sigma_X) if c not in (L, R))
    o_col = {r: c for c, r in enumerate(g.sigma_O)}
    edges = {"a": o_col[r1], "b": o_col[r0], "c": R, "d": L}
    return SkeinTemplate(n, tuple(g.sigma_O), X0, k, cells, (R, r0), (R, r0), (R, r0), edges, name)


def _pair(value: str, key: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in value.split(","))
    except ValueError:
        raise TemplateError(f"{key} must be '<col>,<row>': {value!r}") from None
    return a, b


def parse_template(text: str, name: str = "") -> SkeinTemplate:
    """Parse a template file and run the structural checks."""
    try:
        fields = parse_key_values(text)
        base = grid_from_fields(fields)
    except GridError as exc:
        raise TemplateError(f"base grid: {exc}") from None
    required = ("commuted",) + SPECIAL + ("x", "xprime", "a", "edges")
    missing = [k for k in required if k not in fields]
    if missing:
        raise TemplateError(f"missing template fields: {missing}")
    n = base.n
    cells = {k: _pair(fields[k], k) for k in SPECIAL}
    for k, (c, r) in cells.items():
        if not (0 <= c < n and 0 <= r < n):
            raise TemplateError(f"{k}={c},{r} outside the {n}x{n} grid")
    try:
        k = int(fields["commuted"])
    except ValueError:
        raise TemplateError("commuted must be an integer") from None
    edges = {}
    for part in fields["edges"].split(","):
        try:
            lab, idx = part.split(":")
            edges[lab.strip()] = int(idx)
        except ValueError:
            raise TemplateError(f"bad edges entry {part!r}") from None
    if sorted(edges) != ["a", "b", "c", "d"]:
        raise TemplateError("edges must label a, b, c, d")
    special_x = {cells["Aminus"], cells["Azero"]}
    xcells = set(enumerate(base.sigma_X))
    X0 = tuple(sorted(xcells - special_x))
    t = SkeinTemplate(n, base.sigma_O, X0, k % n, cells, _pair(fields["x"], "x"),
                      _pair(fields["xprime"], "xprime"), _pair(fields["a"], "a"), edges, name)
    _check_triangle(t)
    if not special_x <= xcells:
        raise TemplateError("base grid X must contain the Aminus and Azero cells (it presents K-)")
    check_structure(t)
    return t


def template_to_text(t: SkeinTemplate) -> str:
    g = t.grid("K-")
    lines = [g.to_text().rstrip(), f"commuted={t.commuted}"]
    lines += [f"{k}={t.cells[k][0]},{t.cells[k][1]}" for k in SPECIAL]
    lines += [f"x={t.x[0]},{t.x[1]}", f"xprime={t.xprime[0]},{t.xprime[1]}", f"a={t.a[0]},{t.a[1]}"]
    lines.append("edges=" + ",".join(f"{k}:{t.edges[k]}" for k in "abcd"))
    return "\n".join(lines) + "\n"


def _check_triangle(t: SkeinTemplate) -> None:
    R, r0 = t.R, t.r0
    if t.x[0] != t.commuted or t.xprime != t.x or t.a != t.x:
        raise TemplateError(
            f"triangle invariant: x={t.x}, xprime={t.xprime}, a={t.a} must coincide as lattice data "
            f"on circle {t.commuted}")
    if t.cells["Azero"] != (R, r0):
        raise TemplateError(
            f"triangle invariant: Azero={t.cells['Azero']} is not inside the triangle x, x', a "
            f"(cell {(R, r0)})")


def check_structure(t: SkeinTemplate) -> None:
    """Marking validity, block layout, triangle condition and edge labels."""
    n, L, R = t.n, t.L, t.R
    r0 = t.r0
    r1 = (r0 - 1) % n
    _check_triangle(t)
    expect = {"Aminus": (L, r1), "Aplus": (R, r1), "B1": (R, r1), "B2": (L, r0)}
    for k, cell in expect.items():
        if t.cells[k] != cell:
            raise TemplateError(f"{k}={t.cells[k]}: expected {cell} for the 2x2 block at rows {r1},{r0}")
    for which in ("K-", "K+", "K0", "K0'"):
        t.grid(which)
    if any(c in (L, R) for c, _ in t.X0):
        raise TemplateError("background X-markings may not sit in the commuted columns")
    o_L, o_R = t.sigma_O[L], t.sigma_O[R]
    dl, dr = (o_L - r0) % n, (o_R - r0) % n
    if not (0 < dl < dr < n - 1):
        raise TemplateError(
            f"O rows of columns {L},{R} (rows {o_L},{o_R}) must follow row {r0} in cyclic order "
            f"r0 < o_L < o_R < r0-1")
    o_col = {r: c for c, r in enumerate(t.sigma_O)}
    want = {"a": o_col[r1], "b": o_col[r0], "c": R, "d": L}
    if t.edges != want:
        raise TemplateError(f"edge labels {t.edges} do not match the local O-markings {want}")


# --------------------------------------------------------------------------
# Complexes and maps


class SkeinComplexes:
    """All complexes and maps attached to a template, over the two-element field."""

    def __init__(self, t: SkeinTemplate):
        self.t = t
        n = t.n
        self.n = n
        self.k = t.commuted
        self.states = list(itertools.permutations(range(n)))
        r0 = t.r0
        self.X = [s for s in self.states if s[self.k] == r0]
        self.Y = [s for s in self.states if s[self.k] != r0]
        # G' states use the same tuples; x' also sits at row r0 of circle k
        self.Xp = list(self.X)
        self.Yp = list(self.Y)
        self.ring = RingSpec(n)
        self._grading_cache: dict = {}
        self._cfk_cache: dict = {}

    # ---- helpers ----------------------------------------------------------

    def gradings(self, which: str, state) -> tuple[int, int]:
        key = (which, state)
        if key not in self._grading_cache:
            gr = self._calcs[which](state)
            self._grading_cache[key] = (gr.m, gr.s)
        return self._grading_cache[key]

    @cached_property
    def _calcs(self):
        return {w: GradingCalculator(self.t.grid(w)) for w in ("K-", "K+", "K0", "K0'")}

    def rect_map(self, prime: bool, sources, targets, accept) -> list[Terms]:
        index = {s: i for i, s in enumerate(targets)}
        return rectangle_terms(self.n, self.t.O_cells(prime), sources, index, accept,
                               self.t.marks(prime))

    # ---- named rectangle maps ---------------------------------------------

    @staticmethod
    def _rule(exactly_one=(), forbid=(), exactly=None, also_one=()):
        def accept(c):
            if c["X0"]:
                return False
            if any(c[f] for f in forbid):
                return False
            if exactly_one and sum(c[f] for f in exactly_one) != 1:
                return False
            if also_one and sum(c[f] for f in also_one) != 1:
                return False
            if exactly is not None and any(c[f] != v for f, v in exactly.items()):
                return False
            return True
        return accept

    def internal(self, part: str) -> list[Terms]:
        """Internal differentials of X, Y (on G) and X', Y' (on G')."""
        if part in ("X", "Y"):
            src = self.X if part == "X" else self.Y
            return self.rect_map(False, src, src, self._rule(forbid=("Aminus", "Azero", "B1", "B2")))
        src = self.Xp if part == "Xp" else self.Yp
        return self.rect_map(True, src, src, self._rule(forbid=("Azero", "Aplus", "B1", "B2")))

    def marked_rectangle_map(self, which_grid: str, sources, targets,
                             require_exactly_one_of=(), forbid=(), require_also_one_of=(),
                             exactly=None) -> list[Terms]:
        for name in tuple(require_exactly_one_of) + tuple(forbid) + tuple(require_also_one_of):
            if name not in SPECIAL:
                raise TemplateError(f"{name!r} is not a special marking of the template")
        return self.rect_map(which_grid == "G'", sources, targets,
                             self._rule(require_exactly_one_of, forbid, exactly, require_also_one_of))

    def D_Aminus(self):
        return self.marked_rectangle_map("G", self.X, self.Y, ("Azero", "Aminus"), ("B1", "B2"))

    def D_B(self, sources=None):
        return self.marked_rectangle_map("G", self.Y if sources is None else sources, self.X,
                                         ("B1", "B2"), ("Azero", "Aminus"))

    def Dprime_B(self):
        return self.marked_rectangle_map("G'", self.Xp, self.Yp, ("B1", "B2"), ("Azero", "Aplus"))

    def D_Aplus(self):
        return self.marked_rectangle_map("G'", self.Yp, self.Xp, ("Azero", "Aplus"), ("B1", "B2"))

    # ---- whole-grid complexes ---------------------------------------------

    _KNOT_X = {"K-": ("Aminus", "Azero"), "K+": ("Azero", "Aplus"),
               "K0": ("B1", "B2"), "K0'": ("B1", "B2")}

    def cfk(self, which: str) -> BigradedComplex:
        """Minus complex of ``K-`` (on G), ``K+`` (on G'), ``K0`` (on G) or ``K0'`` (on G')."""
        if which in self._cfk_cache:
            return self._cfk_cache[which]
        prime = which in ("K+", "K0'")
        xs = self._KNOT_X[which]
        diff = self.rect_map(prime, self.states, self.states,
                             lambda c: not c["X0"] and not any(c[f] for f in xs))
        grading = [self.gradings(which, s) for s in self.states]
        c = BigradedComplex(RingSpec(self.n), list(self.states), grading, diff,
                            provenance=f"{which} of template {self.t.name}")
        self._cfk_cache[which] = c
        return c

    # ---- the pentagon map --------------------------------------------------

    def pentagon_map_Phi(self) -> list[Terms]:
        """Empty pentagons from ``K0`` on ``G'`` to ``K0`` on ``G``.

        A pentagon has ``x'`` (on circle ``k``) as a corner and is bounded on
        the commuted side by the curve in ``G'`` on one side of ``a`` and by
        the curve in ``G`` on the other side.  Pentagons with an X-marking of
        ``K0`` are discarded; the weight is ``U^{O(p)}``.
        """
        n, k, r0 = self.n, self.k, self.t.r0
        t = self.t
        mk = []  # (G column, G' column, row, kind, variable)
        for name in ("B1", "B2"):
            (c, r), (cp, _) = t.cells[name], t.gprime_cell(name)
            mk.append((c, cp, r, "X", None))
        for c, r in t.X0:
            mk.append((c, c, r, "X", None))
        for v, r in enumerate(t.sigma_O):
            mk.append((v, t.swap_col(v), r, "O", v))
        index = {s: i for i, s in enumerate(self.states)}
        out = []
        for x in self.states:
            terms: dict = defaultdict(int)
            p = x[k]
            for j in range(n):
                if j == k:
                    continue
                q = x[j]
                if (r0 - p) % n < (q - p) % n:
                    left, w, bottom, h = k, (j - k) % n, p, (q - p) % n
                    primed_side = lambda r: (r - p) % n < (r0 - p) % n
                else:
                    left, w, bottom, h = j, (k - j) % n, q, (p - q) % n
                    # B2 shares row r0 with a but sits above it
                    primed_side = lambda r: (r - q) % n >= (r0 - q) % n
                if any(0 < (x[(left + d) % n] - bottom) % n < h for d in range(1, w)):
                    continue
                mono = [0] * n
                bad = False
                for c, cp, r, kind, var in mk:
                    if (r - bottom) % n >= h:
                        continue
                    col = cp if primed_side(r) else c
                    if (col - left) % n < w:
                        if kind == "X":
                            bad = True
                            break
                        mono[var] = 1
                if bad:
                    continue
                y = list(x)
                y[k], y[j] = x[j], x[k]
                terms[(index[tuple(y)], tuple(mono))] += 1
            out.append({key: v % 2 for key, v in terms.items() if v % 2})
        return out

    # ---- the combined complex ---------------------------------------------

    def identification_I(self) -> list[Terms]:
        """``X -> X'``: the same permutation, read in ``G'``."""
        z = (0,) * self.n
        index = {s: i for i, s in enumerate(self.Xp)}
        return [{(index[s], z): 1} for s in self.X]

    def build_E(self) -> BigradedComplex:
        """Total complex of the square X -> Y, X -> Y', Y -> X', Y' -> X'.

        It is the cone of ``D_A- + D_A+`` from the ``K+`` column ``{X, Y'}``
        to the ``K-`` column ``{Y, X'}``.  The ``K+`` column keeps its own
        bigrading and the ``K-`` column is lowered by one Maslov degree, so
        ``X`` and ``X'`` share their Maslov grading.
        """
        if "E" in self._cfk_cache:
            return self._cfk_cache["E"]
        parts = [("X", self.X), ("Y", self.Y), ("Yp", self.Yp), ("Xp", self.Xp)]
        offset, labels, grading = {}, [], []
        for name, states in parts:
            offset[name] = len(labels)
            labels += [(name, s) for s in states]
            if name in ("X", "Yp"):
                grading += [self.gradings("K+", x) for x in states]
            else:
                grading += [(m - 1, s) for m, s in (self.gradings("K-", x) for x in states)]
        diff: list[dict] = [defaultdict(int) for _ in labels]

        def put(src: str, tgt: str, terms: list[Terms]) -> None:
            o, p = offset[src], offset[tgt]
            for i, t in enumerate(terms):
                for (j, mono), v in t.items():
                    diff[o + i][(p + j, mono)] += v

        for name in ("X", "Y", "Yp", "Xp"):
            put(name, name, self.internal(name))
        put("X", "Y", self.D_Aminus())
        put("X", "Yp", compose(self.identification_I(), self.Dprime_B()))
        put("Y", "Xp", compose(self.D_B(), self.identification_I()))
        put("Yp", "Xp", self.D_Aplus())
        e = BigradedComplex(RingSpec(self.n), labels, grading, [dict(d) for d in diff],
                            provenance=f"E of template {self.t.name}")
        self._cfk_cache["E"] = e
        return e

    def horizontal_f(self) -> list[Terms]:
        """``D_A- + D_A+`` as a map from CFK(K+) to CFK(K-), indexed by state."""
        g = {s: i for i, s in enumerate(self.states)}
        out: list[Terms] = [{} for _ in self.states]
        for src, tgt, terms in ((self.X, self.Y, self.D_Aminus()), (self.Yp, self.Xp, self.D_Aplus())):
            for s, t in zip(src, terms):
                out[g[s]] = {(g[tgt[j]], mono): v for (j, mono), v in t.items()}
        return out

    # ---- extended maps on K0 over G ----------------------------------------

    @cached_property
    def _gindex(self) -> dict:
        return {s: i for i, s in enumerate(self.states)}

    def globalize(self, src, tgt, terms: list[Terms]) -> list[Terms]:
        """Reindex a map between parts as a map on all states."""
        g = self._gindex
        out: list[Terms] = [{} for _ in self.states]
        for s, t in zip(src, terms):
            acc = defaultdict(int, out[g[s]])
            for (j, mono), v in t.items():
                acc[(g[tgt[j]], mono)] += v
            out[g[s]] = {k: v % 2 for k, v in acc.items() if v % 2}
        return out

    def eD_A0(self) -> list[Terms]:
        return self.marked_rectangle_map("G", self.states, self.states,
                                         forbid=("B1", "B2"), exactly={"Azero": 1})

    def eD_B(self) -> list[Terms]:
        return self.marked_rectangle_map("G", self.states, self.states, ("B1", "B2"))

    def eD_A0B(self) -> list[Terms]:
        return self.marked_rectangle_map("G", self.states, self.states, ("B1", "B2"),
                                         exactly={"Azero": 1})

    def D_B_full(self) -> list[Terms]:
        return self.globalize(self.Y, self.X, self.D_B())

    def vertical_V(self) -> list[Terms]:
        """``D'_B o I`` on ``X`` plus ``I o D_B`` on ``Y``: from K0 on G to K0 on G'."""
        I = self.identification_I()
        a = self.globalize(self.X, self.Yp, compose(I, self.Dprime_B()))
        b = self.globalize(self.Y, self.Xp, compose(self.D_B(), I))
        return add_terms(a, b)


# --------------------------------------------------------------------------
# Reports


@dataclass(frozen=True)
class ReportRow:
    check: str
    bigrading: str
    lhs: str
    rhs: str
    verdict: bool

    def tsv(self) -> str:
        return "\t".join((self.check, self.bigrading, self.lhs, self.rhs,
                          "PASS" if self.verdict else "FAIL"))


@dataclass
class SkeinReport:
    template: str
    rows: list[ReportRow] = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.verdict for r in self.rows)

    def failures(self) -> list[ReportRow]:
        return [r for r in self.rows if not r.verdict]

    def verdict(self, check: str) -> bool:
        rows = [r for r in self.rows if r.check == check]
        if not rows:
            raise KeyError(check)
        return all(r.verdict for r in rows)

    def checks(self) -> list[str]:
        return list(dict.fromkeys(r.check for r in self.rows))

    def to_tsv(self) -> str:
        lines = ["check\tbigrading\tlhs\trhs\tverdict"] + [r.tsv() for r in self.rows]
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        out = [f"template {self.template}"]
        for name in self.checks():
            rows = [r for r in self.rows if r.check == name]
            bad = [r for r in rows if not r.verdict]
            if len(rows) == 1 and rows[0].bigrading == "-":
                r = rows[0]
                detail = r.lhs if r.verdict else f"{r.lhs} != {r.rhs}"
                out.append(f"{'PASS' if r.verdict else 'FAIL'}  {name}: {detail}")
            else:
                out.append(f"{'PASS' if not bad else 'FAIL'}  {name}: {len(rows) - len(bad)}/{len(rows)} bigradings")
                for r in bad[:8]:
                    out.append(f"      at ({r.bigrading}): {r.lhs} vs {r.rhs}")
        for name, table in self.tables.items():
            out.append(f"table {name}")
            out.extend("  " + line for line in table.serialize().splitlines())
        return "\n".join(out) + "\n"


def _add(rows: list, check: str, ok: bool, lhs: str = "ok", rhs: str = "ok", bigrading: str = "-") -> None:
    rows.append(ReportRow(check, bigrading, lhs, rhs, ok))


def _witness(terms: list[Terms], labels, tlabels) -> Optional[str]:
    hit = first_nonzero(terms, labels)
    if hit is None:
        return None
    src, j, mono, _ = hit
    return f"{_fmt(src)}->{_fmt(tlabels[j])} U^{','.join(map(str, mono))}"


def _fmt(lab) -> str:
    if isinstance(lab, tuple) and lab and isinstance(lab[0], str):
        return f"{lab[0]}:{_fmt(lab[1])}"
    return "".join(map(str, lab)) if all(v < 10 for v in lab) else ",".join(map(str, lab))


def _scalar(n: int, count: int, variables, index=None) -> list[Terms]:
    out = []
    for i in range(count):
        t: dict = defaultdict(int)
        for v in variables:
            e = [0] * n
            e[v] = 1
            t[(i if index is None else index[i], tuple(e))] += 1
        out.append({k: c % 2 for k, c in t.items() if c % 2})
    return out


def _diff_witness(a: list[Terms], b: list[Terms], labels, tlabels) -> Optional[str]:
    return _witness(add_terms(a, b), labels, tlabels)


def link_triple_checks(t: SkeinTemplate) -> list[ReportRow]:
    """Component counts, linking numbers and the classical skein relation."""
    rows: list[ReportRow] = []
    links = {w: trace_link(t.grid(w)) for w in ("K+", "K-", "K0", "K0'")}
    ell = {w: lk.ell for w, lk in links.items()}
    same = t.same_component
    want0 = ell["K+"] + 1 if same else ell["K+"] - 1
    _add(rows, "components", ell["K-"] == ell["K+"] and ell["K0"] == want0 and ell["K0'"] == ell["K0"],
         " ".join(f"{w}={v}" for w, v in ell.items()),
         f"K-=K+, K0={want0}")
    if not same:
        # components through O_a and O_b; in G' the O of G-column v sits in column swap_col(v)
        e = t.edges
        cp = links["K+"].component_of_O
        cm = links["K-"].component_of_O
        lp = links["K+"].linking_number(cp[t.swap_col(e["a"])], cp[t.swap_col(e["b"])])
        lm = links["K-"].linking_number(cm[e["a"]], cm[e["b"]])
        _add(rows, "linking_number", lp - lm == 1, f"lk+ - lk- = {lp - lm}", "1")
    dp, dm, d0 = (alexander_oracle(links[w]) for w in ("K+", "K-", "K0"))
    _add(rows, "alexander_skein", skein_relation_holds(dp, dm, d0),
         f"D+={dp}; D-={dm}; D0={d0}", "D+ - D- = (t^1/2 - t^-1/2) D0")
    d0p = alexander_oracle(links["K0'"])
    _add(rows, "K0_grids_agree", d0p.equiv(d0), f"{d0p}", f"{d0}")
    return rows


def algebraic_checks(S: SkeinComplexes) -> list[ReportRow]:
    """Scalar identities, ``D_B`` on ``X`` and cone reassembly, with witnesses."""
    rows: list[ReportRow] = []
    t, n = S.t, S.n
    e = t.edges
    abcd = [e[k] for k in "abcd"]
    lhs = compose(S.D_Aminus(), S.D_B())
    w = _diff_witness(lhs, _scalar(n, len(S.X), abcd), S.X, S.X)
    _add(rows, "scalar_identity_minus", w is None, w or "D_B o D_A- = U_a+U_b+U_c+U_d on X")
    lhs = compose(S.Dprime_B(), S.D_Aplus())
    w = _diff_witness(lhs, _scalar(n, len(S.Xp), abcd), S.Xp, S.Xp)
    _add(rows, "scalar_identity_plus", w is None, w or "D_A+ o D'_B = U_a+U_b+U_c+U_d on X'")
    w = _witness(S.D_B(S.X), S.X, S.X)
    _add(rows, "D_B_annihilates_X", w is None, w or "zero")

    def reassembly(name, which, pieces, multi_check):
        full = S.cfk(which).diff
        built = [{} for _ in S.states]
        for src, tgt, terms in pieces:
            built = add_terms(built, S.globalize(src, tgt, terms))
        w = _diff_witness(full, built, S.states, S.states)
        ok = w is None
        if ok and multi_check is not None:
            prime = which == "K+"
            doubled = S.rect_map(prime, S.states, S.states, multi_check)
            w = _witness(doubled, S.states, S.states)
            ok = w is None
        _add(rows, name, ok, w or "term-by-term equal")

    reassembly("reassembly_K-", "K-",
               [(S.X, S.X, S.internal("X")), (S.Y, S.Y, S.internal("Y")), (S.Y, S.X, S.D_B())],
               lambda c: not c["X0"] and not c["Azero"] and not c["Aminus"] and c["B1"] + c["B2"] >= 2)
    reassembly("reassembly_K+", "K+",
               [(S.Xp, S.Xp, S.internal("Xp")), (S.Yp, S.Yp, S.internal("Yp")), (S.Xp, S.Yp, S.Dprime_B())],
               lambda c: not c["X0"] and not c["Azero"] and not c["Aplus"] and c["B1"] + c["B2"] >= 2)
    reassembly("reassembly_K0", "K0",
               [(S.X, S.X, S.internal("X")), (S.Y, S.Y, S.internal("Y")), (S.X, S.Y, S.D_Aminus())],
               lambda c: not c["X0"] and not c["B1"] and not c["B2"] and c["Azero"] + c["Aminus"] >= 2)
    reassembly("reassembly_K0'", "K0'",
               [(S.Xp, S.Xp, S.internal("Xp")), (S.Yp, S.Yp, S.internal("Yp")), (S.Yp, S.Xp, S.D_Aplus())],
               lambda c: not c["X0"] and not c["B1"] and not c["B2"] and c["Azero"] + c["Aplus"] >= 2)
    return rows


def validate_template(t: SkeinTemplate) -> list[ReportRow]:
    """Structure, link triple and exact algebraic identities."""
    rows: list[ReportRow] = []
    try:
        check_structure(t)
    except TemplateError as exc:
        _add(rows, "structure", False, str(exc), "valid template")
        return rows
    _add(rows, "structure", True, "markings, block, triangle and edges valid")
    rows += link_triple_checks(t)
    rows += algebraic_checks(SkeinComplexes(t))
    return rows


def _grading_rows(S: SkeinComplexes) -> list[ReportRow]:
    rows: list[ReportRow] = []
    t = S.t
    # Maslov depends only on the O's of a grid
    bad = [s for s in S.states if S.gradings("K-", s)[0] != S.gradings("K0", s)[0]
           or S.gradings("K+", s)[0] != S.gradings("K0'", s)[0]]
    _add(rows, "maslov_O_only", not bad, f"{len(bad)} mismatches", "0")
    f = ChainMap(S.cfk("K+"), S.cfk("K-"), S.horizontal_f(), (0, 0), "f")
    ok, wit = chain_map_check(f)
    _add(rows, "f_preserves_bigrading", ok, "ok" if ok else str(wit), "chain map of degree (0,0)")
    shifts = {(S.gradings("K+", x)[1] - S.gradings("K0", x)[1]) for x in S.X}
    want = {-1} if t.same_component else {0}
    _add(rows, "alexander_X_K+_vs_K0", shifts == want, f"{sorted(shifts)}", f"{sorted(want)}")
    return rows


def _part_complex(S: SkeinComplexes, part: str) -> BigradedComplex:
    """One of X, Y, X', Y' with its internal differential and its grading in E."""
    E = S.build_E()
    idx = [i for i, lab in enumerate(E.labels) if lab[0] == part]
    return BigradedComplex(RingSpec(S.n), [E.labels[i][1] for i in idx],
                           [E.grading[i] for i in idx], S.internal(part))


_E_PIECES = {"column_K+": (("X", "Yp"), "K+"), "column_K-": (("Y", "Xp"), "K-"),
             "row_K0": (("X", "Y"), "K0"), "row_K0'": (("Yp", "Xp"), "K0'")}


def _e_restrictions(S: SkeinComplexes, E: BigradedComplex) -> list[ReportRow]:
    """E restricted to each column and row, compared term by term."""
    rows: list[ReportRow] = []
    g = S._gindex
    for name, (parts, which) in _E_PIECES.items():
        keep = {i for i, lab in enumerate(E.labels) if lab[0] in parts}
        restricted: list[Terms] = [{} for _ in S.states]
        for i in keep:
            restricted[g[E.labels[i][1]]] = {(g[E.labels[j][1]], mono): v
                                             for (j, mono), v in E.diff[i].items() if j in keep}
        w = _diff_witness(restricted, S.cfk(which).diff, S.states, S.states)
        _add(rows, f"E_{name}", w is None, w or f"equals CFK-minus of {which}")
    return rows


def _extend(w: Window, k: int = 2) -> Window:
    return Window(w.m0 - k, w.m1 + k, w.s0 - k, w.s1 + k)


def _compare(rows, name, window, lhs: RankTable, rhs, shift=(0, 0)) -> None:
    for m, s in window.points():
        a = lhs[(m, s)]
        b = rhs[(m + shift[0], s + shift[1])]
        _add(rows, name, a == b, str(a), str(b), f"{m},{s}")


def _les_rows(rows, name, window, A: RankTable, B: RankTable, F: RankTable, T) -> None:
    """``dim T_{m-1,s} = dim B_m - rk f_m + dim A_{m-1} - rk f_{m-1}``."""
    for m, s in window.points():
        lhs = T[(m - 1, s)]
        rhs = B[(m, s)] - F[(m, s)] + A[(m - 1, s)] - F[(m - 1, s)]
        _add(rows, name, lhs == rhs, str(lhs), str(rhs), f"{m},{s}")


def _triangle(S: SkeinComplexes, relations, big: Window):
    P = specialize(S.cfk("K+"), relations)
    Q = specialize(S.cfk("K-"), relations)
    f = ChainMap(P, Q, S.horizontal_f(), (0, 0), "f")
    pp, qp = GradedPieces(P), GradedPieces(Q)
    return (bigraded_ranks(P, big, pp), bigraded_ranks(Q, big, qp),
            induced_rank_table(f, big, pp, qp))


def graded_skein_rows(S: SkeinComplexes, window: Window, level: str,
                      shape: Optional[GradedModuleShape] = None) -> list[ReportRow]:
    """Rank-exactness of the hat or minus triangle at every window bigrading.

    Same component: the third term is the ``U_a = U_b`` quotient of K0 (with
    ``U_a = 0`` at hat level).  Different components: it is ``H(K0)``
    tensored with ``shape``, which defaults to V (hat) or W (minus).
    """
    if level not in ("hat", "minus"):
        raise ValueError(f"unknown level {level!r}")
    t, e, big = S.t, S.t.edges, _extend(window)
    C = S.cfk("K0")
    rows: list[ReportRow] = []
    if t.same_component:
        if shape is not None:
            raise ValueError("a module shape only applies to different-component templates")
        rel = [("zero", e["a"])] if level == "hat" else []
        A, B, F = _triangle(S, rel, big)
        T = bigraded_ranks(specialize(C, rel + [("eq", e["a"], e["b"])]), big)
        _les_rows(rows, f"{level}_les", window, A, B, F, T)
        return rows
    if level == "hat":
        A, B, F = _triangle(S, [("zero", e["a"]), ("zero", e["b"])], big)
        base = bigraded_ranks(specialize(C, [("zero", e["a"])]), big)
        name, shape = "hat_les_V", shape or V_SHAPE
    else:
        A, B, F = _triangle(S, [], big)
        base = bigraded_ranks(C, big)
        name, shape = "minus_les_W", shape or W_SHAPE
    _les_rows(rows, name, window, A, B, F, tensor_shape(base, shape))
    return rows


def skein_report(t: SkeinTemplate, window: Window) -> SkeinReport:
    report = SkeinReport(t.name)
    rows = report.rows
    rows += validate_template(t)
    if not rows[0].verdict:
        return report
    S = SkeinComplexes(t)
    e = t.edges
    big = _extend(window)
    rows += _grading_rows(S)

    n = S.n
    C, Cp = S.cfk("K0"), S.cfk("K0'")
    ok, wit = chain_map_check(ChainMap(_part_complex(S, "X"), _part_complex(S, "Xp"),
                                       S.identification_I(), (0, 1), "I"))
    _add(rows, "I_chain_map", ok, "ok" if ok else str(wit), "chain map, Maslov preserved")
    phi = ChainMap(Cp, C, S.pentagon_map_Phi(), (0, 0), "Phi")
    ok, wit = chain_map_check(phi)
    _add(rows, "Phi_chain_map", ok, "ok" if ok else str(wit))
    cpieces, cppieces = GradedPieces(C), GradedPieces(Cp)
    hC, hCp = bigraded_ranks(C, big, cpieces), bigraded_ranks(Cp, big, cppieces)
    _compare(rows, "Phi_quasi_iso_ranks", window, hC, hCp)
    if ok:
        induced = induced_rank_table(phi, window, cppieces, cpieces)
        _compare(rows, "Phi_induced_iso", window, induced, hCp)

    # homotopy identity
    D = C.diff
    A0B, A0, B = S.eD_A0B(), S.eD_A0(), S.eD_B()
    lhs = add_terms(compose(A0B, D), compose(D, A0B))
    rhs = add_terms(add_terms(compose(A0, B), compose(S.D_B_full(), A0)),
                    _scalar(n, len(S.states), [e["b"], e["c"]]))
    w = _diff_witness(lhs, rhs, S.states, S.states)
    _add(rows, "homotopy_identity", w is None, w or "exact")
    essential = _witness(add_terms(lhs, add_terms(compose(A0, B), compose(S.D_B_full(), A0))),
                         S.states, S.states)
    _add(rows, "homotopy_scalar_term_needed", essential is not None,
         "dropping U_b+U_c breaks the identity" if essential else "identity holds without it")

    # Phi o V is homotopic to U_b + U_c
    V = S.vertical_V()
    pv = add_terms(compose(V, phi.terms), _scalar(n, len(S.states), [e["b"], e["c"]]))
    pv_map = ChainMap(C, C, normalize_terms(pv, C.ring), (-2, -1), "PhiV+Ub+Uc")
    ok, wit = chain_map_check(pv_map)
    _add(rows, "PhiV_chain_map", ok, "ok" if ok else str(wit))
    if ok:
        zero = RankTable({})
        _compare(rows, "PhiV_homotopic_to_Ub_plus_Uc", window,
                 induced_rank_table(pv_map, window, cpieces, cpieces), zero)

    # E
    E = S.build_E()
    ok, wit = d_squared_check(E)
    _add(rows, "E_d_squared", ok, "zero" if ok else str(wit))
    bad = grading_shift_violations(E)
    _add(rows, "E_homogeneous", not bad, f"{len(bad)} off-degree terms", "0")
    rows += _e_restrictions(S, E)
    hE = bigraded_ranks(E, big)
    M = mapping_cone(multiplication_map(C, {e["b"]: 1, e["c"]: 1}))
    hM = bigraded_ranks(M, big)
    shift = (0, 0) if t.same_component else (0, -1)
    _compare(rows, "E_vs_cone", window, hE, hM, shift)
    report.tables["H(E)"] = hE.restrict(window)
    report.tables["H(cone)" + ("" if t.same_component else " at (m,s-1)")] = \
        RankTable({(m, s): hM[(m + shift[0], s + shift[1])] for m, s in window.points()
                   if hM[(m + shift[0], s + shift[1])]}, window)

    # hat and minus exact triangles
    for level in ("hat", "minus"):
        rows += graded_skein_rows(S, window, level)
    if not t.same_component:
        hat0 = bigraded_ranks(specialize(C, [("zero", e["a"])]), big)
        report.tables["HFK-hat(K0)"] = hat0.restrict(window)
    return report
