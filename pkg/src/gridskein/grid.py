"""Toroidal grid diagrams: data model, link tracing, gradings, rectangles.

Conventions used throughout the package:

* Columns and rows are indexed ``0..n-1``; rows grow upwards.
* ``sigma_O[i]`` / ``sigma_X[i]`` is the row of the marking in column ``i``.
  A marking sits at the centre of its cell, ``(i + 1/2, row + 1/2)``.
* A grid state is a tuple ``perm`` with ``perm[i]`` the row of its point on
  vertical circle ``i`` (the left edge of column ``i``).
* The link runs along columns from X to O and along rows from O to X;
  vertical segments cross over horizontal ones.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence


class GridError(ValueError):
    """Raised for malformed or invalid grid input."""


@dataclass(frozen=True)
class GridDiagram:
    n: int
    sigma_O: tuple[int, ...]
    sigma_X: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sigma_O", tuple(int(v) for v in self.sigma_O))
        object.__setattr__(self, "sigma_X", tuple(int(v) for v in self.sigma_X))
        validate(self)

    @property
    def O_cells(self) -> list[tuple[int, int]]:
        return list(enumerate(self.sigma_O))

    @property
    def X_cells(self) -> list[tuple[int, int]]:
        return list(enumerate(self.sigma_X))

    def with_X(self, sigma_X: Sequence[int]) -> "GridDiagram":
        return GridDiagram(self.n, self.sigma_O, tuple(sigma_X))

    def to_text(self) -> str:
        return "n={}\nO={}\nX={}\n".format(
            self.n, ",".join(map(str, self.sigma_O)), ",".join(map(str, self.sigma_X))
        )


def _is_perm(seq: Sequence[int], n: int) -> bool:
    return sorted(seq) == list(range(n))


def validate(g: GridDiagram) -> None:
    if g.n < 2:
        raise GridError(f"grid size must be at least 2, got n={g.n}")
    for name, sig in (("O", g.sigma_O), ("X", g.sigma_X)):
        if len(sig) != g.n:
            raise GridError(f"{name} has {len(sig)} entries, expected {g.n}")
        if not _is_perm(sig, g.n):
            raise GridError(f"{name}={list(sig)} is not a permutation of 0..{g.n - 1}")
    for col, (o, x) in enumerate(zip(g.sigma_O, g.sigma_X)):
        if o == x:
            raise GridError(f"shared cell: column {col}, row {o} carries both O and X")


_LINE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*=\s*(.*?)\s*$")


def parse_key_values(text: str) -> dict[str, str]:
    """Split ``key=value`` lines (``;`` also separates), skipping ``#`` comments."""
    out: dict[str, str] = {}
    for raw in text.replace(";", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise GridError(f"malformed line: {raw.strip()!r}")
        key, value = m.group(1), m.group(2)
        if key in out:
            raise GridError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _int_list(value: str, key: str) -> list[int]:
    try:
        return [int(tok) for tok in value.split(",") if tok.strip() != ""]
    except ValueError:
        raise GridError(f"{key} must be a comma-separated list of integers: {value!r}") from None


def grid_from_fields(fields: dict[str, str]) -> GridDiagram:
    for key in ("n", "O", "X"):
        if key not in fields:
            raise GridError(f"missing field {key!r}")
    try:
        n = int(fields["n"])
    except ValueError:
        raise GridError(f"n must be an integer: {fields['n']!r}") from None
    return GridDiagram(n, tuple(_int_list(fields["O"], "O")), tuple(_int_list(fields["X"], "X")))


def parse_and_validate(text: str) -> GridDiagram:
    """Parse the ``n=..``/``O=..``/``X=..`` grid format."""
    fields = parse_key_values(text)
    extra = set(fields) - {"n", "O", "X"}
    if extra:
        raise GridError(f"unknown keys in grid file: {sorted(extra)}")
    return grid_from_fields(fields)


# --------------------------------------------------------------------------
# Link tracing


@dataclass(frozen=True)
class Crossing:
    col: int  # the vertical (over) segment's column
    row: int  # the horizontal (under) segment's row
    sign: int
    over_component: int
    under_component: int
    # Wirtinger arc ids: over arc, under arc entering, under arc leaving.
    over_arc: int
    under_in: int
    under_out: int


@dataclass(frozen=True)
class LinkStructure:
    ell: int
    component_of_O: tuple[int, ...]
    crossings: tuple[Crossing, ...]
    num_arcs: int
    orientation: str = "columns X->O, rows O->X, vertical over horizontal"

    @property
    def writhe(self) -> int:
        return sum(c.sign for c in self.crossings)

    def linking_number(self, a: int, b: int) -> int:
        total = sum(c.sign for c in self.crossings
                    if {c.over_component, c.under_component} == {a, b} and a != b)
        return total // 2


def component_cycles(g: GridDiagram) -> list[list[int]]:
    """Cycles of O-columns; column ``i`` is followed by ``sigma_X^-1(sigma_O[i])``."""
    x_col_of_row = {r: c for c, r in enumerate(g.sigma_X)}
    seen: set[int] = set()
    cycles = []
    for start in range(g.n):
        if start in seen:
            continue
        cyc = []
        c = start
        while c not in seen:
            seen.add(c)
            cyc.append(c)
            c = x_col_of_row[g.sigma_O[c]]
        cycles.append(cyc)
    return cycles


def num_components(g: GridDiagram) -> int:
    return len(component_cycles(g))


def trace_link(g: GridDiagram) -> LinkStructure:
    n = g.n
    cycles = component_cycles(g)
    comp_of_O = [0] * n
    for k, cyc in enumerate(cycles):
        for c in cyc:
            comp_of_O[c] = k
    x_col_of_row = {r: c for c, r in enumerate(g.sigma_X)}
    o_col_of_row = {r: c for c, r in enumerate(g.sigma_O)}

    # Vertical segment in column c runs X -> O; horizontal in row r runs O -> X.
    def vdir(c):
        return 1 if g.sigma_O[c] > g.sigma_X[c] else -1

    def hdir(r):
        return 1 if x_col_of_row[r] > o_col_of_row[r] else -1

    def crosses(c, r):
        lo, hi = sorted((g.sigma_O[c], g.sigma_X[c]))
        left, right = sorted((o_col_of_row[r], x_col_of_row[r]))
        return lo < r < hi and left < c < right

    # Walk each component, numbering Wirtinger arcs; arcs break at undercrossings.
    arc_counter = 0
    under_arcs: dict[tuple[int, int], tuple[int, int]] = {}
    over_arc_at: dict[tuple[int, int], int] = {}
    for cyc in cycles:
        first_arc = arc_counter
        arc = arc_counter
        arc_counter += 1
        breaks = 0
        for c in cyc:
            # column c: X -> O (over everything it meets)
            r_vals = [r for r in range(n) if crosses(c, r)]
            r_vals.sort(key=lambda r: r * vdir(c))
            for r in r_vals:
                over_arc_at[(c, r)] = arc
            # row of the O in column c: O -> X (under everything it meets)
            r = g.sigma_O[c]
            c_vals = [cc for cc in range(n) if crosses(cc, r)]
            c_vals.sort(key=lambda cc: cc * hdir(r))
            for cc in c_vals:
                under_arcs[(cc, r)] = (arc, arc_counter)
                arc = arc_counter
                arc_counter += 1
                breaks += 1
        if breaks:
            # the last arc closes up with the first one
            last = arc
            arc_counter -= 1
            remap = {last: first_arc}
            for key, (i, o) in list(under_arcs.items()):
                under_arcs[key] = (remap.get(i, i), remap.get(o, o))
            for key, a in list(over_arc_at.items()):
                over_arc_at[key] = remap.get(a, a)

    crossings = []
    for (c, r), (ain, aout) in sorted(under_arcs.items()):
        over = (0, vdir(c))
        under = (hdir(r), 0)
        sign = 1 if over[0] * under[1] - over[1] * under[0] > 0 else -1
        crossings.append(Crossing(
            col=c, row=r, sign=sign,
            over_component=comp_of_O[c],
            under_component=comp_of_O[o_col_of_row[r]],
            over_arc=over_arc_at[(c, r)], under_in=ain, under_out=aout,
        ))
    return LinkStructure(len(cycles), tuple(comp_of_O), tuple(crossings), arc_counter)


# --------------------------------------------------------------------------
# Gradings


@dataclass(frozen=True, order=True)
class Bigrading:
    m: int
    s: int

    @property
    def n_grading(self) -> int:
        return self.m - 2 * self.s


def _count_sw(P, Q) -> int:
    return sum(1 for (a, b) in P for (c, d) in Q if a < c and b < d)


def _maslov_doubled(state_pts, marks) -> int:
    # M = J(x,x) - 2J(x,M) + J(M,M) + 1 with J(P,Q) = (I(P,Q)+I(Q,P))/2
    return (_count_sw(state_pts, state_pts) - _count_sw(state_pts, marks)
            - _count_sw(marks, state_pts) + _count_sw(marks, marks) + 1)


class GradingCalculator:
    """Absolute Maslov/Alexander gradings for one grid (cached constants)."""

    def __init__(self, g: GridDiagram, ell: Optional[int] = None):
        self.g = g
        self.ell = num_components(g) if ell is None else ell
        self._O = [(2 * i + 1, 2 * r + 1) for i, r in enumerate(g.sigma_O)]
        self._X = [(2 * i + 1, 2 * r + 1) for i, r in enumerate(g.sigma_X)]
        self._OO = _count_sw(self._O, self._O)
        self._XX = _count_sw(self._X, self._X)

    def maslov_pair(self, perm: Sequence[int]) -> tuple[int, int]:
        pts = [(2 * i, 2 * r) for i, r in enumerate(perm)]
        xx = _count_sw(pts, pts)
        mo = xx - _count_sw(pts, self._O) - _count_sw(self._O, pts) + self._OO + 1
        mx = xx - _count_sw(pts, self._X) - _count_sw(self._X, pts) + self._XX + 1
        return mo, mx

    def __call__(self, perm: Sequence[int]) -> Bigrading:
        if len(perm) != self.g.n:
            raise GridError(f"state of size {len(perm)} for a grid of size {self.g.n}")
        mo, mx = self.maslov_pair(perm)
        twice_a = mo - mx - (self.g.n - self.ell)
        if twice_a % 2:
            raise GridError("non-integral Alexander grading; inconsistent component count")
        return Bigrading(mo, twice_a // 2)


def gradings(g: GridDiagram, x: Sequence[int]) -> Bigrading:
    return GradingCalculator(g)(x)


def maslov_O(g: GridDiagram, x: Sequence[int]) -> int:
    pts = [(2 * i, 2 * r) for i, r in enumerate(x)]
    return _maslov_doubled(pts, [(2 * i + 1, 2 * r + 1) for i, r in enumerate(g.sigma_O)])


# --------------------------------------------------------------------------
# States and rectangles


def enumerate_states(
    g: GridDiagram,
    grading_filter: Optional[Callable[[Bigrading], bool]] = None,
    n_grading: Optional[int] = None,
) -> Iterator[tuple[int, ...]]:
    """All states in lexicographic order, optionally filtered.

    ``n_grading`` restricts to states with ``m - 2s`` equal to the given value;
    ``grading_filter`` is an arbitrary predicate on the bigrading.
    """
    calc = GradingCalculator(g) if (grading_filter or n_grading is not None) else None
    for perm in itertools.permutations(range(g.n)):
        if calc is not None:
            gr = calc(perm)
            if n_grading is not None and gr.n_grading != n_grading:
                continue
            if grading_filter is not None and not grading_filter(gr):
                continue
        yield perm


@dataclass(frozen=True)
class Rectangle:
    from_state: tuple[int, ...]
    to_state: tuple[int, ...]
    left: int      # first column covered
    width: int
    bottom: int    # first row covered
    height: int
    O_mult: tuple[int, ...]
    X_mult: tuple[int, ...]
    empty: bool

    def cells(self, n: int) -> list[tuple[int, int]]:
        return [((self.left + a) % n, (self.bottom + b) % n)
                for a in range(self.width) for b in range(self.height)]

    def contains_cell(self, cell: tuple[int, int], n: int) -> bool:
        c, r = cell
        return (c - self.left) % n < self.width and (r - self.bottom) % n < self.height


def rect_between_cols(n: int, x: Sequence[int], i: int, j: int):
    """Rectangle with lower-left corner on circle ``i`` and upper-right on ``j``.

    Returns ``(width, height, empty)``.
    """
    w = (j - i) % n
    h = (x[j] - x[i]) % n
    empty = True
    for t in range(1, w):
        col = (i + t) % n
        if 0 < (x[col] - x[i]) % n < h:
            empty = False
            break
    return w, h, empty


def in_rect(n: int, left: int, width: int, bottom: int, height: int, col: int, row: int) -> bool:
    return (col - left) % n < width and (row - bottom) % n < height


def make_rectangle(g: GridDiagram, x: Sequence[int], i: int, j: int) -> Rectangle:
    n = g.n
    x = tuple(x)
    w, h, empty = rect_between_cols(n, x, i, j)
    y = list(x)
    y[i], y[j] = x[j], x[i]
    O_mult = tuple(int(in_rect(n, i, w, x[i], h, c, r)) for c, r in enumerate(g.sigma_O))
    X_mult = tuple(int(in_rect(n, i, w, x[i], h, c, r)) for c, r in enumerate(g.sigma_X))
    return Rectangle(x, tuple(y), i, w, x[i], h, O_mult, X_mult, empty)


def rectangles_between(g: GridDiagram, x: Sequence[int], y: Sequence[int]) -> list[Rectangle]:
    if len(x) != g.n or len(y) != g.n:
        raise GridError("state/diagram size mismatch")
    diff = [i for i in range(g.n) if x[i] != y[i]]
    if len(diff) != 2:
        return []
    i, j = diff
    if x[i] != y[j] or x[j] != y[i]:
        return []
    return [make_rectangle(g, x, i, j), make_rectangle(g, x, j, i)]


def rectangles_from(g: GridDiagram, x: Sequence[int], empty_only: bool = True) -> Iterator[Rectangle]:
    n = g.n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if empty_only and not rect_between_cols(n, x, i, j)[2]:
                continue
            yield make_rectangle(g, x, i, j)


def random_grid(n: int, rng) -> GridDiagram:
    """Uniform random valid grid of size ``n`` (rejection sampling on X)."""
    sigma_O = list(range(n))
    rng.shuffle(sigma_O)
    while True:
        sigma_X = list(range(n))
        rng.shuffle(sigma_X)
        if all(a != b for a, b in zip(sigma_O, sigma_X)):
            return GridDiagram(n, tuple(sigma_O), tuple(sigma_X))
