from __future__ import annotations

import itertools

import pytest

from gridskein.complexes import build_complex, d_squared_check
from gridskein.grid import GridDiagram
from gridskein.signs import SignAssignment, axiom_relations, empty_rectangles, sign_assignment


def all_grids(n):
    for O in itertools.permutations(range(n)):
        for X in itertools.permutations(range(n)):
            if all(a != b for a, b in zip(O, X)):
                yield GridDiagram(n, O, X)


def products(sa, kind):
    out = set()
    for rel in axiom_relations(sa.n):
        if rel.kind == kind:
            p = 1
            for r in rel.rects:
                p *= sa.table[r]
            out.add(p)
    return out


def test_n2_annuli():
    sa = sign_assignment(2)
    assert products(sa, "vertical") == {-1}
    assert products(sa, "horizontal") == {1}


@pytest.mark.parametrize("n", [2, 3, 4])
def test_axioms_hold(n):
    sa = sign_assignment(n)
    assert sa.violations() == []
    kinds = {rel.kind for rel in axiom_relations(n)}
    assert kinds == ({"vertical", "horizontal"} if n == 2 else {"square", "vertical", "horizontal"})


def test_relation_counts_n3():
    rels = axiom_relations(3)
    assert len(empty_rectangles(3)) == 27
    counts = {k: sum(r.kind == k for r in rels) for k in ("square", "vertical", "horizontal")}
    assert counts == {"square": 36, "vertical": 18, "horizontal": 18}


def test_square_relations_use_distinct_intermediates():
    for rel in axiom_relations(3):
        if rel.kind == "square":
            (x, i, j), _, (x2, k, l), _ = rel.rects
            assert x == x2
            y1 = list(x)
            y1[i], y1[j] = x[j], x[i]
            y2 = list(x)
            y2[k], y2[l] = x[l], x[k]
            assert y1 != y2


def test_integer_d_squared_n3():
    sa = sign_assignment(3)
    for g in all_grids(3):
        for flavor in ("tilde", "minus"):
            c = build_complex(g, flavor, signs=sa)
            assert c.modulus == 0
            assert d_squared_check(c) == (True, None)


def test_trivial_signs_fail_over_integers():
    plus = SignAssignment(3, {r: 1 for r in empty_rectangles(3)})
    assert plus.violations()
    hits = [g for g in all_grids(3) if not d_squared_check(build_complex(g, "minus", signs=plus))[0]]
    assert hits


def test_sign_depends_only_on_grid_size():
    g = GridDiagram(3, (0, 1, 2), (1, 2, 0))
    assert sign_assignment(g) is sign_assignment(3)
