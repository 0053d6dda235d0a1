from __future__ import annotations

import pytest

from conftest import load_grid, random_grids
from gridskein.complexes import (BigradedComplex, ComplexError, RingSpec, build_complex,
                                 d_squared_check, grading_shift_violations, specialize)


def test_unknot_tilde():
    c = build_complex(load_grid("unknot"), "tilde")
    assert sorted(c.grading) == [(-1, -1), (0, 0)]
    assert all(not t for t in c.diff)


def test_trefoil_complexes_square_to_zero():
    g = load_grid("trefoil")
    for flavor in ("tilde", "minus"):
        c = build_complex(g, flavor)
        assert len(c) == 120
        assert d_squared_check(c) == (True, None)
        assert grading_shift_violations(c) == []


def test_random_minus_terms_drop_maslov_by_one():
    for g in random_grids(20, max_n=4, seed=7):
        assert grading_shift_violations(build_complex(g)) == []


def test_specialize_all_zero_equals_tilde():
    g = load_grid("trefoil")
    minus = build_complex(g, "minus")
    zeroed = specialize(minus, [("zero", i) for i in range(g.n)])
    tilde = build_complex(g, "tilde")
    assert zeroed.diff == tilde.diff
    assert zeroed.grading == tilde.grading


def test_ring_relations_propagate_zero():
    ring = RingSpec(3, [("zero", 1), ("eq", 1, 2)])
    assert ring.rep(1) is None and ring.rep(2) is None
    assert ring.rep(0) == 0
    assert ring.normalize((0, 0, 1)) is None
    assert ring.normalize((2, 0, 0)) == (2, 0, 0)


def test_ring_identification_merges_exponents():
    ring = RingSpec(3, [("eq", 2, 0)])
    assert ring.free_reps() == [0, 1]
    assert ring.normalize((1, 0, 3)) == (4, 0, 0)


@pytest.mark.parametrize("rel", [("zero", 5), ("eq", 0, 9), ("mul", 0)])
def test_ring_rejects_bad_relations(rel):
    with pytest.raises(ComplexError):
        RingSpec(3, [rel])


def test_hopf_identification_across_components():
    g = load_grid("hopf")
    # columns 0 and 1 carry O-markings of different components
    c = specialize(build_complex(g), [("eq", 0, 1)])
    assert c.ring.free_reps() == [0, 2, 3]
    assert d_squared_check(c)[0]


def test_ring_mismatch_rejected():
    with pytest.raises(ComplexError):
        build_complex(load_grid("trefoil"), "minus", RingSpec(4))
    with pytest.raises(ComplexError):
        build_complex(load_grid("trefoil"), "hat")


def test_deleted_term_breaks_d_squared():
    c = build_complex(load_grid("trefoil"), "minus")
    diff = [dict(t) for t in c.diff]
    for i, t in enumerate(diff):
        if t:
            del t[min(t)]
            break
    broken = BigradedComplex(c.ring, c.labels, c.grading, diff)
    ok, witness = d_squared_check(broken)
    assert not ok
    src, tgt, mono, coef = witness
    assert src in c.labels and tgt in c.labels


def test_dump_format_is_sorted_and_stable():
    c = build_complex(load_grid("unknot"), "minus")
    text = c.dump()
    assert text == build_complex(load_grid("unknot"), "minus").dump()
    assert text.splitlines() == [
        "gen 01 m=0 s=0",
        "gen 10 m=-1 s=-1",
        "d 10 -> 01 U^0,1 sign=+1",
        "d 10 -> 01 U^1,0 sign=+1",
    ]
