from __future__ import annotations

import pytest

from conftest import load_grid, random_grids
from gridskein.complexes import build_complex, specialize
from gridskein.homology import (ChainMap, GradedModuleShape, HomologyError, RankTable, V_SHAPE,
                                W_SHAPE, Window, bigraded_ranks, chain_map_check,
                                default_window, euler_from_generators, gf2_kernel, gf2_rank,
                                hat_from_tilde, identity_map, induced_rank_table,
                                mapping_cone, multiplication_map, tensor_shape, zero_map)
from gridskein.invariants import hfk_hat, hfk_minus, tilde_ranks


def test_gf2_rank_and_kernel():
    rows = [0b011, 0b110, 0b101]
    assert gf2_rank(rows) == 2
    kernel = gf2_kernel(rows)
    assert len(kernel) == 1
    z = kernel[0]
    acc = 0
    for i, r in enumerate(rows):
        if z >> i & 1:
            acc ^= r
    assert acc == 0


def test_window_parse():
    assert Window.parse("-8:2,-4:4") == Window(-8, 2, -4, 4)
    assert str(Window(-8, 2, -4, 4)) == "-8:2,-4:4"
    for bad in ("1:0,0:0", "1,2", "a:b,c:d", "-1:0"):
        with pytest.raises(HomologyError):
            Window.parse(bad)


def test_unknot_tilde_ranks():
    assert tilde_ranks(load_grid("unknot")).entries == {(0, 0): 1, (-1, -1): 1}


def test_unknot_minus_tower():
    t = hfk_minus(load_grid("unknot"), Window(-6, 0, -3, 0))
    assert t.entries == {(-2 * k, -k): 1 for k in range(4)}


def test_trefoil_tilde_and_hat():
    g = load_grid("trefoil")
    t = tilde_ranks(g)
    # one rank-2 factor per extra basepoint: 3 * 2^(5-1)
    assert t.total() == 48
    hat = hat_from_tilde(t, 5, 1)
    assert hat.total() == 3
    assert sorted(s for _, s in hat.entries) == [-1, 0, 1]
    ms = sorted(m for m, _ in hat.entries)
    assert ms == list(range(ms[0], ms[0] + 3))


def test_hopf_hat_total():
    assert hfk_hat(load_grid("hopf")).total() == 4


def test_hat_from_tilde_rejects_inexact_division():
    with pytest.raises(HomologyError):
        hat_from_tilde(RankTable({(0, 0): 1}), 3, 1)


def test_rank_table_serialization():
    t = RankTable({(0, 0): 1, (-2, -1): 1}, Window(-2, 0, -1, 0))
    assert t.serialize() == "# window -2:0,-1:0\n-2\t-1\t1\n0\t0\t1\n"
    with pytest.raises(HomologyError):
        RankTable({(5, 5): 1}, Window(0, 0, 0, 0))


def test_tensor_shapes_on_unknot():
    unknot = RankTable({(0, 0): 1})
    assert tensor_shape(unknot, GradedModuleShape(((0, 0, 1),))) == unknot
    assert tensor_shape(unknot, V_SHAPE).entries == {(-1, 0): 2, (0, -1): 1, (1, 0): 1}
    assert tensor_shape(unknot, W_SHAPE).entries == {(0, 0): 1, (1, 1): 1}


def test_tensor_shape_reports_underflow():
    t = RankTable({(0, 0): 1}, Window(-1, 1, -1, 1))
    with pytest.raises(HomologyError, match="underflow"):
        tensor_shape(t, V_SHAPE, Window(-1, 1, -1, 1))


def test_module_shape_ranks_positive():
    with pytest.raises(HomologyError):
        GradedModuleShape(((0, 0, 0),))


def test_identity_and_zero_maps():
    c = build_complex(load_grid("trefoil"), "minus")
    w = Window(-6, 2, -3, 2)
    h = bigraded_ranks(c, w)
    idm = identity_map(c)
    assert chain_map_check(idm) == (True, None)
    assert induced_rank_table(idm, w) == h
    z = zero_map(c, c)
    assert induced_rank_table(z, w).entries == {}
    assert bigraded_ranks(mapping_cone(idm), w).entries == {}
    cone0 = bigraded_ranks(mapping_cone(z), w)
    for m, s in w.points():
        if (m - 1, s) in w:
            assert cone0[(m, s)] == h[(m, s)] + h[(m - 1, s)]


def test_multiplication_is_chain_map():
    c = build_complex(load_grid("hopf"), "minus")
    assert chain_map_check(multiplication_map(c, {2: 1})) == (True, None)


def test_corrupted_map_detected():
    c = build_complex(load_grid("trefoil"), "minus")
    f = identity_map(c)
    terms = [dict(t) for t in f.terms]
    terms[7] = {}
    ok, witness = chain_map_check(ChainMap(c, c, terms))
    assert not ok and witness[0] in c.labels
    with pytest.raises(HomologyError):
        mapping_cone(ChainMap(c, c, terms))


def test_hopf_cone_matches_identified_quotient():
    g = load_grid("hopf")
    c = build_complex(g, "minus")
    # columns 0 and 1 lie on different components
    cone = mapping_cone(multiplication_map(c, {0: 1, 1: 1}))
    quotient = specialize(c, [("eq", 0, 1)])
    w = Window(-8, 2, -4, 3)
    assert bigraded_ranks(cone, w) == bigraded_ranks(quotient, w)


def _les_holds(f: ChainMap, w: Window) -> bool:
    dm, ds = f.shift
    big = Window(w.m0 - 4, w.m1 + 4, w.s0 - 2, w.s1 + 2)
    hs, ht = bigraded_ranks(f.source, big), bigraded_ranks(f.target, big)
    hc = bigraded_ranks(mapping_cone(f), w)
    rk = induced_rank_table(f, big)
    for m, s in w.points():
        a = (m - dm, s - ds)
        b = (m - dm - 1, s - ds)
        if hc[(m, s)] != ht[(m, s)] - rk[a] + hs[b] - rk[b]:
            return False
    return True


def test_cone_les_rank_identity_on_random_complexes():
    for k, g in enumerate(random_grids(12, max_n=4, seed=11)):
        c = build_complex(g, "minus")
        w = Window(-5, 2, -2, 1)
        for f in (multiplication_map(c, {0: 1}),
                  multiplication_map(c, {0: 1, g.n - 1: 1}),
                  ChainMap(c, c, c.diff, (-1, 0), "d")):
            assert chain_map_check(f)[0]
            assert _les_holds(f, w), (k, f.name)


def test_euler_characteristic_preserved():
    for g in random_grids(15, max_n=4, seed=3):
        c = build_complex(g, "tilde")
        w = default_window(c)
        h = bigraded_ranks(c, w)
        chi = h.euler_by_s()
        for s in range(w.s0, w.s1 + 1):
            assert chi.get(s, 0) == euler_from_generators(c, s, w)
