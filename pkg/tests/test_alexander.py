from __future__ import annotations

import random

from conftest import CORPUS_GRIDS, load_grid
from gridskein.alexander import (LaurentPoly, alexander_oracle, euler_characteristic,
                                 skein_relation_holds)
from gridskein.grid import random_grid, trace_link

P = LaurentPoly.from_exponents


def one_minus_tinv(k):
    return P({0: 1, -1: -1}) ** k


def test_laurent_arithmetic():
    a = P({1: 1, 0: -1})
    assert str(a) == "t - 1"
    assert str(a * a) == "t^2 - 2t + 1"
    assert (a - a).is_zero()
    assert P({3: 2}).normalized() == P({0: 1}) * P({0: 2})
    assert (-a).equiv(a.shift(6))
    assert str(LaurentPoly.from_dict({1: 1, -1: -1})) == "t^1/2 - t^-1/2"


def test_symmetrized_centres_the_range():
    p = P({0: 1, 1: -1, 2: 1}).symmetrized()
    assert p.as_dict() == {-2: 1, 0: -1, 2: 1}


def test_oracle_examples():
    assert alexander_oracle(trace_link(load_grid("unknot"))) == P({0: 1})
    assert alexander_oracle(trace_link(load_grid("trefoil"))) == P({0: 1, 1: -1, 2: 1})
    assert alexander_oracle(trace_link(load_grid("figure_eight"))) == P({0: 1, 1: -3, 2: 1})


def test_unknot_euler():
    assert euler_characteristic(load_grid("unknot")) == P({0: 1, -1: -1})


def test_euler_matches_oracle_on_corpus_knots():
    for name in CORPUS_GRIDS:
        g = load_grid(name)
        link = trace_link(g)
        if link.ell != 1:
            continue
        chi = euler_characteristic(g)
        assert chi.equiv(alexander_oracle(link) * one_minus_tinv(g.n - 1)), name


def test_euler_matches_oracle_on_random_knots():
    rng = random.Random(99)
    seen = 0
    while seen < 25:
        g = random_grid(rng.randint(2, 5), rng)
        link = trace_link(g)
        if link.ell != 1:
            continue
        seen += 1
        chi = euler_characteristic(g)
        assert chi.equiv(alexander_oracle(link) * one_minus_tinv(g.n - 1)), g


def test_euler_vanishes_at_one():
    for name in ("trefoil", "figure_eight"):
        assert sum(euler_characteristic(load_grid(name)).as_dict().values()) == 0


def test_skein_relation_helper():
    # trefoil, unknot, Hopf link
    assert skein_relation_holds(P({0: 1, 1: -1, 2: 1}), P({0: 1}), P({0: -1, 1: 1}))
    assert not skein_relation_holds(P({0: 1, 1: -1, 2: 1}), P({0: 1}), P({0: 1}))
