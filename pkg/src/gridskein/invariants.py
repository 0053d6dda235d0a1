"""High-level invariants of a single grid: tilde, hat and minus ranks."""

from __future__ import annotations

from math import comb
from typing import Optional

from .complexes import build_complex, u_equals_one_complex
from .grid import GridDiagram, num_components
from .homology import RankTable, Window, bigraded_ranks, hat_from_tilde


def tilde_ranks(g: GridDiagram) -> RankTable:
    return bigraded_ranks(build_complex(g, "tilde"))


def hfk_hat(g: GridDiagram) -> RankTable:
    """Hat ranks, obtained by exact division of the tilde table."""
    return hat_from_tilde(tilde_ranks(g), g.n, num_components(g))


def hfk_minus(g: GridDiagram, window: Optional[Window] = None) -> RankTable:
    return bigraded_ranks(build_complex(g, "minus"), window)


def normalization_ranks(g: GridDiagram) -> dict[int, int]:
    """Homology of the X-free, all-``U_i = 1`` complex, keyed by ``N``."""
    c = u_equals_one_complex(g)
    table = bigraded_ranks(c)
    return {m: v for (m, _), v in sorted(table.entries.items())}


def torus_normalization(n: int, ell: int) -> dict[int, int]:
    """Ranks of ``H_*(T^(n-1))`` placed by ``H_m = H_(m + 2ell - n - 1)``.

    Torus homology is taken in degrees ``0, -1, ..., -(n-1)`` with rank
    ``C(n-1, -k)`` in degree ``k``.
    """
    out = {}
    for k in range(-(n - 1), 1):
        out[k - 2 * ell + n + 1] = comb(n - 1, -k)
    return dict(sorted(out.items()))
