from __future__ import annotations

import random

import pytest

from gridskein.catalog import corpus_dir, resolve
from gridskein.grid import parse_and_validate, random_grid
from gridskein.homology import Window
from gridskein.skein import parse_template

CORPUS_GRIDS = ["unknot", "hopf", "trefoil", "figure_eight", "trefoil_stabilized"]
WINDOW = Window(-8, 2, -4, 4)

# criterion number -> (title, passed)
ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def load_grid(name: str):
    return parse_and_validate(resolve(f"{name}.grid").read_text())


def load_template(name: str):
    return parse_template(resolve(f"{name}.skein").read_text(), name)


def random_grids(count: int = 100, max_n: int = 5, seed: int = 20240611):
    rng = random.Random(seed)
    return [random_grid(rng.randint(2, max_n), rng) for _ in range(count)]


@pytest.fixture(scope="session")
def corpus_grids():
    return {name: load_grid(name) for name in CORPUS_GRIDS}


@pytest.fixture(scope="session")
def trefoil_template():
    return load_template("trefoil")


@pytest.fixture(scope="session")
def hopf_template():
    return load_template("hopf")


@pytest.fixture(scope="session")
def bundled_corpus():
    return corpus_dir()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {k:>2}: {title}")
