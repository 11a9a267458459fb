import random

import pytest
from hypothesis import settings

from hopd.core import atom, diagram, interval, is_basepoint_pair, virtual_diagram

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

TOL = 1e-9


def rand_interval(rng: random.Random, grid: int = 0):
    """Random non-degenerate level-1 atom; grid > 0 snaps endpoints to a
    lattice so duplicate atoms and comparable pairs become likely."""
    if grid:
        b = rng.randrange(grid) / grid
        d = b + (1 + rng.randrange(grid)) / grid
    else:
        b = rng.uniform(0, 1)
        d = b + rng.uniform(1e-6, 1)
    return interval(b, d)


def rand_virtual(rng: random.Random, size: int, grid: int = 0, coeff_range=(-10, 10)):
    entries = {}
    while len(entries) < size:
        c = 0
        while c == 0:
            c = rng.randint(*coeff_range)
        entries.setdefault(rand_interval(rng, grid), c)
    return virtual_diagram(entries, level=1)


def rand_level1_diagram(rng: random.Random, max_atoms: int = 3, grid: int = 8):
    entries = {}
    for _ in range(rng.randint(0, max_atoms)):
        a = rand_interval(rng, grid)
        entries[a] = entries.get(a, 0) + 1
    return diagram(entries, level=1)


def rand_level2_diagram(rng: random.Random, max_atoms: int = 3):
    entries = {}
    for _ in range(rng.randint(0, max_atoms)):
        cand = atom(rand_level1_diagram(rng), rand_level1_diagram(rng))
        if is_basepoint_pair(cand.minus, cand.plus):
            continue
        entries[cand] = entries.get(cand, 0) + 1
    return diagram(entries, level=2)


@pytest.fixture
def rng():
    return random.Random(20260502)


def assert_close(a: float, b: float, tol: float = TOL):
    assert a == b or abs(a - b) <= tol * max(1.0, abs(a), abs(b)) or abs(a - b) <= tol, (
        a,
        b,
    )
