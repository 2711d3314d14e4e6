import random

import pytest
from gmpy2 import mpq

from fiet.core import rotation
from fiet.exactnum import Basis
from fiet.generate import random_fiet

Q = Basis()
B2 = Basis.sqrt(2)


def rot(a, basis=Q):
    return rotation(basis.const(mpq(a)), basis)


def sample(seed: int, *, m=None, flips=False, grid=None, basis=B2, mmax=8):
    """One seeded map; without ``grid`` the breakpoints lie in the span of ``basis``."""
    rng = random.Random(seed)
    m = m if m is not None else rng.randint(2, mmax)
    if grid is not None:
        return random_fiet(rng, m, grid=grid, basis=basis, flips=flips)
    return random_fiet(rng, m, basis=basis, flips=flips)


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
