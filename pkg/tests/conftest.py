from itertools import product
from math import gcd

import pytest


def brute_count(x, N, w, M):
    """Plain-loop count of b in {0..M-1}^k with b.x = w mod N."""
    return sum(
        1 for b in product(range(M), repeat=len(x))
        if sum(p * q for p, q in zip(b, x)) % N == w % N
    )


def brute_kernel_count(b, N):
    return sum(
        1 for x in product(range(N), repeat=len(b))
        if sum(p * q for p, q in zip(b, x)) % N == 0
    )


def gcd_all(*vals):
    g = 0
    for v in vals:
        g = gcd(g, v)
    return g


@pytest.fixture
def oracle():
    class O:
        count = staticmethod(brute_count)
        kernel_count = staticmethod(brute_kernel_count)
        gcd = staticmethod(gcd_all)
    return O


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
