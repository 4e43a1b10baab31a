"""Exact LLL reduction on integer bases.

Bases are sequences of integer row vectors.  The reduction runs entirely in
integer arithmetic (the d_i / lambda_ij formulation), so there is no rounding
anywhere; ``gram_schmidt`` and ``check_reduced`` work over ``Fraction`` and
serve as an independent verifier of the result.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

Vector = Tuple[int, ...]
Basis = Sequence[Sequence[int]]

DEFAULT_DELTA = Fraction(3, 4)


class RankDeficient(ValueError):
    """The supplied vectors are linearly dependent."""


@dataclass(frozen=True)
class ReductionResult:
    reduced: Tuple[Vector, ...]
    transform: Tuple[Vector, ...]
    delta: Fraction


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def determinant(rows: Basis) -> int:
    """Exact determinant of a square integer matrix (fraction-free Bareiss)."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def gram_schmidt(basis: Basis):
    """Exact Gram-Schmidt orthogonalisation.

    Returns ``(ortho, mu)`` with ``basis[i] = sum_j mu[i][j] * ortho[j]`` and
    ``mu[i][i] == 1``.
    """
    rows = [[Fraction(c) for c in v] for v in basis]
    ortho: List[List[Fraction]] = []
    norms: List[Fraction] = []
    mu = [[Fraction(0)] * len(rows) for _ in rows]
    for i, v in enumerate(rows):
        w = list(v)
        for j in range(i):
            mu[i][j] = dot(v, ortho[j]) / norms[j]
            w = [a - mu[i][j] * b for a, b in zip(w, ortho[j])]
        mu[i][i] = Fraction(1)
        n2 = dot(w, w)
        if n2 == 0:
            raise RankDeficient(f"vector {i} lies in the span of the previous ones")
        ortho.append(w)
        norms.append(n2)
    return ortho, mu


def check_reduced(basis: Basis, delta=DEFAULT_DELTA) -> bool:
    """True iff ``basis`` is size-reduced and satisfies Lovasz with ``delta``."""
    delta = Fraction(delta)
    ortho, mu = gram_schmidt(basis)
    half = Fraction(1, 2)
    for i in range(len(ortho)):
        for j in range(i):
            if abs(mu[i][j]) > half:
                return False
    for i in range(1, len(ortho)):
        lhs = dot(ortho[i], ortho[i])
        rhs = (delta - mu[i][i - 1] ** 2) * dot(ortho[i - 1], ortho[i - 1])
        if lhs < rhs:
            return False
    return True


def lll_reduce(basis: Basis, delta=DEFAULT_DELTA) -> ReductionResult:
    """LLL-reduce the rows of ``basis``.

    ``transform`` is unimodular with ``reduced = transform * basis``.  Rows may
    be longer than their number (any full-row-rank integer matrix works).
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta <= 1:
        raise ValueError("delta must lie in (1/4, 1]")
    p, q = delta.numerator, delta.denominator

    b = [list(map(int, v)) for v in basis]
    n = len(b)
    h = [[int(i == j) for j in range(n)] for i in range(n)]
    if n == 0:
        return ReductionResult((), (), delta)

    # d[i+1] is the Gram determinant of the first i+1 vectors; d[0] = 1.
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * n for _ in range(n)]

    def incorporate(k):
        for j in range(k + 1):
            u = dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            else:
                if u == 0:
                    raise RankDeficient(f"vector {k} lies in the span of the previous ones")
                d[k + 1] = u

    def size_reduce(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            r = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - r * y for x, y in zip(b[k], b[l])]
            h[k] = [x - r * y for x, y in zip(h[k], h[l])]
            lam[k][l] -= r * d[l + 1]
            for i in range(l):
                lam[k][i] -= r * lam[l][i]

    def swap(k, kmax):
        b[k], b[k - 1] = b[k - 1], b[k]
        h[k], h[k - 1] = h[k - 1], h[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lk = lam[k][k - 1]
        new_d = (d[k - 1] * d[k + 1] + lk * lk) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lk * t) // d[k]
            lam[i][k - 1] = (new_d * t + lk * lam[i][k]) // d[k + 1]
        d[k] = new_d

    incorporate(0)
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            incorporate(k)
        size_reduce(k, k - 1)
        lk = lam[k][k - 1]
        if q * d[k + 1] * d[k - 1] < p * d[k] * d[k] - q * lk * lk:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                size_reduce(k, l)
            k += 1

    return ReductionResult(
        tuple(tuple(v) for v in b), tuple(tuple(v) for v in h), delta
    )
