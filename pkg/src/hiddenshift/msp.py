"""Matrix sum instances: find b in {0,...,M-1}^k with b.x = w (mod N).

The integer solutions of b.x = w (mod N) form a shifted lattice b0 + L in Z^k.
This module builds (b0, L) with the extended Euclidean algorithm, counts and
lists the solutions inside the box, and provides the brute-force scan used as
the reference oracle everywhere else.
"""

from dataclasses import dataclass
from itertools import product
from math import gcd, prod
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import BRUTE_FORCE_CEILING

Vector = Tuple[int, ...]


class InvalidInstance(ValueError):
    pass


class TooLarge(RuntimeError):
    pass


class CapExceeded(RuntimeError):
    """More solutions exist than the caller's cap.

    ``count`` is how many were found before stopping (always cap + 1 from the
    enumerators here); ``solutions`` holds the first ``cap`` of them when they
    were listed.
    """

    def __init__(self, cap, count, solutions=()):
        super().__init__(f"more than {cap} solutions")
        self.cap = cap
        self.count = count
        self.solutions = tuple(solutions)


@dataclass(frozen=True)
class MspInstance:
    N: int
    M: int
    k: int
    x: Vector
    w: int

    @property
    def box_size(self) -> int:
        return self.M**self.k


@dataclass(frozen=True)
class SolutionSet:
    solutions: Tuple[Vector, ...]
    eta: int
    truncated: bool = False


@dataclass(frozen=True)
class SolutionLattice:
    """All integer solutions of b.x = w (mod N): ``b0 + span_Z(basis)``.

    ``b0`` is None when gcd(x, N) does not divide w.
    """

    b0: Optional[Vector]
    basis: Tuple[Vector, ...]
    gcd_d: int
    det_abs: int

    def point(self, beta: Sequence[int]) -> Vector:
        if self.b0 is None:
            raise ValueError("lattice has no particular solution")
        out = list(self.b0)
        for c, v in zip(beta, self.basis):
            for i, vi in enumerate(v):
                out[i] += c * vi
        return tuple(out)


def make_instance(N, M, k, x, w) -> MspInstance:
    N, M, k, w = int(N), int(M), int(k), int(w)
    if N < 2:
        raise InvalidInstance(f"N must be at least 2, got {N}")
    if k < 1:
        raise InvalidInstance(f"k must be at least 1, got {k}")
    if not 1 <= M <= N:
        raise InvalidInstance(f"need 1 <= M <= N, got M={M}, N={N}")
    x = tuple(int(v) % N for v in x)
    if len(x) != k:
        raise InvalidInstance(f"x has {len(x)} entries, expected k={k}")
    return MspInstance(N, M, k, x, w % N)


def xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def unimodular_column_transform(a: Sequence[int]) -> Tuple[int, list]:
    """Columns of a unimodular U with a.U = (0, ..., 0, g), g = gcd(a) >= 0.

    Returned as a list of column vectors.  The first n-1 columns therefore
    form a basis of the integer kernel of b -> b.a and the last column is a
    Bezout vector for g.
    """
    a = [int(v) for v in a]
    n = len(a)
    cols = [[int(i == j) for i in range(n)] for j in range(n)]
    last = n - 1
    for i in range(n - 1):
        if a[i] == 0:
            continue
        if a[last] == 0:
            a[i], a[last] = a[last], a[i]
            cols[i], cols[last] = cols[last], cols[i]
            continue
        g, s, t = xgcd(a[i], a[last])
        ui, ul = a[i] // g, a[last] // g
        ci, cl = cols[i], cols[last]
        # [[s, -ul], [t, ui]] has determinant s*ui + t*ul = 1
        cols[last] = [s * p + t * r for p, r in zip(ci, cl)]
        cols[i] = [-ul * p + ui * r for p, r in zip(ci, cl)]
        a[i], a[last] = 0, g
    if a[last] < 0:
        a[last] = -a[last]
        cols[last] = [-v for v in cols[last]]
    return a[last], cols


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> Tuple[Vector, ...]:
    """Upper-triangular row HNF of a square nonsingular integer matrix.

    Pivots are positive and entries above each pivot lie in [0, pivot).
    """
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    for j in range(n):
        for i in range(j + 1, n):
            if a[i][j] == 0:
                continue
            if a[j][j] == 0:
                a[i], a[j] = a[j], a[i]
                continue
            g, s, t = xgcd(a[j][j], a[i][j])
            uj, ui = a[j][j] // g, a[i][j] // g
            rj, ri = a[j], a[i]
            a[j] = [s * p + t * r for p, r in zip(rj, ri)]
            a[i] = [-ui * p + uj * r for p, r in zip(rj, ri)]
        if a[j][j] == 0:
            raise ValueError("matrix is singular")
        if a[j][j] < 0:
            a[j] = [-v for v in a[j]]
        for i in range(j):
            f = a[i][j] // a[j][j]
            if f:
                a[i] = [p - f * r for p, r in zip(a[i], a[j])]
    return tuple(tuple(r) for r in a)


def gcd_solution_count(b: Sequence[int], N: int) -> int:
    """Number of x in Z_N^k with b.x = 0 (mod N): N^(k-1) * gcd(b, N)."""
    g = N
    for v in b:
        g = gcd(g, int(v))
    return N ** (len(b) - 1) * g


def particular_solution(x: Sequence[int], N: int, w: int) -> Optional[Vector]:
    """Some (b, lam) in Z^(k+1) with b.x + lam*N = w, or None if none exists."""
    g, cols = unimodular_column_transform(list(x) + [N])
    if w % g:
        return None
    f = w // g
    return tuple(f * v for v in cols[-1])


def homogeneous_basis(x: Sequence[int], N: int) -> Tuple[Vector, ...]:
    """HNF basis of {b in Z^k : b.x = 0 (mod N)}; |det| = N / gcd(x, N)."""
    _, cols = unimodular_column_transform(list(x) + [N])
    kernel = [c[:-1] for c in cols[:-1]]
    return hermite_normal_form(kernel)


def solution_lattice(inst: MspInstance) -> SolutionLattice:
    g, cols = unimodular_column_transform(list(inst.x) + [inst.N])
    basis = hermite_normal_form([c[:-1] for c in cols[:-1]])
    det_abs = prod(basis[i][i] for i in range(inst.k))
    b0 = None
    if inst.w % g == 0:
        f = inst.w // g
        b = [f * v for v in cols[-1][:-1]]
        # move b0 into the fundamental domain of the triangular basis
        for i in range(inst.k):
            r = b[i] // basis[i][i]
            if r:
                b = [p - r * q for p, q in zip(b, basis[i])]
        b0 = tuple(b)
    return SolutionLattice(b0, basis, g, det_abs)


def is_solution(inst: MspInstance, b: Sequence[int]) -> bool:
    return all(0 <= v < inst.M for v in b) and sum(
        p * q for p, q in zip(b, inst.x)
    ) % inst.N == inst.w


def box_points(M: int, k: int) -> np.ndarray:
    """All of {0,...,M-1}^k as an (M^k, k) array, lexicographic order."""
    grids = np.indices((M,) * k, dtype=np.int64).reshape(k, -1)
    return grids.T.copy()


def brute_solutions(inst: MspInstance, ceiling: int = BRUTE_FORCE_CEILING) -> SolutionSet:
    """Exhaustive scan of the box; the reference oracle."""
    size = inst.box_size
    if size > ceiling:
        raise TooLarge(f"M^k = {size} exceeds brute-force ceiling {ceiling}")
    if _fits_int64(inst.N, inst.M, inst.k):
        pts = box_points(inst.M, inst.k)
        vals = (pts @ np.asarray(inst.x, dtype=np.int64)) % inst.N
        hits = pts[vals == inst.w]
        sols = tuple(tuple(int(v) for v in row) for row in hits)
    else:
        sols = tuple(
            b for b in product(range(inst.M), repeat=inst.k) if is_solution(inst, b)
        )
    return SolutionSet(sols, len(sols), False)


def eta(inst: MspInstance, cap: Optional[int] = None) -> int:
    """Exact number of solutions in the box.

    Raises CapExceeded when ``cap`` is given and the count is larger.
    """
    lat = solution_lattice(inst)
    if lat.b0 is None:
        return 0
    if all(v == 0 for v in inst.x):
        n = inst.box_size
        if cap is not None and n > cap:
            raise CapExceeded(cap, cap + 1)
        return n
    from .intprog import count_lattice_points

    limit = None if cap is None else cap + 1
    n = count_lattice_points(lat, [0] * inst.k, [inst.M - 1] * inst.k, limit)
    if cap is not None and n > cap:
        raise CapExceeded(cap, n)
    return n


# --- vectorised eta rows -------------------------------------------------


def _fits_int64(N, M, k):
    return k * (M - 1) * (N - 1) < 2**62


def x_vectors(N: int, k: int, start: int, stop: int) -> np.ndarray:
    """x vectors with lexicographic index in [start, stop) as a (n, k) array."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % N
        idx //= N
    return out


def eta_table(N: int, M: int, k: int, xs) -> np.ndarray:
    """eta^x_w for every x in ``xs`` and every w in Z_N, shape (len(xs), N).

    Counts the box points landing on each residue, so each row sums to M^k by
    construction.  This is the census workhorse; ``eta`` is the per-instance
    lattice route.
    """
    xs = np.asarray(xs, dtype=np.int64).reshape(-1, k)
    n = len(xs)
    out = np.zeros((n, N), dtype=np.int64)
    if n == 0:
        return out
    if not _fits_int64(N, M, k) or N > 2**31:
        for r, x in enumerate(xs):
            for b in product(range(M), repeat=k):
                out[r, sum(int(p) * int(q) for p, q in zip(b, x)) % N] += 1
        return out
    pts = box_points(M, k)
    step = max(1, 2**22 // max(len(pts), N))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        vals = (xs[lo:hi] @ pts.T) % N
        vals += (np.arange(hi - lo, dtype=np.int64) * N)[:, None]
        out[lo:hi] = np.bincount(vals.ravel(), minlength=(hi - lo) * N).reshape(
            hi - lo, N
        )
    return out


def iter_eta_rows(N: int, M: int, k: int, chunk: Optional[int] = None) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield (xs, eta rows) over all of Z_N^k in lexicographic chunks."""
    total = N**k
    if chunk is None:
        chunk = max(1, 2**21 // max(M**k, N))
    for lo in range(0, total, chunk):
        xs = x_vectors(N, k, lo, min(total, lo + chunk))
        yield xs, eta_table(N, M, k, xs)


def integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) computed exactly."""
    if n < 0 or k < 1:
        raise ValueError("need n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    if n.bit_length() < 1000:
        r = int(round(n ** (1.0 / k)))
    else:
        r = 1 << (n.bit_length() // k)
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r
