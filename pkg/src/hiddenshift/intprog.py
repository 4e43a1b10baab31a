"""Integer programs over the solution lattice and box enumeration.

A solution b = b0 + sum_j beta_j b^(j) lies in a box [lo, hi] iff the integer
vector beta satisfies the 2k inequalities

    sum_j beta_j b^(j)_i <= hi_i - b0_i,    -sum_j beta_j b^(j)_i <= b0_i - lo_i.

Feasibility is decided by hyperplane branching in the style of Lenstra: the
generators are LLL-reduced, the dual basis direction crossing the fewest
integer hyperplanes is chosen, and each slice is searched recursively in one
dimension less.  Hyperplane ranges come from interval arithmetic over the
constraint box, which can only over-count slices, so the search is exhaustive
and therefore exact.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .lattice import RankDeficient, determinant, lll_reduce
from .msp import (
    CapExceeded,
    MspInstance,
    SolutionLattice,
    SolutionSet,
    Vector,
    solution_lattice,
)


class InvalidProblem(ValueError):
    pass


class NoParticularSolution(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    lo: Vector
    hi: Vector

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise ValueError(f"malformed box {self.lo}..{self.hi}")

    @classmethod
    def cube(cls, M: int, k: int) -> "Box":
        return cls((0,) * k, (M - 1,) * k)

    @property
    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def contains(self, b: Sequence[int]) -> bool:
        return all(l <= v <= h for l, v, h in zip(self.lo, b, self.hi))

    def split(self) -> Tuple["Box", "Box"]:
        """Halve along the widest side (lowest index on ties), lower half first."""
        widths = [h - l for l, h in zip(self.lo, self.hi)]
        i = max(range(len(widths)), key=lambda j: (widths[j], -j))
        if widths[i] == 0:
            raise ValueError("cannot split a singleton box")
        mid = (self.lo[i] + self.hi[i]) // 2
        lower = Box(self.lo, self.hi[:i] + (mid,) + self.hi[i + 1:])
        upper = Box(self.lo[:i] + (mid + 1,) + self.lo[i + 1:], self.hi)
        return lower, upper


@dataclass(frozen=True)
class IpProblem:
    """Integer program A beta <= gamma built from a solution lattice and a box."""

    A: Tuple[Vector, ...]
    gamma: Vector
    lattice: Optional[SolutionLattice] = None
    box: Optional[Box] = None

    @property
    def m(self) -> int:
        return len(self.A)


def build_ip(lat: SolutionLattice, M: int) -> IpProblem:
    return build_ip_box(lat, Box.cube(M, len(lat.basis)))


def build_ip_box(lat: SolutionLattice, box: Box) -> IpProblem:
    if lat.b0 is None:
        raise NoParticularSolution("b.x = w (mod N) has no integer solution")
    k = len(lat.b0)
    upper = tuple(tuple(lat.basis[j][i] for j in range(k)) for i in range(k))
    lower = tuple(tuple(-a for a in row) for row in upper)
    gamma = tuple(box.hi[i] - lat.b0[i] for i in range(k)) + tuple(
        lat.b0[i] - box.lo[i] for i in range(k)
    )
    return IpProblem(upper + lower, gamma, lat, box)


# --- hyperplane branching ------------------------------------------------


def _adjugate(g):
    n = len(g)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:i] + row[i + 1:] for r, row in enumerate(g) if r != j]
            adj[i][j] = (-1) ** (i + j) * determinant(minor)
    return adj


class _Node:
    """Reduced generators of a sublattice plus their scaled dual basis.

    ``taus[i]`` expresses ``gens[i]`` in the original beta coordinates.
    ``duals[i] / det`` is the dual vector reading off the i-th coordinate.
    """

    __slots__ = ("gens", "taus", "duals", "det", "_children")

    def __init__(self, gens, taus):
        self._children = {}
        if not gens:
            self.gens, self.taus, self.duals, self.det = [], [], [], 1
            return
        red = lll_reduce(gens)
        self.gens = [list(v) for v in red.reduced]
        self.taus = [
            [sum(c * t[j] for c, t in zip(row, taus)) for j in range(len(taus[0]))]
            for row in red.transform
        ]
        gram = [[sum(a * b for a, b in zip(u, v)) for v in self.gens] for u in self.gens]
        self.det = determinant(gram)
        adj = _adjugate(gram)
        p = len(self.gens[0])
        self.duals = [
            [sum(adj[i][j] * self.gens[j][l] for j in range(len(self.gens))) for l in range(p)]
            for i in range(len(self.gens))
        ]

    def child(self, i):
        node = self._children.get(i)
        if node is None:
            node = _Node(self.gens[:i] + self.gens[i + 1:], self.taus[:i] + self.taus[i + 1:])
            self._children[i] = node
        return node


@lru_cache(maxsize=512)
def _root(gens: Tuple[Vector, ...]) -> _Node:
    d = len(gens)
    try:
        return _Node([list(v) for v in gens], [[int(i == j) for j in range(d)] for i in range(d)])
    except RankDeficient as exc:
        raise InvalidProblem("constraint matrix is not of full column rank") from exc


def _search(node, lo, hi, s, beta, limit, out):
    """Collect (point, beta) pairs with point in s + lattice(node) and lo <= point <= hi."""
    if not node.gens:
        if all(a <= v <= b for a, v, b in zip(lo, s, hi)):
            out.append((tuple(s), tuple(beta)))
        return limit is not None and len(out) >= limit
    D = node.det
    best = None
    for i, w in enumerate(node.duals):
        low = high = 0
        for wl, a, b, sl in zip(w, lo, hi, s):
            if wl > 0:
                low += wl * (a - sl)
                high += wl * (b - sl)
            elif wl < 0:
                low += wl * (b - sl)
                high += wl * (a - sl)
        tmin = -((-low) // D)
        tmax = high // D
        if tmax < tmin:
            return False
        if best is None or tmax - tmin < best[2] - best[1]:
            best = (i, tmin, tmax)
    i, tmin, tmax = best
    child = node.child(i)
    g, tau = node.gens[i], node.taus[i]
    for t in range(tmin, tmax + 1):
        s2 = [a + t * b for a, b in zip(s, g)]
        beta2 = [a + t * b for a, b in zip(beta, tau)]
        if _search(child, lo, hi, s2, beta2, limit, out):
            return True
    return False


def _paired_form(ip: IpProblem):
    m = len(ip.A)
    if m == 0 or m % 2 or len(ip.gamma) != m:
        raise InvalidProblem("expected 2k constraints in +/- pairs")
    d = len(ip.A[0])
    if d == 0 or any(len(r) != d for r in ip.A):
        raise InvalidProblem("ragged constraint matrix")
    p = m // 2
    for i in range(p):
        if any(a != -b for a, b in zip(ip.A[i], ip.A[i + p])):
            raise InvalidProblem(f"row {i + p} is not the negation of row {i}")
    gens = tuple(tuple(int(ip.A[i][j]) for i in range(p)) for j in range(d))
    lo = [-int(g) for g in ip.gamma[p:]]
    hi = [int(g) for g in ip.gamma[:p]]
    return gens, lo, hi


def feasible(ip: IpProblem) -> Optional[Vector]:
    """An integer beta with A beta <= gamma, or None if there is none."""
    gens, lo, hi = _paired_form(ip)
    if any(a > b for a, b in zip(lo, hi)):
        return None
    node = _root(gens)
    out: List = []
    _search(node, lo, hi, [0] * len(lo), [0] * len(gens), 1, out)
    return out[0][1] if out else None


def lattice_points(lat: SolutionLattice, box: Box, limit: Optional[int] = None) -> List[Vector]:
    """Points of b0 + L inside ``box`` (up to ``limit``), sorted."""
    if lat.b0 is None:
        return []
    node = _root(tuple(tuple(v) for v in lat.basis))
    out: List = []
    _search(node, list(box.lo), list(box.hi), list(lat.b0), [0] * len(lat.basis), limit, out)
    return sorted(p for p, _ in out)


def count_lattice_points(lat: SolutionLattice, lo, hi, limit: Optional[int] = None) -> int:
    return len(lattice_points(lat, Box(tuple(lo), tuple(hi)), limit))


class _Full(Exception):
    pass


def bisect_solutions(lat: SolutionLattice, box: Box, cap: Optional[int] = None) -> List[Vector]:
    """Solutions inside ``box`` found by recursive halving with IP pruning."""
    found: List[Vector] = []

    def visit(b: Box):
        if feasible(build_ip_box(lat, b)) is None:
            return
        if b.is_singleton:
            found.append(b.lo)
            if cap is not None and len(found) > cap:
                raise _Full
            return
        lower, upper = b.split()
        visit(lower)
        visit(upper)

    if lat.b0 is not None:
        try:
            visit(box)
        except _Full:
            pass
    return found


def enumerate_box_solutions(inst: MspInstance, cap: Optional[int] = 16) -> SolutionSet:
    """All box solutions via bisection; raises CapExceeded past ``cap``."""
    if cap is not None and cap < 1:
        raise ValueError("cap must be at least 1")
    lat = solution_lattice(inst)
    found = bisect_solutions(lat, Box.cube(inst.M, inst.k), cap)
    if cap is not None and len(found) > cap:
        raise CapExceeded(cap, len(found), sorted(found)[:cap])
    sols = tuple(sorted(found))
    return SolutionSet(sols, len(sols), False)
