"""Dense simulation of the hidden-shift states and the pretty good measurement.

Conventions: omega = exp(2*pi*i/N); the forward transform over Z_N sends
|x> to N^(-1/2) sum_y omega^(xy) |y>.  Box vectors b in {0,...,M-1}^k are
indexed lexicographically (b_1 most significant), matching ``msp.box_points``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    BRUTE_FORCE_CEILING,
    DENSE_CEILING,
    MC_WORK_CEILING,
    check_budget,
    check_dense,
    sweep_budget,
)
from .intprog import Box, lattice_points
from .msp import MspInstance, box_points, eta_table, iter_eta_rows, solution_lattice

NORM_TOL = 1e-9


@dataclass
class StateVector:
    amplitudes: np.ndarray
    dims: tuple

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass
class DensityOperator:
    matrix: np.ndarray
    dims: tuple

    def check(self, tol: float = NORM_TOL) -> None:
        m = self.matrix
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise ValueError("not Hermitian")
        if abs(np.trace(m).real - 1) > tol:
            raise ValueError("trace is not 1")
        if np.linalg.eigvalsh(m).min() < -tol:
            raise ValueError("not positive semidefinite")


@dataclass(frozen=True)
class GoodBadPartition:
    """Splits solvable instances into good (sampled exactly) and bad ones.

    Good means ``low <= eta <= high`` (``high=None`` is unbounded), further
    filtered by ``predicate(x, w, eta)`` when one is given.
    """

    low: int = 1
    high: Optional[int] = 4
    predicate: Optional[Callable] = field(default=None, compare=False)

    @classmethod
    def everything(cls):
        return cls(1, None)

    @classmethod
    def nothing(cls):
        return cls(1, 0)

    def mask(self, xs: np.ndarray, rows: np.ndarray) -> np.ndarray:
        good = (rows > 0) & (rows >= self.low)
        if self.high is not None:
            good &= rows <= self.high
        if self.predicate is not None:
            for r, c in zip(*np.nonzero(good)):
                good[r, c] = bool(self.predicate(tuple(int(v) for v in xs[r]), int(c), int(rows[r, c])))
        return good


@dataclass
class PgmReport:
    N: int
    M: int
    k: int
    success_exact: float
    lower_bound: float
    upper_bound: float
    mode: str
    beta: float
    sample_count: Optional[int] = None
    stderr: Optional[float] = None
    seed: Optional[int] = None


def dft(v, direction: str = "forward") -> np.ndarray:
    """Unitary Fourier transform over Z_N (forward uses omega^(+xy))."""
    v = np.asarray(v, dtype=complex)
    n = v.shape[-1]
    if direction == "forward":
        return np.fft.ifft(v, axis=-1) * sqrt(n)
    if direction == "inverse":
        return np.fft.fft(v, axis=-1) / sqrt(n)
    raise ValueError(f"unknown direction {direction!r}")


def phi_state(N: int, M: int, x: int, s: int) -> StateVector:
    """(1/sqrt M) sum_b |b, x + b s>, flattened with index b*N + y."""
    if not 1 <= M <= N:
        raise ValueError("need 1 <= M <= N")
    amp = np.zeros(M * N, dtype=complex)
    b = np.arange(M)
    amp[b * N + (x + b * s) % N] = 1 / sqrt(M)
    return StateVector(amp, (M, N))


def rho_mixed(N: int, M: int, s: int, ceiling: int = DENSE_CEILING) -> DensityOperator:
    check_dense(M * N, ceiling)
    rho = np.zeros((M * N, M * N), dtype=complex)
    for x in range(N):
        v = phi_state(N, M, x, s).amplitudes
        rho += np.outer(v, v.conj())
    return DensityOperator(rho / N, (M, N))


def solution_superposition(inst: MspInstance, ceiling: int = DENSE_CEILING) -> StateVector:
    """Uniform superposition over the box solutions (the zero vector if none)."""
    dim = inst.box_size
    check_dense(dim, ceiling)
    sols = lattice_points(solution_lattice(inst), Box.cube(inst.M, inst.k))
    amp = np.zeros(dim, dtype=complex)
    for b in sols:
        idx = 0
        for v in b:
            idx = idx * inst.M + v
        amp[idx] = 1 / sqrt(len(sols))
    return StateVector(amp, (inst.M,) * inst.k)


# --- PGM success probability ---------------------------------------------


def _row_success_terms(rows: np.ndarray, M: int, k: int, N: int) -> np.ndarray:
    """(sum_w sqrt(eta_w))^2 / (M^k N) for each row."""
    root_sum = np.sqrt(rows).sum(axis=1)
    return root_sum * root_sum / (M**k * N)


def pgm_success_exact(
    N: int,
    M: int,
    k: int,
    mode: str = "exhaustive",
    samples: int = 10000,
    seed: int = 0,
    budget: Optional[int] = None,
    partition: Optional["GoodBadPartition"] = None,
) -> PgmReport:
    """Success probability of the PGM, with the alpha = 1 bounds attached.

    Exhaustive mode averages the per-x term over all of Z_N^k (budget counts
    x vectors).  Monte Carlo mode samples x uniformly; each per-x term is
    computed exactly, so the estimator is unbiased.  A partition restricts the
    w-sums to good instances (the approximate-sampling success rate); the
    bounds always describe the ideal measurement.
    """
    if mode == "exhaustive":
        check_budget(N**k, sweep_budget(budget), "exhaustive PGM sweep over x")
        total = 0.0
        solvable = 0
        for xs, rows in iter_eta_rows(N, M, k):
            solvable += int(np.count_nonzero(rows))
            if partition is not None:
                rows = np.where(partition.mask(xs, rows), rows, 0)
            total += float(np.sum(_row_success_terms(rows, M, k, N)))
        success = total / N**k
        beta = Fraction(solvable, N ** (k + 1))
        lower, upper = pgm_bounds_from_beta(1, beta, N, M, k)
        return PgmReport(N, M, k, success, lower, upper, "exhaustive", float(beta))
    if mode == "monte_carlo":
        check_budget(samples * M**k, MC_WORK_CEILING, "Monte Carlo PGM work")
        rng = np.random.default_rng(seed)
        xs = rng.integers(0, N, size=(samples, k))
        terms = np.empty(samples)
        solvable = 0
        step = 4096
        for lo in range(0, samples, step):
            rows = eta_table(N, M, k, xs[lo:lo + step])
            solvable += int(np.count_nonzero(rows))
            if partition is not None:
                rows = np.where(partition.mask(xs[lo:lo + step], rows), rows, 0)
            terms[lo:lo + step] = _row_success_terms(rows, M, k, N)
        success = float(terms.mean())
        stderr = float(terms.std(ddof=1) / sqrt(samples)) if samples > 1 else float("nan")
        beta = Fraction(solvable, samples * N)
        lower, upper = pgm_bounds_from_beta(1, beta, N, M, k)
        return PgmReport(N, M, k, success, lower, upper, "monte_carlo", float(beta),
                         samples, stderr, seed)
    raise ValueError(f"unknown mode {mode!r}")


def pgm_bounds_from_beta(alpha, beta, N, M, k):
    lower = min(max(Fraction(alpha) * Fraction(beta) ** 2 * Fraction(N, M**k), 0), 1)
    upper = min(Fraction(M**k, N), 1)
    return float(lower), float(upper)


def pgm_bounds(census, alpha: int, N: int, M: int, k: int):
    """Lower/upper bounds on the PGM success probability from a census.

    beta = Pr(eta >= alpha) is read from the census histogram.
    """
    return pgm_bounds_from_beta(alpha, census.prob_at_least(alpha), N, M, k)


# --- final states and sampling -------------------------------------------


def final_states(N, M, k, xs, s, partition: Optional[GoodBadPartition] = None) -> np.ndarray:
    """Rows are the final states over Z_N for each x in ``xs``.

    With a partition, only good (x, w) terms contribute; the missing norm is
    the probability leaked to the failure outcome.
    """
    xs = np.asarray(xs, dtype=np.int64).reshape(-1, k)
    rows = eta_table(N, M, k, xs)
    weights = np.sqrt(rows)
    if partition is not None:
        weights = np.where(partition.mask(xs, rows), weights, 0.0)
    w = np.arange(N)
    phased = weights * np.exp(2j * np.pi * ((w * s) % N) / N)
    return np.fft.fft(phased, axis=1) / sqrt(M**k * N)


def final_state(N, M, k, x: Sequence[int], s: int, partition=None) -> StateVector:
    return StateVector(final_states(N, M, k, [x], s, partition)[0], (N,))


def simulate_run(N, M, k, s, rng: np.random.Generator, partition=None) -> Optional[int]:
    """One classical run of the pipeline: returns j, or None for the failure outcome."""
    check_budget(M**k, BRUTE_FORCE_CEILING, "per-x eta row")
    x = rng.integers(0, N, size=k)
    amp = final_states(N, M, k, [x], s, partition)[0]
    probs = np.abs(amp) ** 2
    if partition is None:
        probs = probs / probs.sum()
    u = rng.random()
    cum = np.cumsum(probs)
    j = int(np.searchsorted(cum, u, side="right"))
    return j if j < N else None


def simulate(N, M, k, s, trials, seed=0, partition=None) -> dict:
    rng = np.random.default_rng(seed)
    successes = failures = 0
    for _ in range(trials):
        j = simulate_run(N, M, k, s, rng, partition)
        if j is None:
            failures += 1
        elif j == s % N:
            successes += 1
    return {"trials": trials, "successes": successes, "failures": failures,
            "rate": successes / trials if trials else float("nan")}


def approx_fidelity(
    N, M, k, partition: GoodBadPartition, mode: str = "exhaustive",
    samples: int = 10000, seed: int = 0, budget: Optional[int] = None,
):
    """(MN)^-k times the sum of eta over good instances.

    Exact ``Fraction`` in exhaustive mode, a float estimate otherwise.
    """
    if mode == "exhaustive":
        check_budget(N**k, sweep_budget(budget), "exhaustive fidelity sweep over x")
        good = 0
        for xs, rows in iter_eta_rows(N, M, k):
            good += int(rows[partition.mask(xs, rows)].sum())
        return Fraction(good, (M * N) ** k)
    if mode == "monte_carlo":
        rng = np.random.default_rng(seed)
        xs = rng.integers(0, N, size=(samples, k))
        rows = eta_table(N, M, k, xs)
        return float(rows[partition.mask(xs, rows)].sum()) / (samples * M**k)
    raise ValueError(f"unknown mode {mode!r}")


# --- measurement blocks and single-copy sampling -------------------------


def _solution_states(x, N, M, k) -> np.ndarray:
    """Row w holds |S^x_w> over the box (zero row when eta is 0)."""
    pts = box_points(M, k)
    vals = (pts @ np.asarray(x, dtype=np.int64)) % N
    states = np.zeros((N, len(pts)))
    states[vals, np.arange(len(pts))] = 1.0
    counts = states.sum(axis=1)
    nz = counts > 0
    states[nz] /= np.sqrt(counts[nz])[:, None]
    return states


def povm_block(x: Sequence[int], N: int, M: int, k: int, ceiling: int = DENSE_CEILING) -> np.ndarray:
    """The N vectors e^x_j = N^(-1/2) sum_w omega^(wj) |S^x_w>, one per row."""
    check_dense(M**k, ceiling)
    states = _solution_states(x, N, M, k)
    w = np.arange(N)
    phases = np.exp(2j * np.pi * (np.outer(w, w) % N) / N)
    return phases @ states / sqrt(N)


def support_projector(x: Sequence[int], N: int, M: int, k: int) -> np.ndarray:
    """Projector onto span{|S^x_w> : eta^x_w > 0}."""
    states = _solution_states(x, N, M, k)
    return states.T @ states


def single_copy_fourier(N: int, M: int, s: int, x: int = 0, ceiling: int = DENSE_CEILING) -> np.ndarray:
    """Pr(y, z) after the Fourier transform over Z_N x Z_N of |phi_{x,s}>."""
    check_dense(N * N, ceiling)
    amp = np.zeros((N, N), dtype=complex)
    b = np.arange(M)
    amp[b, (x + b * s) % N] = 1 / sqrt(M)
    out = np.fft.ifft2(amp) * N
    return np.abs(out) ** 2
