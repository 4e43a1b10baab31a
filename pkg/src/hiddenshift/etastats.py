"""Distribution of eta^x_w over uniformly random (x, w), and the bounds on it.

Exhaustive censuses are exact (rational moments); Monte Carlo censuses draw
(x, w) pairs from a seeded generator up front and count each instance with
the lattice enumerator, so the result depends only on (seed, samples).
"""

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd, pi, prod, sqrt
from typing import Dict, Optional

import numpy as np

from .errors import check_budget, sweep_budget
from .msp import CapExceeded, eta, integer_root, iter_eta_rows, make_instance

PI2_OVER_6 = pi**2 / 6
P1TO4_CONSTANT = 0.0747


@dataclass(frozen=True)
class EtaCensus:
    N: int
    M: int
    k: int
    mode: str
    histogram: Dict[int, int]
    samples: int
    seed: Optional[int] = None
    exact: bool = True
    cap: Optional[int] = None

    @property
    def buckets(self):
        """Counts for eta = 0, 1, 2, 3, 4 and eta >= 5."""
        out = [self.histogram.get(v, 0) for v in range(5)]
        out.append(sum(c for v, c in self.histogram.items() if v >= 5))
        return tuple(out)

    def prob_at_least(self, alpha: int) -> Fraction:
        if self.cap is not None and alpha > self.cap + 1:
            raise ValueError(f"census is capped at {self.cap}")
        return Fraction(sum(c for v, c in self.histogram.items() if v >= alpha), self.samples)

    @property
    def mu_hat(self) -> Fraction:
        return Fraction(sum(v * c for v, c in self.histogram.items()), self.samples)

    @property
    def second_moment(self) -> Fraction:
        return Fraction(sum(v * v * c for v, c in self.histogram.items()), self.samples)

    @property
    def sigma2_hat(self) -> Fraction:
        return self.second_moment - self.mu_hat**2

    @property
    def p_zero(self) -> Fraction:
        return Fraction(self.buckets[0], self.samples)

    @property
    def p_1to4(self) -> Fraction:
        return Fraction(sum(self.buckets[1:5]), self.samples)

    @property
    def p_5plus(self) -> Fraction:
        return Fraction(self.buckets[5], self.samples)

    def stderr(self) -> Dict[str, float]:
        """Binomial / sample-mean standard errors (zero for exhaustive censuses)."""
        if self.mode == "exhaustive":
            return {k: 0.0 for k in ("mu_hat", "second_moment", "p0", "p1to4", "p5plus")}
        n = self.samples
        m2 = float(self.second_moment)
        m4 = sum(float(v) ** 4 * c for v, c in self.histogram.items()) / n

        def binom(p):
            p = float(p)
            return sqrt(p * (1 - p) / n)

        return {
            "mu_hat": sqrt(max(float(self.sigma2_hat), 0.0) / n),
            "second_moment": sqrt(max(m4 - m2 * m2, 0.0) / n),
            "p0": binom(self.p_zero),
            "p1to4": binom(self.p_1to4),
            "p5plus": binom(self.p_5plus),
        }


@dataclass(frozen=True)
class BoundReport:
    mu: Fraction
    sigma2: Fraction
    chebyshev_delta: Optional[Fraction]
    chebyshev_p5_bound: Optional[Fraction]
    pr_zero_bound: Fraction
    second_moment_lower: Fraction
    variance_upper_ref: float
    p_1to4_ref: float
    cheb_ok: Optional[bool]
    przero_ok: bool
    m2lower_ok: bool
    variance_ok: Optional[bool]
    p1to4_ok: bool
    slack: Dict[str, float] = field(default_factory=dict)


def default_m(N: int, k: int) -> int:
    return max(1, integer_root(N, k))


def census_exhaustive(N: int, M: int, k: int, budget: Optional[int] = None) -> EtaCensus:
    """Exact eta histogram over every (x, w); budget counts (x, w) pairs."""
    check_budget(N ** (k + 1), sweep_budget(budget), "exhaustive census over (x, w)")
    hist = np.zeros(M**k + 1, dtype=np.int64)
    for _, rows in iter_eta_rows(N, M, k):
        hist += np.bincount(rows.ravel(), minlength=M**k + 1)
    histogram = {int(v): int(c) for v, c in enumerate(hist) if c}
    return EtaCensus(N, M, k, "exhaustive", histogram, N ** (k + 1))


def _count_chunk(args):
    N, M, k, draws, cap = args
    counts = Counter()
    for row in draws:
        inst = make_instance(N, M, k, row[:k], row[k])
        try:
            counts[eta(inst, cap)] += 1
        except CapExceeded:
            counts[cap + 1] += 1
    return counts


def census_monte_carlo(
    N: int,
    M: int,
    k: int,
    samples: int,
    seed: int = 0,
    cap: Optional[int] = None,
    workers: int = 1,
    chunk: int = 5000,
) -> EtaCensus:
    """Histogram of eta over ``samples`` uniform (x, w) draws.

    With ``cap`` set, counts above it are recorded as ``cap + 1`` and the
    moments become lower bounds (``exact=False``).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    if N >= 2**63:
        raise ValueError("Monte Carlo sampling needs N < 2^63")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, N, size=(samples, k + 1), dtype=np.int64).tolist()
    jobs = [(N, M, k, draws[i:i + chunk], cap) for i in range(0, samples, chunk)]
    total = Counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for c in pool.map(_count_chunk, jobs):
                total.update(c)
    else:
        for job in jobs:
            total.update(_count_chunk(job))
    capped = cap is not None and total.get(cap + 1, 0) > 0
    return EtaCensus(N, M, k, "monte_carlo", dict(sorted(total.items())), samples,
                     seed, exact=not capped, cap=cap)


def _difference_weights(M: int, k: int):
    """Yield (d, multiplicity) for d = b - c over ordered pairs b != c in the box."""
    span = range(-(M - 1), M)
    for d in product(span, repeat=k):
        if any(d):
            yield d, prod(M - abs(v) for v in d)


def second_moment_identity(N: int, M: int, k: int, budget: Optional[int] = None) -> Fraction:
    """mu + N^-2 * sum over b != c of gcd(b - c, N), exactly."""
    check_budget((2 * M - 1) ** k, sweep_budget(budget), "pair-difference sum")
    total = 0
    for d, mult in _difference_weights(M, k):
        g = N
        for v in d:
            g = gcd(g, v)
        total += mult * g
    return Fraction(M**k, N) + Fraction(total, N * N)


def divisor_pair_count(M: int, k: int, q: int) -> int:
    """Ordered pairs b != c in the box whose difference has integer gcd exactly q."""
    n = 0
    for d, mult in _difference_weights(M, k):
        g = 0
        for v in d:
            g = gcd(g, v)
        if g == q:
            n += mult
    return n


def divisor_pair_bound(M: int, k: int, q: int) -> Fraction:
    return Fraction(M**k) * Fraction(M + q, q) ** k


def chebyshev_holds(census: EtaCensus, delta) -> bool:
    """Pr(|eta - mu| >= delta) <= sigma^2 / delta^2, evaluated on the census."""
    delta = Fraction(delta)
    mu = census.mu_hat
    far = sum(c for v, c in census.histogram.items() if abs(v - mu) >= delta)
    return Fraction(far, census.samples) <= census.sigma2_hat / delta**2


def bound_report(census: EtaCensus, sigma2_slack: float = 0.5, p1to4_threshold: float = 0.05) -> BoundReport:
    """Evaluate each distribution bound on the census.

    The Chebyshev and Pr(eta = 0) checks are exact inequalities for the
    empirical distribution.  The second-moment lower bound uses the true mean
    M^k/N; for Monte Carlo censuses it is allowed three standard errors.  The
    variance and p_1to4 comparisons are asymptotic and carry explicit slack;
    the variance comparison is not applicable for k = 2.
    """
    N, M, k = census.N, census.M, census.k
    mu = census.mu_hat
    s2 = census.sigma2_hat
    err = census.stderr()

    if mu <= 1:
        delta = Fraction(4)
    elif mu < 5:
        delta = 5 - mu
    else:
        delta = None
    if delta is None:
        cheb_bound, cheb_ok = None, None
    else:
        cheb_bound = s2 / delta**2
        cheb_ok = census.p_5plus <= cheb_bound

    denom = mu * mu + s2
    pr_zero_bound = s2 / denom if denom else Fraction(1)
    przero_ok = census.p_zero <= pr_zero_bound

    mk = M**k
    m2_lower = Fraction(mk, N) + Fraction(mk * (mk - 1), N * N)
    m2_slack = 3 * err["second_moment"]
    if census.mode == "exhaustive":
        m2lower_ok = census.second_moment >= m2_lower
    else:
        m2lower_ok = float(census.second_moment) + m2_slack >= float(m2_lower)

    variance_ok = None if k == 2 else float(s2) <= PI2_OVER_6 + sigma2_slack
    p1to4_ok = float(census.p_1to4) >= p1to4_threshold

    return BoundReport(
        mu=mu, sigma2=s2, chebyshev_delta=delta, chebyshev_p5_bound=cheb_bound,
        pr_zero_bound=pr_zero_bound, second_moment_lower=m2_lower,
        variance_upper_ref=PI2_OVER_6, p_1to4_ref=P1TO4_CONSTANT,
        cheb_ok=cheb_ok, przero_ok=przero_ok, m2lower_ok=m2lower_ok,
        variance_ok=variance_ok, p1to4_ok=p1to4_ok,
        slack={"sigma2": sigma2_slack, "p1to4_threshold": p1to4_threshold,
               "second_moment": m2_slack},
    )
