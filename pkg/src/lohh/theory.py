"""Analytic reference values for the LeadingOnes hyper-heuristics.

Best-possible expected runtimes for the initial-segment portfolio, their
asymptotic leading constants, per-region waiting-time sums, and the
tau_max(i) envelope used to sanity-check adapted learning periods.

The best-possible runtime of an elitist (1+1) algorithm over a portfolio is
(1/2) * sum over fitness levels i of 1/p_opt(i): each level is initially
relevant with probability 1/2 and the optimal operator waits 1/p_opt(i)
evaluations there.  For the initial segment {1..k} the optimal operator is
RLS_k below n/k and RLS_x on [n/(x+1), n/x); the region partition here uses
ceil-based bounds so every level 0..n-1 is counted exactly once (boundary
levels differ from the per-level argmax only by O(1/n^2) in probability,
which the tests assert is numerically immaterial).
"""

import math
from functools import lru_cache

import numpy as np

from .operators import Portfolio, improvement_probability, optimal_operator

# Display-only extrapolation for k -> infinity; never computed here.
E_INF_CONSTANT = 0.388

_CLOSED_FORM_CONSTANTS = {
    1: 0.5,
    2: (1 + math.log(2)) / 4,
    3: 1 / 3 + math.log(2) / 2 - math.log(3) / 4,
    5: 3721 / 11520 + math.log(2) / 2 - math.log(3) / 4,
}

_CHUNK = 1 << 20


def region_bounds(n: int, k: int):
    """Partition of fitness levels 0..n-1 into operator regions.

    Returns [(lo, hi, m)] in ascending level order: RLS_k governs
    [0, ceil(n/k)-1] and RLS_x governs [ceil(n/(x+1)), ceil(n/x)-1] for
    x < k.  Contiguous and exhaustive for every n, k >= 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if n < k:
        raise ValueError(f"need n >= k, got n={n}, k={k}")
    bounds = [(0, -(-n // k) - 1, k)]
    for x in range(k - 1, 0, -1):
        lo = -(-n // (x + 1))
        hi = -(-n // x) - 1
        if lo <= hi:
            bounds.append((lo, hi, x))
    return bounds


def _p_array(n: int, m: int, lo: int, hi: int) -> np.ndarray:
    """improvement_probability(m, i, n) vectorized over i in [lo, hi]."""
    i = np.arange(lo, hi + 1, dtype=np.float64)
    p = np.full(i.shape, m / n)
    for j in range(1, m):
        p *= (n - i - j) / (n - j)
    if m > 1:
        p[i > n - m] = 0.0
    return p


def _region_wait_sum(n: int, lo: int, hi: int, sizes) -> float:
    """sum_{i=lo}^{hi} 1/max_m p_m(i), fsum-accumulated in chunks."""
    partials = []
    start = lo
    while start <= hi:
        stop = min(start + _CHUNK - 1, hi)
        best = _p_array(n, sizes[0], start, stop)
        for m in sizes[1:]:
            np.maximum(best, _p_array(n, m, start, stop), out=best)
        with np.errstate(divide="ignore"):
            waits = 1.0 / best
        partials.append(math.fsum(waits))
        start = stop + 1
    return math.fsum(partials)


def region_runtime(n: int, lo: int, hi: int, sizes) -> float:
    """Expected evaluations spent on levels [lo, hi] using the best of
    `sizes` at each level: (1/2) * sum of optimal waiting times.

    Infinite when some level is unreachable by every given operator.
    """
    if not 0 <= lo <= hi <= n - 1:
        raise ValueError(f"invalid region [{lo}, {hi}] for n={n}")
    sizes = tuple(sizes)
    if not sizes:
        raise ValueError("need at least one operator size")
    return 0.5 * _region_wait_sum(n, lo, hi, sizes)


def expected_opt_runtime(n: int, k: int) -> float:
    """Best-possible expected runtime E[T_k,opt] for the portfolio {1..k}.

    Region-based evaluation: each region uses its single governing operator.
    """
    total = []
    for lo, hi, m in region_bounds(n, k):
        total.append(_region_wait_sum(n, lo, hi, (m,)))
    return 0.5 * math.fsum(total)


def best_possible_runtime(n: int, portfolio) -> float:
    """Same quantity via the per-level argmax over an arbitrary portfolio.

    Independent route to expected_opt_runtime for initial segments (the two
    must agree up to boundary-level rounding); also handles gap portfolios
    like {1, 3}.  Infinite if no operator can improve some level (portfolios
    without RLS_1).
    """
    sizes = tuple(portfolio)
    Portfolio(sizes).validate_for(n)
    return 0.5 * _region_wait_sum(n, 0, n - 1, sizes)


@lru_cache(maxsize=None)
def leading_constant(k: int) -> float:
    """Limit of expected_opt_runtime(n, k)/n^2 as n grows.

    Closed forms exist for k in {1, 2, 3, 5}; other k are evaluated
    numerically at n = 10^7 (error O(1/n) at that size).
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k in _CLOSED_FORM_CONSTANTS:
        return _CLOSED_FORM_CONSTANTS[k]
    n = 10**7
    return expected_opt_runtime(n, k) / n**2


def p_opt(i: int, n: int, portfolio) -> float:
    """Improvement probability of the portfolio's best operator at level i."""
    pf = portfolio if isinstance(portfolio, Portfolio) else Portfolio(portfolio)
    return improvement_probability(optimal_operator(i, n, pf), i, n)


def tau_max(i: int, n: int, k: int, sigma: float) -> float:
    """Envelope (1 + 4/ln n) * sigma / p_opt(i) for the portfolio {1..k}.

    Learning periods adapted by ARG should stay below this line for all but
    a vanishing fraction of iterations.
    """
    if n < 3:
        raise ValueError(f"tau_max needs n >= 3, got {n}")
    if not 0 <= i <= n - 1:
        raise ValueError(f"fitness level {i} outside [0, {n - 1}]")
    return (1 + 4 / math.log(n)) * sigma / p_opt(i, n, Portfolio.initial_segment(k))


def tau_max_percent_table(n: int, k: int, sigma: float) -> np.ndarray:
    """tau_max evaluated once per integer fitness percent (101 values).

    Percent p maps to level floor(p*n/100), clamped to n-1 at the optimum.
    """
    out = np.empty(101, dtype=np.float64)
    for pct in range(101):
        i = min(pct * n // 100, n - 1)
        out[pct] = tau_max(i, n, k, sigma)
    return out


def theory_table(n_values, k_values):
    """Rows (n, k, E_opt, E_opt/n², leading_constant) for the CLI TSV."""
    rows = []
    for n in n_values:
        for k in k_values:
            e = expected_opt_runtime(n, k)
            rows.append((n, k, e, e / n**2, leading_constant(k)))
    return rows
