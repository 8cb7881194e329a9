"""RLS_m mutation operators and their analytic improvement probabilities.

RLS_m flips exactly m distinct bits, the flip set uniform over all C(n, m)
subsets.  The probability that such a step improves LeadingOnes from level i
is m * (1/n) * prod_{j=1}^{m-1} (n-i-j)/(n-j): the first zero must be flipped
and no bit of the leading prefix may be.
"""

from fractions import Fraction
from math import comb

import numpy as np

from .fitness import BitString
from .rng import randbelow


class Portfolio:
    """Strictly increasing, non-empty collection of operator sizes."""

    __slots__ = ("sizes",)

    def __init__(self, sizes):
        sizes = tuple(int(m) for m in sizes)
        if not sizes:
            raise ValueError("portfolio must be non-empty")
        if any(m < 1 for m in sizes):
            raise ValueError("operator sizes must be >= 1")
        if any(a >= b for a, b in zip(sizes, sizes[1:])):
            raise ValueError("operator sizes must be strictly increasing")
        self.sizes = sizes

    @classmethod
    def initial_segment(cls, k):
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(range(1, k + 1))

    @property
    def k(self):
        return len(self.sizes)

    def validate_for(self, n):
        if self.sizes[-1] > n:
            raise ValueError(
                f"largest operator size {self.sizes[-1]} exceeds problem size {n}"
            )

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self):
        return len(self.sizes)

    def __getitem__(self, i):
        return self.sizes[i]

    def __eq__(self, other):
        return isinstance(other, Portfolio) and self.sizes == other.sizes

    def __repr__(self):
        return f"Portfolio({list(self.sizes)})"


def sample_flip_positions(n, m, state, perm):
    """Partial Fisher-Yates draw of m distinct positions from [0, n).

    `perm` is a persistent length-n permutation of 0..n-1 owned by the
    caller; any permutation is a valid starting point, so it is never reset
    between draws.  Consumes exactly m randbelow calls.
    """
    out = []
    for t in range(m):
        j = t + int(randbelow(state, n - t))
        perm[t], perm[j] = perm[j], perm[t]
        out.append(int(perm[t]))
    return out


def make_perm(n):
    """Fresh identity permutation scratch array for sample_flip_positions."""
    return np.arange(n, dtype=np.int64)


def mutate(x: BitString, m: int, state, perm=None) -> BitString:
    """Offspring of x at Hamming distance exactly m (uniform flip set)."""
    if m > x.n:
        raise ValueError(f"operator size {m} exceeds string length {x.n}")
    if perm is None:
        perm = make_perm(x.n)
    positions = sample_flip_positions(x.n, m, state, perm)
    child = x.copy()
    child.apply_flips(positions)
    return child


def improvement_probability(m: int, i: int, n: int, exact: bool = False):
    """Pr[RLS_m improves | LO = i] on length-n LeadingOnes.

    Computed as the running product m/n * prod (n-i-j)/(n-j); zero whenever
    i > n - m (the product would contain a non-positive factor).  With
    exact=True the same product is evaluated in exact rational arithmetic.
    """
    if not 0 <= i <= n - 1:
        raise ValueError(f"fitness level {i} outside [0, {n - 1}]")
    if not 1 <= m <= n:
        raise ValueError(f"operator size {m} outside [1, {n}]")
    if i > n - m:
        return Fraction(0) if exact else 0.0
    p = Fraction(m, n) if exact else m / n
    for j in range(1, m):
        if exact:
            p *= Fraction(n - i - j, n - j)
        else:
            p *= (n - i - j) / (n - j)
    return p


def optimal_operator(i: int, n: int, portfolio: Portfolio) -> int:
    """Portfolio member with the highest improvement probability at level i.

    Ties break toward the smaller m.  Comparisons use exact integer
    cross-multiplication of C(n-i-1, m-1)/C(n, m) so boundary levels where
    two operators tie exactly are decided correctly.
    """
    if not 0 <= i <= n - 1:
        raise ValueError(f"fitness level {i} outside [0, {n - 1}]")
    best_m = None
    best_num = best_den = 0
    for m in portfolio:
        num = comb(n - i - 1, m - 1)
        den = comb(n, m)
        if best_m is None or num * best_den > best_num * den:
            best_m, best_num, best_den = m, num, den
    return best_m
