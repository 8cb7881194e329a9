"""Bit-string solutions and the LeadingOnes objective.

LO(x) is the length of the maximal all-ones prefix of x.  Bits are packed
into uint64 words (bit i lives at word i >> 6, offset i & 63) so the full
scan runs word-at-a-time and the compiled kernels share the same layout.
Positions are 0-based throughout the implementation.
"""

import numpy as np
from numba import njit

from .rng import U64, next_u64

_FULL_WORD = U64(0xFFFFFFFFFFFFFFFF)


@njit(cache=True, nogil=True)
def words_for(n):
    return (n + 63) >> 6


@njit(cache=True, nogil=True)
def get_bit(words, i):
    return np.int64((words[i >> 6] >> U64(i & 63)) & U64(1))


@njit(cache=True, nogil=True)
def flip_bit(words, i):
    words[i >> 6] ^= U64(1) << U64(i & 63)


@njit(cache=True, nogil=True)
def leading_ones(words, n):
    """Full O(n) scan, one word at a time."""
    nw = words.shape[0]
    for wi in range(nw):
        w = words[wi]
        if w != _FULL_WORD:
            inv = ~w
            tz = 0
            while (inv >> U64(tz)) & U64(1) == U64(0):
                tz += 1
            f = (wi << 6) + tz
            return np.int64(f if f < n else n)
    return np.int64(n)


@njit(cache=True, nogil=True)
def scan_ones_from(words, n, start):
    """First zero position at or after `start` (n if none)."""
    i = start
    # align to a word boundary bit by bit, then skip whole all-ones words
    while i < n and (i & 63) != 0:
        if get_bit(words, i) == 0:
            return np.int64(i)
        i += 1
    while i + 64 <= n and words[i >> 6] == _FULL_WORD:
        i += 64
    while i < n:
        if get_bit(words, i) == 0:
            return np.int64(i)
        i += 1
    return np.int64(n)


@njit(cache=True, nogil=True)
def random_words(n, state):
    """Uniform random packed bit-string; the tail padding is kept at zero."""
    nw = words_for(n)
    words = np.empty(nw, dtype=np.uint64)
    for wi in range(nw):
        words[wi] = next_u64(state)
    tail = n & 63
    if tail != 0:
        words[nw - 1] &= (U64(1) << U64(tail)) - U64(1)
    return words


class BitString:
    """Fixed-length bit string with its LeadingOnes value cached."""

    __slots__ = ("n", "words", "fitness")

    def __init__(self, n, words=None, fitness=None):
        if n < 1:
            raise ValueError("length must be positive")
        self.n = n
        if words is None:
            words = np.zeros(int(words_for(n)), dtype=np.uint64)
        self.words = words
        self.fitness = int(leading_ones(words, n)) if fitness is None else fitness

    @classmethod
    def random(cls, n, state):
        words = random_words(n, state)
        return cls(n, words)

    @classmethod
    def from_bits(cls, bits):
        bits = list(bits)
        x = cls(len(bits))
        for i, b in enumerate(bits):
            if b:
                flip_bit(x.words, i)
        x.fitness = int(leading_ones(x.words, x.n))
        return x

    def bit(self, i):
        self._check_position(i)
        return int(get_bit(self.words, i))

    def to_list(self):
        return [int(get_bit(self.words, i)) for i in range(self.n)]

    def copy(self):
        return BitString(self.n, self.words.copy(), self.fitness)

    def apply_flips(self, positions):
        """Flip the given distinct positions in place and refresh the cache."""
        positions = list(positions)
        if len(set(positions)) != len(positions):
            raise ValueError("flip positions must be distinct")
        for i in positions:
            self._check_position(i)
        for i in positions:
            flip_bit(self.words, i)
        lo = min(positions)
        if lo < self.fitness:
            self.fitness = lo  # a prefix one-bit became the new first zero
        elif lo == self.fitness:
            self.fitness = int(scan_ones_from(self.words, self.n, lo))
        # flips strictly beyond the first zero leave the prefix unchanged
        return self.fitness

    def _check_position(self, i):
        if not 0 <= i < self.n:
            raise ValueError(f"position {i} out of range [0, {self.n})")

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return (
            isinstance(other, BitString)
            and self.n == other.n
            and bool(np.array_equal(self.words, other.words))
        )

    def __repr__(self):
        shown = "".join(str(b) for b in self.to_list()[:32])
        if self.n > 32:
            shown += "..."
        return f"BitString(n={self.n}, fitness={self.fitness}, bits={shown})"


def evaluate_full(bits) -> int:
    """LeadingOnes of any binary sequence (list, array, or BitString)."""
    if isinstance(bits, BitString):
        return int(leading_ones(bits.words, bits.n))
    f = 0
    for b in bits:
        if not b:
            break
        f += 1
    return f


def evaluate_incremental(x: BitString, flipped) -> int:
    """LO value after flipping `flipped` in x, without modifying x.

    Requires x.fitness to be the correct pre-flip value; runs in
    O(|flipped| + fitness change) instead of rescanning from scratch.
    """
    positions = set()
    for i in flipped:
        x._check_position(i)
        if i in positions:
            raise ValueError(f"position {i} flipped twice")
        positions.add(i)
    f = x.fitness
    lo = min(positions)
    if lo > f:
        return f
    if lo < f:
        # a one-bit inside the prefix turns into the new first zero
        return lo
    # lo == f: the first zero flips to one, walk the extended prefix
    i = f
    while i < x.n:
        b = get_bit(x.words, i)
        if i in positions:
            b ^= 1
        if not b:
            break
        i += 1
    return i
