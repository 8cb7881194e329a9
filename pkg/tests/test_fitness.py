"""LeadingOnes evaluation: packed words, caching, and incremental updates."""

import itertools

import numpy as np
import pytest

from lohh.fitness import (
    BitString,
    evaluate_full,
    evaluate_incremental,
    leading_ones,
    random_words,
    scan_ones_from,
    words_for,
)
from lohh.rng import seed_state, randbelow


def _naive_lo(bits):
    f = 0
    for b in bits:
        if not b:
            break
        f += 1
    return f


def test_leading_ones_exhaustive_small_n():
    for n in range(1, 11):
        for bits in itertools.product((0, 1), repeat=n):
            x = BitString.from_bits(bits)
            assert x.fitness == _naive_lo(bits)
            assert evaluate_full(bits) == x.fitness
            assert x.to_list() == list(bits)


def test_word_boundaries():
    # all-ones strings straddling the uint64 word edges
    for n in [63, 64, 65, 127, 128, 129, 200]:
        assert int(words_for(n)) == (n + 63) // 64
        x = BitString.from_bits([1] * n)
        assert x.fitness == n
        y = BitString.from_bits([1] * (n - 1) + [0])
        assert y.fitness == n - 1


def test_scan_ones_from():
    bits = [1, 1, 0, 1, 1, 1, 0, 1] + [1] * 120 + [0, 1]
    x = BitString.from_bits(bits)
    n = len(bits)
    for start in range(n):
        want = start
        while want < n and bits[want]:
            want += 1
        assert int(scan_ones_from(x.words, n, start)) == want
    assert int(scan_ones_from(x.words, n, n)) == n


def test_random_words_tail_padding_is_zero():
    state = seed_state(np.uint64(4))
    for n in [1, 5, 63, 64, 65, 130]:
        words = random_words(n, state)
        if n % 64:
            assert int(words[-1]) >> (n % 64) == 0


def test_apply_flips_incremental_equals_rescan():
    state = seed_state(np.uint64(21))
    for n in [6, 9, 64, 77]:
        for _ in range(300):
            bits = [int(randbelow(state, 2)) for _ in range(n)]
            x = BitString.from_bits(bits)
            m = 1 + int(randbelow(state, min(n, 5)))
            flips = []
            while len(flips) < m:
                p = int(randbelow(state, n))
                if p not in flips:
                    flips.append(p)
            predicted = evaluate_incremental(x, flips)
            returned = x.apply_flips(flips)
            assert returned == predicted
            assert x.fitness == int(leading_ones(x.words, n))


def test_evaluate_incremental_does_not_modify():
    x = BitString.from_bits([1, 1, 0, 1])
    before = x.to_list()
    assert evaluate_incremental(x, [2]) == 4  # the zero flips, prefix extends
    assert evaluate_incremental(x, [0]) == 0
    assert evaluate_incremental(x, [3]) == 2
    assert x.to_list() == before


def test_flip_validation():
    x = BitString.from_bits([1, 0, 1])
    with pytest.raises(ValueError):
        x.apply_flips([0, 0])
    with pytest.raises(ValueError):
        x.apply_flips([3])
    with pytest.raises(ValueError):
        evaluate_incremental(x, [1, 1])
    with pytest.raises(ValueError):
        evaluate_incremental(x, [-1])


def test_copy_and_eq():
    state = seed_state(np.uint64(8))
    x = BitString.random(300, state)
    y = x.copy()
    assert x == y and x is not y
    y.apply_flips([0])
    assert x != y
