"""Analytic runtimes: dual-route agreement and the published constants."""

import math

import numpy as np
import pytest

from lohh.operators import Portfolio, improvement_probability, optimal_operator
from lohh.theory import (
    best_possible_runtime,
    expected_opt_runtime,
    leading_constant,
    p_opt,
    region_bounds,
    region_runtime,
    tau_max,
    tau_max_percent_table,
    theory_table,
)


def test_region_bounds_partition_every_level_once():
    for n in [5, 10, 17, 100, 1001]:
        for k in range(1, min(n, 7) + 1):
            covered = []
            for lo, hi, m in region_bounds(n, k):
                assert lo <= hi
                assert 1 <= m <= k
                covered.extend(range(lo, hi + 1))
            assert sorted(covered) == list(range(n))
            assert len(covered) == n


def test_region_operators_are_near_argmax():
    # the ceil-based region assignment may differ from the per-level argmax
    # only at boundary levels, and there only with negligible probability gap
    n, k = 300, 4
    pf = Portfolio.initial_segment(k)
    for lo, hi, m in region_bounds(n, k):
        for i in (lo, hi):
            best = optimal_operator(i, n, pf)
            if best != m:
                gap = improvement_probability(best, i, n) - improvement_probability(
                    m, i, n
                )
                assert 0 <= gap < 1e-6


def test_dual_route_agreement():
    """Region-based sum and per-level argmax agree for initial segments.

    The region route may assign a boundary level to the neighbouring
    operator, whose waiting time there is longer by a vanishing amount, so
    it can only exceed the argmax route, and only by O(1) evaluations out
    of Theta(n^2).
    """
    for n in [50, 311, 4000]:
        for k in [1, 2, 3, 5]:
            a = expected_opt_runtime(n, k)
            b = best_possible_runtime(n, Portfolio.initial_segment(k))
            assert b <= a <= b + 1.0


def test_small_case_by_hand():
    # n=4, k=1: every level waits 1/p_1 = 4 evaluations, halved: 4*4/2 = 8
    assert expected_opt_runtime(4, 1) == pytest.approx(8.0)
    # n=2, k=2: p_opt(0) = p_2(0) = 1 wait 1; p_opt(1) = p_1(1) = 1/2 wait 2
    assert expected_opt_runtime(2, 2) == pytest.approx(0.5 * (1 + 2))


def test_rls1_exact_half_n_squared():
    for n in [10, 1000, 10**6]:
        assert expected_opt_runtime(n, 1) == pytest.approx(n * n / 2, rel=1e-12)


def test_leading_constants_closed_forms():
    assert leading_constant(1) == 0.5
    assert leading_constant(2) == pytest.approx((1 + math.log(2)) / 4, abs=1e-15)
    assert leading_constant(3) == pytest.approx(0.40525, abs=5e-6)
    assert leading_constant(5) == pytest.approx(0.39492, abs=5e-6)
    # numeric fallback sits between the neighbouring closed forms
    assert leading_constant(5) < leading_constant(4) < leading_constant(3)


def test_finite_n_converges_to_leading_constant():
    for k in [2, 3]:
        c = leading_constant(k)
        prev = abs(expected_opt_runtime(10**3, k) / 10**6 - c)
        curr = abs(expected_opt_runtime(10**5, k) / 10**10 - c)
        assert curr < prev


def test_region_runtime_matches_manual_sum():
    n, lo, hi = 200, 40, 90
    want = 0.5 * sum(
        1.0 / max(improvement_probability(m, i, n) for m in (1, 3))
        for i in range(lo, hi + 1)
    )
    assert region_runtime(n, lo, hi, (1, 3)) == pytest.approx(want, rel=1e-12)
    with pytest.raises(ValueError):
        region_runtime(n, 90, 40, (1,))


def test_region_runtime_unreachable_levels_are_infinite():
    # without RLS_1 the last level can never be improved
    assert region_runtime(100, 95, 99, (2,)) == math.inf
    assert best_possible_runtime(100, Portfolio([2, 3])) == math.inf


def test_p_opt_and_tau_max():
    n, k, sigma = 1000, 2, 5.0
    pf = Portfolio.initial_segment(k)
    for i in [0, 499, 500, 999]:
        m = optimal_operator(i, n, pf)
        assert p_opt(i, n, pf) == improvement_probability(m, i, n)
        want = (1 + 4 / math.log(n)) * sigma / p_opt(i, n, pf)
        assert tau_max(i, n, k, sigma) == pytest.approx(want)
    # the envelope grows toward the optimum where improvements get rare
    assert tau_max(999, n, k, sigma) > tau_max(0, n, k, sigma)


def test_tau_max_percent_table_shape():
    table = tau_max_percent_table(500, 2, 4.0)
    assert table.shape == (101,)
    assert np.all(np.isfinite(table))
    assert table[100] == tau_max(499, 500, 2, 4.0)


def test_theory_table_rows():
    rows = theory_table([100, 200], [1, 2])
    assert len(rows) == 4
    n, k, e, e_over, c = rows[0]
    assert (n, k) == (100, 1)
    assert e == pytest.approx(5000.0)
    assert e_over == pytest.approx(0.5)
    assert c == 0.5
