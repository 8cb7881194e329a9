"""Readable single-trial driver used as the semantic reference.

This walks the hyper-heuristic loop one evaluation at a time with the
mechanism state machines from `mechanisms`.  The compiled per-iteration
kernel in `engine` consumes the random stream in exactly the same order, so
the two can be compared for bit-identical trajectories in tests.  It is far
too slow for the experiment scales; the harness only selects it on request.
"""

import math

import numpy as np

from .fitness import BitString, evaluate_incremental
from .mechanisms import make_state, greedy_step
from .operators import Portfolio, make_perm, sample_flip_positions
from .rng import trial_state


def _p_opt(n, sizes, f):
    best = 0.0
    for m in sizes:
        if f > n - m:
            continue
        p = m / n
        for j in range(1, m):
            p *= (n - f - j) / (n - j)
        if p > best:
            best = p
    return best


def run_trial_reference(
    n,
    portfolio: Portfolio,
    mechanism,
    master_seed,
    trial_index,
    eval_budget,
    buckets=100,
    track_usage=False,
    track_tau=False,
    track_envelope=False,
):
    """Run one seeded trial and return the raw result fields as a dict."""
    state = trial_state(np.uint64(master_seed), np.uint64(trial_index))
    x = BitString.random(n, state)
    evals = 1
    steps = 0
    exceed = 0
    fails = 0
    sigmas = 0
    perm = make_perm(n)
    mstate = make_state(mechanism, portfolio, state)
    sizes = portfolio.sizes
    k = len(sizes)
    op_index = {m: j for j, m in enumerate(sizes)}
    is_greedy = mechanism.name == "greedy"
    has_tau = mechanism.name in ("grg", "arg")
    cost = k if is_greedy else 1
    budget = eval_budget

    usage = np.zeros((buckets, k), dtype=np.int64) if track_usage else None
    tau_curve = np.full(101, np.nan) if track_tau else None
    envelope_on = track_envelope and mechanism.name == "arg"
    coef = (1 + 4 / math.log(n)) if envelope_on else 0.0

    def envelope_at(fitness):
        best = _p_opt(n, sizes, fitness)
        return coef * mechanism.sigma / best if best > 0.0 else math.inf

    taumax_f = envelope_at(x.fitness) if envelope_on else math.inf

    def current_tau():
        return mstate.tau if has_tau else math.nan

    last_pct = -1
    if track_tau and has_tau:
        last_pct = (100 * x.fitness) // n
        tau_curve[last_pct] = current_tau()

    while x.fitness < n and evals + cost <= budget:
        f_before = x.fitness
        if is_greedy:
            child, charged, winner = greedy_step(x, portfolio, state, perm)
            evals += charged
            steps += 1
            if track_usage:
                b = (buckets * f_before) // n
                for j in range(k):
                    usage[b, j] += 1
            if winner is not None:
                x = child
            continue

        m = mstate.select()
        positions = sample_flip_positions(n, m, state, perm)
        new_fit = evaluate_incremental(x, positions)
        improved = new_fit > f_before
        evals += 1
        steps += 1
        if track_usage:
            usage[(buckets * f_before) // n, op_index[m]] += 1
        if envelope_on and current_tau() > taumax_f:
            exceed += 1
        if improved:
            x.apply_flips(positions)
        event = mstate.feedback(improved)
        if event == "phase_failed":
            fails += 1
        elif event == "sigma_success":
            sigmas += 1
        if improved:
            if envelope_on:
                taumax_f = envelope_at(x.fitness)
            if track_tau and has_tau:
                pct = (100 * x.fitness) // n
                while last_pct < pct:
                    last_pct += 1
                    tau_curve[last_pct] = current_tau()

    return {
        "evaluations": evals,
        "final_fitness": x.fitness,
        "reached_optimum": x.fitness == n,
        "steps": steps,
        "tau_exceed_iters": exceed,
        "phase_failures": fails,
        "sigma_successes": sigmas,
        "final_tau": current_tau(),
        "final_e": getattr(mstate, "e", math.nan),
        "usage": usage,
        "tau_curve": tau_curve,
        "final_bits": x,
    }
