"""Compiled trial kernels.

Two interchangeable engines run a single seeded trial:

`run_trial_iter`
    Literal per-iteration loop.  Consumes the random stream in exactly the
    same order as `reference.run_trial_reference`, so trajectories match bit
    for bit.  Cost is one pass per evaluation, which gets slow once n*n
    budgets reach billions of iterations.

`run_trial_jump`
    Waiting-time simulation.  Whether an iteration improves depends only on
    the flipped positions (the first zero must be hit), never on bit values
    past the prefix, so failures carry no information and the suffix stays
    uniform.  While the fitness and the active operator are unchanged the
    improvement indicators are therefore iid Bernoulli(p_m(f)), and the time
    to the next improvement can be drawn as one truncated geometric variate
    instead of being walked step by step.  Learning-period guards truncate
    the draw at the window end, so phase bookkeeping, operator usage counts
    and tau trajectories come out with the exact per-iteration distribution.
    Only the stream consumption differs, which is why the two engines are
    compared statistically rather than pointwise.

Supported by both: simple_random, random_gradient, grg, arg.  permutation
and greedy interleave operators inside a pass, which breaks the fixed-rate
argument, so they stay on the per-iteration engine.
"""

import math

import numpy as np
from numba import njit

from .fitness import flip_bit, leading_ones, random_words, scan_ones_from
from .rng import randbelow, trial_state, u01

MECH_IDS = {
    "simple_random": 0,
    "permutation": 1,
    "greedy": 2,
    "random_gradient": 3,
    "grg": 4,
    "arg": 5,
}

JUMP_CAPABLE = frozenset(("simple_random", "random_gradient", "grg", "arg"))

# window length stand-in for tau = inf; far beyond any reachable budget
_HUGE_WINDOW = np.int64(4_000_000_000_000_000_000)

# out_i slots
_EVALS, _FINAL_F, _REACHED, _STEPS, _EXCEED, _FAILS, _SIGMAS = range(7)
OUT_I_SLOTS = 8
OUT_F_SLOTS = 2


@njit(cache=True, nogil=True)
def _refresh_p(n, ops, f, p_tab):
    """Fill p_tab[j] = Pr[RLS_{ops[j]} improves | LO = f]; return the sum."""
    total = 0.0
    for oi in range(ops.shape[0]):
        m = ops[oi]
        if f > n - m:
            p_tab[oi] = 0.0
        else:
            p = m / n
            for j in range(1, m):
                p *= (n - f - j) / (n - j)
            p_tab[oi] = p
        total += p_tab[oi]
    return total


@njit(cache=True, nogil=True)
def _p_best(p_tab):
    best = 0.0
    for oi in range(p_tab.shape[0]):
        if p_tab[oi] > best:
            best = p_tab[oi]
    return best


@njit(cache=True, nogil=True)
def _fitness_with_flips(words, n, f, positions, m, minpos):
    """Offspring LO value without mutating words (flips given, min given)."""
    if minpos > f:
        return np.int64(f)
    if minpos < f:
        return np.int64(minpos)
    i = f
    while i < n:
        b = (words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)
        for t in range(m):
            if positions[t] == i:
                b ^= np.uint64(1)
        if b == np.uint64(0):
            break
        i += 1
    return np.int64(i)


@njit(cache=True, nogil=True)
def _window_len(tau):
    """Guard window length in evaluations: max(ceil(tau), 1), inf clamped."""
    if tau >= 4.0e18:
        return _HUGE_WINDOW
    w = np.int64(np.ceil(tau))
    if w < 1:
        w = np.int64(1)
    return w


@njit(cache=True, nogil=True)
def geom_draw(state, p, cap):
    """First-success time of iid Bernoulli(p), truncated: > cap -> cap + 1."""
    if p >= 1.0:
        return np.int64(1)
    if p <= 0.0:
        return cap + np.int64(1)
    u = u01(state)
    r = np.ceil(math.log(u) / math.log1p(-p))
    if r < 1.0:
        return np.int64(1)
    if r > float(cap):
        return cap + np.int64(1)
    return np.int64(r)


@njit(cache=True, nogil=True)
def _categorical(state, p_tab, sum_p):
    """Index draw proportional to p_tab; zero entries can never win."""
    r = u01(state) * sum_p
    acc = 0.0
    sel = np.int64(-1)
    for oi in range(p_tab.shape[0]):
        if p_tab[oi] <= 0.0:
            continue
        acc += p_tab[oi]
        sel = oi
        if r <= acc:
            break
    return sel


@njit(cache=True, nogil=True)
def _apply_improvement(words, n, f, m, state, riders):
    """Flip the first zero plus m-1 uniform distinct positions above it.

    Conditioned on an improving RLS_m step the non-prefix flips are a
    uniform (m-1)-subset of {f+1, ..., n-1}; sampled by rejection, which is
    cheap because m <= a handful.  Returns the new fitness after rescan.
    """
    flip_bit(words, f)
    span = n - 1 - f
    cnt = m - 1
    t = 0
    while t < cnt:
        r = f + 1 + randbelow(state, span)
        fresh = True
        for u in range(t):
            if riders[u] == r:
                fresh = False
                break
        if fresh:
            riders[t] = r
            t += 1
    for u in range(cnt):
        flip_bit(words, riders[u])
    return scan_ones_from(words, n, f)


@njit(cache=True, nogil=True)
def run_trial_iter(
    n,
    ops,
    mech,
    tau_grg,
    sigma,
    F,
    tau0,
    master_seed,
    trial_index,
    budget,
    buckets,
    track_usage,
    track_tau,
    track_envelope,
    usage,
    tau_curve,
    out_i,
    out_f,
):
    """Per-iteration trial; stream-identical to the pure Python reference."""
    st = trial_state(master_seed, trial_index)
    words = random_words(n, st)
    f = leading_ones(words, n)
    k = ops.shape[0]
    mx = ops[k - 1]
    perm = np.arange(n)
    positions = np.empty(mx, dtype=np.int64)
    posbuf = np.empty((k, mx), dtype=np.int64)
    fits = np.empty(k, dtype=np.int64)
    order = np.empty(k, dtype=np.int64)
    for oi in range(k):
        order[oi] = oi
    cursor = k  # permutation mech: first select reshuffles

    evals = np.int64(1)
    steps = np.int64(0)
    exceed = np.int64(0)
    fails = np.int64(0)
    sigmas = np.int64(0)
    cur = np.int64(-1)
    rg_last = False
    c_t = np.int64(0)
    c_s = np.int64(0)
    e = 0.0
    inv_s1 = 1.0 / sigma
    inv_s2 = 1.0 / (sigma * sigma)
    has_tau = mech == 4 or mech == 5
    tau_cur = tau_grg if mech == 4 else tau0 * F**e
    envelope_on = track_envelope and mech == 5
    coef = (1.0 + 4.0 / math.log(n)) if envelope_on else 0.0
    p_tab = np.empty(k, dtype=np.float64)
    taumax_f = math.inf
    if envelope_on:
        _refresh_p(n, ops, f, p_tab)
        pb = _p_best(p_tab)
        taumax_f = coef * sigma / pb if pb > 0.0 else math.inf
    last_pct = np.int64(-1)
    if track_tau and has_tau:
        last_pct = (np.int64(100) * f) // n
        tau_curve[last_pct] = tau_cur

    cost = np.int64(k) if mech == 2 else np.int64(1)
    while f < n and evals + cost <= budget:
        if mech == 2:
            for oi in range(k):
                m = ops[oi]
                minpos = np.int64(n)
                for t in range(m):
                    j = t + randbelow(st, n - t)
                    tmp = perm[t]
                    perm[t] = perm[j]
                    perm[j] = tmp
                    pos = perm[t]
                    posbuf[oi, t] = pos
                    if pos < minpos:
                        minpos = pos
                fits[oi] = _fitness_with_flips(words, n, f, posbuf[oi], m, minpos)
            evals += k
            steps += 1
            if track_usage:
                b = (buckets * f) // n
                for oi in range(k):
                    usage[b, oi] += 1
            best = f
            for oi in range(k):
                if fits[oi] > best:
                    best = fits[oi]
            if best > f:
                ties = np.int64(0)
                for oi in range(k):
                    if fits[oi] == best:
                        ties += 1
                r = randbelow(st, ties)
                cnt = np.int64(0)
                for oi in range(k):
                    if fits[oi] == best:
                        if cnt == r:
                            m = ops[oi]
                            for t in range(m):
                                flip_bit(words, posbuf[oi, t])
                            break
                        cnt += 1
                f = np.int64(best)
            continue

        # --- select
        if mech == 0:
            cur = randbelow(st, k)
        elif mech == 1:
            if cursor >= k:
                for t in range(k - 1):
                    j = t + randbelow(st, k - t)
                    tmp = order[t]
                    order[t] = order[j]
                    order[j] = tmp
                cursor = 0
            cur = order[cursor]
            cursor += 1
        elif mech == 3:
            if not (rg_last and cur >= 0):
                cur = randbelow(st, k)
        else:
            if cur < 0:
                cur = randbelow(st, k)
        m = ops[cur]

        # --- mutate
        minpos = np.int64(n)
        for t in range(m):
            j = t + randbelow(st, n - t)
            tmp = perm[t]
            perm[t] = perm[j]
            perm[j] = tmp
            pos = perm[t]
            positions[t] = pos
            if pos < minpos:
                minpos = pos
        improved = minpos == f

        # --- account
        evals += 1
        steps += 1
        if track_usage:
            usage[(buckets * f) // n, cur] += 1
        if envelope_on and tau_cur > taumax_f:
            exceed += 1

        # --- apply
        if improved:
            for t in range(m):
                flip_bit(words, positions[t])
            f = scan_ones_from(words, n, f)

        # --- feedback
        if mech == 3:
            rg_last = improved
        elif mech == 4:
            if improved:
                c_t = np.int64(0)
            else:
                c_t += 1
                if not (c_t < tau_cur):
                    c_t = np.int64(0)
                    cur = np.int64(-1)
                    fails += 1
        elif mech == 5:
            c_t += 1
            did_sigma = False
            if improved:
                c_s += 1
                if c_s >= sigma:
                    c_s = np.int64(0)
                    c_t = np.int64(0)
                    e -= inv_s2
                    tau_cur = tau0 * F**e
                    sigmas += 1
                    did_sigma = True
            if not did_sigma and not (c_t < tau_cur):
                e += inv_s1
                tau_cur = tau0 * F**e
                fails += 1
                c_t = np.int64(0)
                c_s = np.int64(0)
                cur = np.int64(-1)

        if improved:
            if envelope_on:
                _refresh_p(n, ops, f, p_tab)
                pb = _p_best(p_tab)
                taumax_f = coef * sigma / pb if pb > 0.0 else math.inf
            if track_tau and has_tau:
                pct = (np.int64(100) * f) // n
                while last_pct < pct:
                    last_pct += 1
                    tau_curve[last_pct] = tau_cur

    out_i[_EVALS] = evals
    out_i[_FINAL_F] = f
    out_i[_REACHED] = 1 if f == n else 0
    out_i[_STEPS] = steps
    out_i[_EXCEED] = exceed
    out_i[_FAILS] = fails
    out_i[_SIGMAS] = sigmas
    if mech == 4:
        out_f[0] = tau_cur
        out_f[1] = np.nan
    elif mech == 5:
        out_f[0] = tau_cur
        out_f[1] = e
    else:
        out_f[0] = np.nan
        out_f[1] = np.nan


@njit(cache=True, nogil=True)
def run_trial_jump(
    n,
    ops,
    mech,
    tau_grg,
    sigma,
    F,
    tau0,
    master_seed,
    trial_index,
    budget,
    buckets,
    track_usage,
    track_tau,
    track_envelope,
    usage,
    tau_curve,
    out_i,
    out_f,
):
    """Waiting-time trial; same outputs as run_trial_iter in distribution."""
    if mech == 1 or mech == 2:
        out_i[_EVALS] = -1  # unsupported here; harness keeps these on iter
        return
    st = trial_state(master_seed, trial_index)
    words = random_words(n, st)
    f = leading_ones(words, n)
    k = ops.shape[0]
    riders = np.empty(ops[k - 1], dtype=np.int64)
    p_tab = np.empty(k, dtype=np.float64)
    sum_p = _refresh_p(n, ops, f, p_tab)

    evals = np.int64(1)
    steps = np.int64(0)
    exceed = np.int64(0)
    fails = np.int64(0)
    sigmas = np.int64(0)
    cur = np.int64(-1)
    c_t = np.int64(0)
    c_s = np.int64(0)
    e = 0.0
    inv_s1 = 1.0 / sigma
    inv_s2 = 1.0 / (sigma * sigma)
    has_tau = mech == 4 or mech == 5
    tau_cur = tau_grg if mech == 4 else tau0 * F**e
    envelope_on = track_envelope and mech == 5
    coef = (1.0 + 4.0 / math.log(n)) if envelope_on else 0.0
    taumax_f = math.inf
    if envelope_on:
        pb = _p_best(p_tab)
        taumax_f = coef * sigma / pb if pb > 0.0 else math.inf
    last_pct = np.int64(-1)
    if track_tau and has_tau:
        last_pct = (np.int64(100) * f) // n
        tau_curve[last_pct] = tau_cur

    if mech == 0:
        # fresh uniform operator every iteration: improvement rate is the
        # portfolio mean, the improving operator is drawn from p / sum(p)
        while f < n and evals < budget:
            remaining = budget - evals
            pbar = sum_p / k
            t_next = geom_draw(st, pbar, remaining)
            if t_next > remaining:
                evals += remaining
                steps += remaining
                break
            evals += t_next
            steps += t_next
            sel = _categorical(st, p_tab, sum_p)
            f = _apply_improvement(words, n, f, ops[sel], st, riders)
            sum_p = _refresh_p(n, ops, f, p_tab)

    elif mech == 3:
        # explore: fresh operator per iteration until one improves; exploit:
        # keep that operator through stepwise Bernoulli trials until it fails
        exploit = False
        sel = np.int64(-1)
        while f < n and evals < budget:
            if exploit:
                evals += 1
                steps += 1
                if u01(st) <= p_tab[sel]:
                    f = _apply_improvement(words, n, f, ops[sel], st, riders)
                    sum_p = _refresh_p(n, ops, f, p_tab)
                else:
                    exploit = False
            else:
                remaining = budget - evals
                pbar = sum_p / k
                t_next = geom_draw(st, pbar, remaining)
                if t_next > remaining:
                    evals += remaining
                    steps += remaining
                    break
                evals += t_next
                steps += t_next
                sel = _categorical(st, p_tab, sum_p)
                f = _apply_improvement(words, n, f, ops[sel], st, riders)
                sum_p = _refresh_p(n, ops, f, p_tab)
                exploit = True

    else:
        # grg / arg: operator pinned for the phase, improvements at rate
        # p_m(f) within the guard window, window end processed exactly
        window = _window_len(tau_cur)
        while f < n and evals < budget:
            if cur < 0:
                cur = randbelow(st, k)
            remaining = budget - evals
            room = window - c_t
            cap = room if room < remaining else remaining
            t_next = geom_draw(st, p_tab[cur], cap)
            if t_next <= cap:
                # improvement after t_next evaluations at this fitness
                evals += t_next
                steps += t_next
                if track_usage:
                    usage[(buckets * f) // n, cur] += t_next
                if envelope_on and tau_cur > taumax_f:
                    exceed += t_next
                f = _apply_improvement(words, n, f, ops[cur], st, riders)
                _refresh_p(n, ops, f, p_tab)
                if envelope_on:
                    pb = _p_best(p_tab)
                    taumax_f = coef * sigma / pb if pb > 0.0 else math.inf
                if mech == 4:
                    c_t = np.int64(0)
                else:
                    c_t += t_next
                    c_s += 1
                    if c_s >= sigma:
                        c_s = np.int64(0)
                        c_t = np.int64(0)
                        e -= inv_s2
                        tau_cur = tau0 * F**e
                        window = _window_len(tau_cur)
                        sigmas += 1
                    elif c_t >= window:
                        e += inv_s1
                        tau_cur = tau0 * F**e
                        window = _window_len(tau_cur)
                        fails += 1
                        c_t = np.int64(0)
                        c_s = np.int64(0)
                        cur = np.int64(-1)
                if track_tau:
                    pct = (np.int64(100) * f) // n
                    while last_pct < pct:
                        last_pct += 1
                        tau_curve[last_pct] = tau_cur
            elif room <= remaining:
                # window ran out before an improvement: failed phase
                evals += room
                steps += room
                if track_usage:
                    usage[(buckets * f) // n, cur] += room
                if envelope_on and tau_cur > taumax_f:
                    exceed += room
                fails += 1
                c_t = np.int64(0)
                c_s = np.int64(0)
                cur = np.int64(-1)
                if mech == 5:
                    e += inv_s1
                    tau_cur = tau0 * F**e
                    window = _window_len(tau_cur)
            else:
                # budget ends inside the window
                evals += remaining
                steps += remaining
                if track_usage:
                    usage[(buckets * f) // n, cur] += remaining
                if envelope_on and tau_cur > taumax_f:
                    exceed += remaining
                c_t += remaining
                break

    out_i[_EVALS] = evals
    out_i[_FINAL_F] = f
    out_i[_REACHED] = 1 if f == n else 0
    out_i[_STEPS] = steps
    out_i[_EXCEED] = exceed
    out_i[_FAILS] = fails
    out_i[_SIGMAS] = sigmas
    if mech == 4:
        out_f[0] = tau_cur
        out_f[1] = np.nan
    elif mech == 5:
        out_f[0] = tau_cur
        out_f[1] = e
    else:
        out_f[0] = np.nan
        out_f[1] = np.nan


def warm_up():
    """Trigger jit compilation of both kernels on a tiny instance."""
    ops = np.array([1, 2, 3], dtype=np.int64)
    usage = np.zeros((10, 3), dtype=np.int64)
    curve = np.full(101, np.nan)
    out_i = np.zeros(OUT_I_SLOTS, dtype=np.int64)
    out_f = np.zeros(OUT_F_SLOTS, dtype=np.float64)
    for mech in range(6):
        run_trial_iter(
            np.int64(32), ops, np.int64(mech), 4.0, 2.0, 1.5, 1.0,
            np.uint64(1), np.uint64(0), np.int64(5000), np.int64(10),
            True, True, True, usage, curve, out_i, out_f,
        )
    for mech in (0, 3, 4, 5):
        run_trial_jump(
            np.int64(32), ops, np.int64(mech), 4.0, 2.0, 1.5, 1.0,
            np.uint64(1), np.uint64(0), np.int64(5000), np.int64(10),
            mech >= 4, True, True, usage, curve, out_i, out_f,
        )
