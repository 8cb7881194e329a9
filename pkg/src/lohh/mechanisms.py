"""The six selection hyper-heuristics as explicit state machines.

Every mechanism exposes the same two calls so a single driver loop can run
any of them:

  select(state)            -> operator size m to apply next (None for Greedy,
                              which signals "apply the whole portfolio")
  feedback(improved)       -> phase event in {"none", "phase_failed",
                              "sigma_success"}

select() draws from the random stream only when the mechanism actually picks
a fresh operator (uniform choice, new permutation pass, or new phase); this
draw discipline is part of the contract because the compiled engines must
consume the stream identically.
"""

import math
from dataclasses import dataclass

from .operators import Portfolio, sample_flip_positions
from .rng import randbelow

MECHANISM_NAMES = (
    "simple_random",
    "permutation",
    "greedy",
    "random_gradient",
    "grg",
    "arg",
)

EVENT_NONE = "none"
EVENT_PHASE_FAILED = "phase_failed"
EVENT_SIGMA_SUCCESS = "sigma_success"


@dataclass(frozen=True)
class SimpleRandom:
    name = "simple_random"


@dataclass(frozen=True)
class Permutation:
    name = "permutation"


@dataclass(frozen=True)
class Greedy:
    name = "greedy"


@dataclass(frozen=True)
class RandomGradient:
    name = "random_gradient"


@dataclass(frozen=True)
class GRG:
    tau: float
    name = "grg"

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"GRG tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class ARG:
    sigma: float
    F: float = 1.5
    tau0: float = 1.0
    name = "arg"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"ARG sigma must be positive, got {self.sigma}")
        if not self.F > 1:
            raise ValueError(f"ARG F must exceed 1, got {self.F}")
        if not self.tau0 >= 1:
            raise ValueError(f"ARG tau0 must be >= 1, got {self.tau0}")


class SimpleRandomState:
    """Uniform independent operator choice every iteration."""

    def __init__(self, portfolio: Portfolio, state):
        self.portfolio = portfolio
        self.state = state

    def select(self):
        return self.portfolio[int(randbelow(self.state, len(self.portfolio)))]

    def feedback(self, improved):
        return EVENT_NONE


class PermutationState:
    """Serve a uniform random ordering, reshuffled after each full pass."""

    def __init__(self, portfolio: Portfolio, state):
        self.portfolio = portfolio
        self.state = state
        self.order = list(range(len(portfolio)))
        self.cursor = len(portfolio)  # force a shuffle on first select

    def select(self):
        k = len(self.portfolio)
        if self.cursor >= k:
            for t in range(k - 1):
                j = t + int(randbelow(self.state, k - t))
                self.order[t], self.order[j] = self.order[j], self.order[t]
            self.cursor = 0
        m = self.portfolio[self.order[self.cursor]]
        self.cursor += 1
        return m

    def feedback(self, improved):
        return EVENT_NONE


class GreedyState:
    """All operators in parallel; select() signals that with None."""

    def __init__(self, portfolio: Portfolio, state):
        self.portfolio = portfolio
        self.state = state

    def select(self):
        return None

    def feedback(self, improved):
        return EVENT_NONE


class RandomGradientState:
    """Keep the operator while it improves, else draw uniformly."""

    def __init__(self, portfolio: Portfolio, state):
        self.portfolio = portfolio
        self.state = state
        self.last_m = None
        self.last_improved = False

    def select(self):
        if not (self.last_improved and self.last_m is not None):
            self.last_m = self.portfolio[
                int(randbelow(self.state, len(self.portfolio)))
            ]
        return self.last_m

    def feedback(self, improved):
        self.last_improved = improved
        return EVENT_NONE


class GRGState:
    """Fixed learning period tau; the improvement counter resets on success."""

    def __init__(self, mech: GRG, portfolio: Portfolio, state):
        self.portfolio = portfolio
        self.state = state
        self.tau = mech.tau
        self.c_t = 0
        self.current_m = None  # None = a fresh phase starts at next select

    def select(self):
        if self.current_m is None:
            self.current_m = self.portfolio[
                int(randbelow(self.state, len(self.portfolio)))
            ]
        return self.current_m

    def feedback(self, improved):
        if improved:
            self.c_t = 0
            return EVENT_NONE
        self.c_t += 1
        if self.c_t < self.tau:
            return EVENT_NONE
        self.c_t = 0
        self.current_m = None
        return EVENT_PHASE_FAILED


class ARGState:
    """Self-adjusting learning period: tau = tau0 * F**e.

    The exponent moves additively (+1/sigma on a failed phase, -1/sigma**2 on
    a sigma-success) so tau is exactly reconstructible from the two event
    counts.  Counter discipline follows the pseudocode: c_t counts every
    evaluation of the phase, c_s counts improvements, and a sigma-success
    restarts the learning period with the same operator.
    """

    def __init__(self, mech: ARG, portfolio: Portfolio, state):
        self.portfolio = portfolio
        self.state = state
        self.sigma = mech.sigma
        self.F = mech.F
        self.tau0 = mech.tau0
        self.e = 0.0
        self.c_t = 0
        self.c_s = 0
        self.failed_phases = 0
        self.sigma_successes = 0
        self.current_m = None
        # Plain multiply instead of ** so the increments match the compiled
        # kernel bit for bit (libm pow may differ in the last ulp).
        self._fail_step = 1.0 / self.sigma
        self._success_step = 1.0 / (self.sigma * self.sigma)

    @property
    def tau(self):
        return self.tau0 * self.F**self.e

    def select(self):
        if self.current_m is None:
            self.current_m = self.portfolio[
                int(randbelow(self.state, len(self.portfolio)))
            ]
        return self.current_m

    def feedback(self, improved):
        self.c_t += 1
        if improved:
            self.c_s += 1
            if self.c_s >= self.sigma:
                self.c_s = 0
                self.c_t = 0
                self.e -= self._success_step
                self.sigma_successes += 1
                return EVENT_SIGMA_SUCCESS
        if self.c_t < self.tau:
            return EVENT_NONE
        self.e += self._fail_step
        self.failed_phases += 1
        self.c_t = 0
        self.c_s = 0
        self.current_m = None
        return EVENT_PHASE_FAILED


_STATE_FACTORIES = {
    "simple_random": lambda mech, pf, st: SimpleRandomState(pf, st),
    "permutation": lambda mech, pf, st: PermutationState(pf, st),
    "greedy": lambda mech, pf, st: GreedyState(pf, st),
    "random_gradient": lambda mech, pf, st: RandomGradientState(pf, st),
    "grg": GRGState,
    "arg": ARGState,
}


def make_state(mechanism, portfolio: Portfolio, state):
    """Fresh per-trial mechanism state bound to the trial's random stream."""
    return _STATE_FACTORIES[mechanism.name](mechanism, portfolio, state)


def make_mechanism(name, tau=None, sigma=None, F=1.5, tau0=1.0):
    """Construct a mechanism config from plain values (CLI/harness helper)."""
    if name == "simple_random":
        return SimpleRandom()
    if name == "permutation":
        return Permutation()
    if name == "greedy":
        return Greedy()
    if name == "random_gradient":
        return RandomGradient()
    if name == "grg":
        if tau is None:
            raise ValueError("grg requires tau")
        return GRG(tau=float(tau))
    if name == "arg":
        if sigma is None:
            raise ValueError("arg requires sigma")
        return ARG(sigma=float(sigma), F=float(F), tau0=float(tau0))
    raise ValueError(f"unknown mechanism: {name!r}")


def greedy_step(x, portfolio: Portfolio, state, perm=None):
    """One Greedy step: every operator applied to x in parallel.

    Returns (next BitString, evaluations charged, winning operator or None).
    The offspring fitnesses are compared and the best strictly improving one
    wins, ties broken uniformly at random; the parent itself is returned when
    nothing improves.  Charges exactly |portfolio| evaluations.
    """
    from .fitness import evaluate_incremental
    from .operators import make_perm

    if perm is None:
        perm = make_perm(x.n)
    candidates = []
    best = x.fitness
    for m in portfolio:
        positions = sample_flip_positions(x.n, m, state, perm)
        fit = evaluate_incremental(x, positions)
        candidates.append((m, positions, fit))
        if fit > best:
            best = fit
    if best == x.fitness:
        return x, len(portfolio), None
    ties = [c for c in candidates if c[2] == best]
    winner = ties[int(randbelow(state, len(ties)))]
    child = x.copy()
    child.apply_flips(winner[1])
    return child, len(portfolio), winner[0]
