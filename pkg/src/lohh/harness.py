"""Seeded trial execution, batch statistics, and sweeps.

A trial is fully determined by (master_seed, trial_index); batches hand the
indices to a thread pool but always aggregate in index order, so results do
not depend on thread count or scheduling.  The compiled kernels release the
GIL, which is what makes the pool worthwhile.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import engine as _engine
from .mechanisms import MECHANISM_NAMES, make_mechanism
from .operators import Portfolio
from .reference import run_trial_reference
from .schedules import SIGMA_SCHEDULES, cstar, parse_tau, resolve_sigma

ENGINES = ("auto", "iter", "jump", "reference")

_MAX_BUDGET = 1 << 62


class ConfigError(ValueError):
    """Invalid experiment configuration; the CLI reports these as usage errors."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce a batch.

    Attributes
    ----------
    n : problem size.
    mechanism : one of mechanisms.MECHANISM_NAMES.
    k : portfolio {RLS_1..RLS_k} when `portfolio` is not given.
    portfolio : explicit operator sizes, overriding k.
    sigma_schedule, sigma_const : ARG learning-rate rule; const needs the value.
    tau : GRG learning period, symbolic ("42", "0.6nlnn", "inf").
    F, tau0 : ARG update strength and initial period.
    trials, master_seed : batch size and the 64-bit stream seed.
    buckets : fitness ranges for usage counting.
    usage_trace, tau_trace : per-trial trace switches.
    eval_budget : evaluation cap, default 20*n*n.
    threads : worker threads; has no effect on the results.
    engine : auto / iter / jump / reference.
    """

    n: int
    mechanism: str = "arg"
    k: int = 2
    portfolio: tuple = ()
    sigma_schedule: str = "const"
    sigma_const: float = None
    tau: str = None
    F: float = 1.5
    tau0: float = 1.0
    trials: int = 100
    master_seed: int = 2026
    buckets: int = 100
    usage_trace: bool = False
    tau_trace: bool = False
    eval_budget: int = None
    threads: int = 1
    engine: str = "auto"


@dataclass(frozen=True)
class ResolvedConfig:
    """Config with every symbolic field evaluated for its n."""

    config: ExperimentConfig
    sizes: tuple
    mech_id: int
    sigma: float  # 1.0 placeholder for mechanisms without sigma
    tau_value: float  # inf allowed; 0.0 placeholder when unused
    budget: int
    engine: str
    cstar: float = None
    track_envelope: bool = False


@dataclass
class TrialResult:
    evaluations: int
    reached_optimum: bool
    final_fitness: int
    mutation_steps: int
    usage: np.ndarray = None
    tau_samples: list = None
    final_tau: float = math.nan
    final_tau_exponent: float = math.nan
    tau_exceed_iters: int = 0
    phase_failures: int = 0
    sigma_successes: int = 0


@dataclass
class BatchSummary:
    config: ExperimentConfig
    mean_evaluations: float
    std_evaluations: float
    min_evaluations: int
    max_evaluations: int
    mean_over_n2: float
    reached_fraction: float
    usage_total: np.ndarray = None
    usage_share: np.ndarray = None
    tau_curve_mean: np.ndarray = None
    tau_curve_runs: np.ndarray = None
    exceed_fraction: float = math.nan


def resolve(config: ExperimentConfig) -> ResolvedConfig:
    """Validate a config and evaluate schedules for its problem size."""
    if config.n < 2:
        raise ConfigError("n must be at least 2")
    if config.trials < 1:
        raise ConfigError("trials must be at least 1")
    if config.buckets < 1:
        raise ConfigError("buckets must be at least 1")
    if config.threads < 1:
        raise ConfigError("threads must be at least 1")
    if config.mechanism not in MECHANISM_NAMES:
        raise ConfigError(
            f"unknown mechanism {config.mechanism!r}; choose from {MECHANISM_NAMES}"
        )
    if config.engine not in ENGINES:
        raise ConfigError(f"unknown engine {config.engine!r}; choose from {ENGINES}")
    if config.F <= 1.0:
        raise ConfigError("F must exceed 1")
    if config.tau0 < 1.0:
        raise ConfigError("tau0 must be at least 1")

    sizes = tuple(config.portfolio) if config.portfolio else None
    try:
        if sizes is None:
            if config.k < 1:
                raise ValueError("k must be at least 1")
            pf = Portfolio.initial_segment(config.k)
        else:
            pf = Portfolio(sizes)
        pf.validate_for(config.n)
    except ValueError as err:
        raise ConfigError(str(err)) from None

    name = config.mechanism
    tau_value = 0.0
    if name == "grg":
        if config.tau is None:
            raise ConfigError("grg requires --tau")
        try:
            tau_value = parse_tau(str(config.tau), config.n)
        except ValueError as err:
            raise ConfigError(str(err)) from None
    elif config.tau is not None:
        raise ConfigError("--tau only applies to the grg mechanism")

    sigma = 1.0
    cs = None
    if name == "arg":
        if config.sigma_schedule not in SIGMA_SCHEDULES:
            raise ConfigError(
                f"unknown sigma schedule {config.sigma_schedule!r}; "
                f"choose from {SIGMA_SCHEDULES}"
            )
        if config.sigma_schedule == "const" and config.sigma_const is None:
            raise ConfigError("arg with the const schedule requires --sigma-const")
        try:
            sigma = resolve_sigma(config.sigma_schedule, config.n, config.sigma_const)
        except ValueError as err:
            raise ConfigError(str(err)) from None
        if sigma < 1.0:
            raise ConfigError(f"resolved sigma {sigma} is below 1")
        cs = cstar(config.sigma_schedule)
    elif config.sigma_const is not None:
        raise ConfigError("--sigma-const only applies to the arg mechanism")

    if config.tau_trace and name not in ("grg", "arg"):
        raise ConfigError("tau tracing requires a mechanism with a learning period")

    eng = config.engine
    if eng == "auto":
        if name in ("grg", "arg"):
            eng = "jump"
        elif name in ("simple_random", "random_gradient"):
            eng = "iter" if config.usage_trace else "jump"
        else:
            eng = "iter"
    if eng == "jump":
        if name not in _engine.JUMP_CAPABLE:
            raise ConfigError(f"the jump engine does not support {name!r}")
        if config.usage_trace and name in ("simple_random", "random_gradient"):
            raise ConfigError(
                "usage tracing of simple_random/random_gradient needs engine=iter"
            )

    budget = config.eval_budget
    if budget is None:
        budget = 20 * config.n * config.n
    if budget < 1:
        raise ConfigError("eval_budget must be at least 1")
    budget = min(budget, _MAX_BUDGET)

    return ResolvedConfig(
        config=config,
        sizes=tuple(pf.sizes),
        mech_id=_engine.MECH_IDS[name],
        sigma=float(sigma),
        tau_value=float(tau_value),
        budget=int(budget),
        engine=eng,
        cstar=cs,
        track_envelope=name == "arg",
    )


def _result_from_kernel(rc, usage, curve, out_i, out_f):
    cfg = rc.config
    if out_i[0] < 0:
        raise RuntimeError("jump kernel refused the mechanism; resolve() is wrong")
    samples = None
    if cfg.tau_trace:
        samples = [
            (pct, curve[pct] / cfg.n) for pct in range(101) if not math.isnan(curve[pct])
        ]
    return TrialResult(
        evaluations=int(out_i[0]),
        reached_optimum=bool(out_i[2]),
        final_fitness=int(out_i[1]),
        mutation_steps=int(out_i[3]),
        usage=usage if cfg.usage_trace else None,
        tau_samples=samples,
        final_tau=float(out_f[0]),
        final_tau_exponent=float(out_f[1]),
        tau_exceed_iters=int(out_i[4]),
        phase_failures=int(out_i[5]),
        sigma_successes=int(out_i[6]),
    )


def _run_resolved(rc: ResolvedConfig, trial_index: int) -> TrialResult:
    cfg = rc.config
    if rc.engine == "reference":
        mech = make_mechanism(
            cfg.mechanism,
            tau=rc.tau_value if cfg.mechanism == "grg" else None,
            sigma=rc.sigma if cfg.mechanism == "arg" else None,
            F=cfg.F,
            tau0=cfg.tau0,
        )
        raw = run_trial_reference(
            cfg.n,
            Portfolio(rc.sizes),
            mech,
            cfg.master_seed % (1 << 64),
            trial_index,
            rc.budget,
            buckets=cfg.buckets,
            track_usage=cfg.usage_trace,
            track_tau=cfg.tau_trace,
            track_envelope=rc.track_envelope,
        )
        samples = None
        if cfg.tau_trace:
            curve = raw["tau_curve"]
            samples = [
                (pct, curve[pct] / cfg.n)
                for pct in range(101)
                if not math.isnan(curve[pct])
            ]
        return TrialResult(
            evaluations=raw["evaluations"],
            reached_optimum=raw["reached_optimum"],
            final_fitness=raw["final_fitness"],
            mutation_steps=raw["steps"],
            usage=raw["usage"],
            tau_samples=samples,
            final_tau=raw["final_tau"],
            final_tau_exponent=raw["final_e"],
            tau_exceed_iters=raw["tau_exceed_iters"],
            phase_failures=raw["phase_failures"],
            sigma_successes=raw["sigma_successes"],
        )

    kernel = _engine.run_trial_iter if rc.engine == "iter" else _engine.run_trial_jump
    k = len(rc.sizes)
    ops = np.asarray(rc.sizes, dtype=np.int64)
    usage = np.zeros(
        (cfg.buckets, k) if cfg.usage_trace else (1, 1), dtype=np.int64
    )
    curve = np.full(101, np.nan)
    out_i = np.zeros(_engine.OUT_I_SLOTS, dtype=np.int64)
    out_f = np.zeros(_engine.OUT_F_SLOTS, dtype=np.float64)
    kernel(
        np.int64(cfg.n),
        ops,
        np.int64(rc.mech_id),
        float(rc.tau_value),
        float(rc.sigma),
        float(cfg.F),
        float(cfg.tau0),
        np.uint64(cfg.master_seed % (1 << 64)),
        np.uint64(trial_index),
        np.int64(rc.budget),
        np.int64(cfg.buckets),
        bool(cfg.usage_trace),
        bool(cfg.tau_trace),
        bool(rc.track_envelope),
        usage,
        curve,
        out_i,
        out_f,
    )
    return _result_from_kernel(rc, usage, curve, out_i, out_f)


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialResult:
    """Run the single trial derived from (master_seed, trial_index)."""
    if not 0 <= trial_index:
        raise ConfigError("trial_index must be non-negative")
    return _run_resolved(resolve(config), trial_index)


def run_batch(config: ExperimentConfig):
    """Run config.trials seeded trials; return (BatchSummary, [TrialResult]).

    Trials may run concurrently but are aggregated in trial-index order, so
    the summary is identical for any thread count.
    """
    rc = resolve(config)
    indices = range(config.trials)
    if config.threads > 1 and rc.engine != "reference":
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(lambda i: _run_resolved(rc, i), indices))
    else:
        results = [_run_resolved(rc, i) for i in indices]
    return summarize(config, results), results


def summarize(config: ExperimentConfig, results) -> BatchSummary:
    """Aggregate an index-ordered list of TrialResults."""
    if not results:
        raise ConfigError("cannot summarize an empty batch")
    evals = np.array([r.evaluations for r in results], dtype=np.float64)
    mean = float(evals.mean())
    std = float(evals.std(ddof=1)) if len(results) > 1 else 0.0
    summary = BatchSummary(
        config=config,
        mean_evaluations=mean,
        std_evaluations=std,
        min_evaluations=int(evals.min()),
        max_evaluations=int(evals.max()),
        mean_over_n2=mean / (config.n * config.n),
        reached_fraction=float(
            np.mean([1.0 if r.reached_optimum else 0.0 for r in results])
        ),
    )
    if config.usage_trace and results[0].usage is not None:
        total = np.zeros_like(results[0].usage)
        for r in results:
            total += r.usage
        row_sums = total.sum(axis=1, keepdims=True)
        share = np.full(total.shape, np.nan)
        np.divide(total, row_sums, out=share, where=row_sums > 0)
        summary.usage_total = total
        summary.usage_share = share
    if config.tau_trace:
        curves = np.full((len(results), 101), np.nan)
        for ti, r in enumerate(results):
            if r.tau_samples:
                for pct, tau_over_n in r.tau_samples:
                    curves[ti, pct] = tau_over_n
        have = ~np.isnan(curves)
        counts = have.sum(axis=0)
        sums = np.where(have, curves, 0.0).sum(axis=0)
        mean_curve = np.full(101, np.nan)
        np.divide(sums, counts, out=mean_curve, where=counts > 0)
        summary.tau_curve_mean = mean_curve
        summary.tau_curve_runs = curves[: min(5, len(results))]
    if config.mechanism == "arg":
        steps = sum(r.mutation_steps for r in results)
        exceed = sum(r.tau_exceed_iters for r in results)
        summary.exceed_fraction = exceed / steps if steps else math.nan
    return summary


def sweep(labeled_configs):
    """Run a grid of (label, config) batches; fig-1 layout.

    Rows are the distinct problem sizes in ascending order, columns the
    distinct labels in first-seen order; every (n, label) cell must be
    covered exactly once.  Returns (labels, n_values, matrix of mean/n²).
    """
    labeled_configs = list(labeled_configs)
    if not labeled_configs:
        raise ConfigError("sweep needs at least one config")
    sizes0 = None
    labels = []
    n_values = sorted({cfg.n for _, cfg in labeled_configs})
    for label, cfg in labeled_configs:
        if label not in labels:
            labels.append(label)
        pf = tuple(cfg.portfolio) if cfg.portfolio else tuple(range(1, cfg.k + 1))
        if sizes0 is None:
            sizes0 = pf
        elif pf != sizes0:
            raise ConfigError("sweep configs must share the operator portfolio")
    seen = {}
    for label, cfg in labeled_configs:
        key = (cfg.n, label)
        if key in seen:
            raise ConfigError(f"duplicate sweep cell for n={cfg.n}, variant {label!r}")
        seen[key] = cfg
    missing = [
        (n, lab) for n in n_values for lab in labels if (n, lab) not in seen
    ]
    if missing:
        raise ConfigError(f"sweep grid is incomplete; first hole: {missing[0]}")
    values = np.full((len(n_values), len(labels)), np.nan)
    for (n, label), cfg in sorted(
        seen.items(), key=lambda item: (item[0][0], labels.index(item[0][1]))
    ):
        summary, _ = run_batch(cfg)
        values[n_values.index(n), labels.index(label)] = summary.mean_over_n2
    return labels, n_values, values


def variant_config(base: ExperimentConfig, token: str) -> ExperimentConfig:
    """Config for a sweep variant token: 'arg:<schedule>' or 'grg:<tau>'."""
    name, _, arg = token.partition(":")
    if name == "arg":
        if not arg:
            raise ConfigError(f"variant {token!r} needs a sigma schedule")
        if arg.startswith("const="):
            return replace(
                base,
                mechanism="arg",
                sigma_schedule="const",
                sigma_const=float(arg[6:]),
                tau=None,
            )
        return replace(
            base, mechanism="arg", sigma_schedule=arg, sigma_const=None, tau=None
        )
    if name == "grg":
        if not arg:
            raise ConfigError(f"variant {token!r} needs a tau expression")
        return replace(
            base, mechanism="grg", tau=arg, sigma_schedule="const", sigma_const=None
        )
    if name in MECHANISM_NAMES:
        if arg:
            raise ConfigError(f"variant {token!r} takes no parameter")
        return replace(
            base, mechanism=name, tau=None, sigma_schedule="const", sigma_const=None
        )
    raise ConfigError(f"unknown variant {token!r}")
