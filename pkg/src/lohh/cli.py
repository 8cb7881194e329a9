"""Command line front end.

Sub-commands map to the experiment families: `run` (one batch), `sweep`
(runtime vs n grid), `trace-tau` (learning-period trajectory), `usage`
(operator usage by fitness bucket), `theory` (best-possible runtime table).
Exit codes: 0 success, 1 runtime/I-O error, 2 usage error.
"""

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (
    ConfigError,
    ExperimentConfig,
    resolve,
    run_batch,
    sweep,
    variant_config,
)
from .mechanisms import MECHANISM_NAMES
from .output import (
    config_from_metadata,
    read_metadata,
    variant_label,
    write_fig1,
    write_fig2,
    write_fig3,
    write_metadata,
    write_tau_max,
    write_theory,
)
from .schedules import SIGMA_SCHEDULES, resolve_sigma
from .theory import tau_max_percent_table, theory_table

OUT_DIR_ENV = "LOHH_OUT_DIR"

# the runtime-sweep variants plotted against n, in legend order
DEFAULT_SWEEP_VARIANTS = (
    "arg:sqrt_n_over_ln_n",
    "arg:cstar_ln4_n",
    "arg:cstar_sqrt_n_over_ln_n",
    "arg:cstar_sqrt_n_over_ln_n_half",
    "arg:cstar_sqrt_n",
    "grg:0.4nlnn",
    "grg:0.5nlnn",
    "grg:0.6nlnn",
)


def _int_list(text):
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        values.append(int(float(tok)) if ("e" in tok or "." in tok) else int(tok))
    if not values:
        raise argparse.ArgumentTypeError("expected a comma-separated integer list")
    return values


def _add_common(p, trials_default=100, need_n=True):
    p.add_argument("--n", type=int, required=need_n, default=None,
                   help="problem size")
    p.add_argument("--k", type=int, default=2, help="portfolio RLS_1..RLS_k")
    p.add_argument("--ops", type=_int_list, default=None,
                   help="explicit operator sizes, e.g. 1,3 (overrides --k)")
    p.add_argument("--sigma", dest="sigma_schedule", default=None,
                   choices=SIGMA_SCHEDULES, help="ARG sigma schedule")
    p.add_argument("--sigma-const", type=float, default=None,
                   help="sigma value for the const schedule")
    p.add_argument("--F", type=float, default=1.5, help="ARG update factor")
    p.add_argument("--tau0", type=float, default=1.0, help="ARG initial period")
    p.add_argument("--trials", type=int, default=trials_default)
    p.add_argument("--seed", type=int, default=2026, help="64-bit master seed")
    p.add_argument("--buckets", type=int, default=100)
    p.add_argument("--budget", type=int, default=None,
                   help="evaluation cap per trial (default 20*n*n)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--engine", default="auto",
                   choices=("auto", "iter", "jump", "reference"))
    p.add_argument("--out-dir", default=None,
                   help=f"output directory (default ${OUT_DIR_ENV} or '.')")
    p.add_argument("--prefix", default=None, help="output file name prefix")


def _out_dir(args):
    out = args.out_dir or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config_from_args(args, mechanism, usage_trace=False, tau_trace=False):
    return ExperimentConfig(
        n=args.n,
        mechanism=mechanism,
        k=args.k,
        portfolio=tuple(args.ops) if args.ops else (),
        sigma_schedule=args.sigma_schedule or "const",
        sigma_const=args.sigma_const,
        tau=args.tau if hasattr(args, "tau") else None,
        F=args.F,
        tau0=args.tau0,
        trials=args.trials,
        master_seed=args.seed,
        buckets=args.buckets,
        usage_trace=usage_trace,
        tau_trace=tau_trace,
        eval_budget=args.budget,
        threads=args.threads,
        engine=args.engine,
    )


def _safe_name(label):
    return (
        label.replace(":", "_").replace("=", "_").replace("*", "").replace(".", "p")
    )


def _cmd_run(args):
    if args.from_meta:
        config = config_from_metadata(read_metadata(args.from_meta))
        config = replace(config, threads=args.threads)
    else:
        if args.n is None:
            raise ConfigError("--n is required unless --from-meta is given")
        config = _config_from_args(
            args,
            args.mech,
            usage_trace=args.trace_usage,
            tau_trace=args.trace_tau,
        )
    rc = resolve(config)
    label = variant_label(config)
    summary, _ = run_batch(config)
    out = _out_dir(args)
    prefix = args.prefix or _safe_name(label)
    written = [
        write_fig1(
            out / f"{prefix}_runtime.tsv",
            [label],
            [config.n],
            [[summary.mean_over_n2]],
        )
    ]
    if config.tau_trace:
        written.append(write_fig2(out / f"{prefix}_tau.tsv", summary))
    if config.usage_trace:
        written.append(write_fig3(out / f"{prefix}_usage.tsv", summary, rc.sizes))
    written.append(write_metadata(out / f"{prefix}_meta.txt", rc))
    print(
        f"{label} n={config.n} trials={config.trials} "
        f"mean/n2={summary.mean_over_n2:.6f} reached={summary.reached_fraction:.3f}"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_sweep(args):
    if args.n is None:
        args.n = args.n_values[0]
    base = _config_from_args(args, "arg")
    labeled = []
    for n in args.n_values:
        for token in args.variants:
            labeled.append((token, replace(variant_config(base, token), n=n)))
    labels, n_values, values = sweep(labeled)
    out = _out_dir(args)
    prefix = args.prefix or "sweep"
    path = write_fig1(out / f"{prefix}_runtime.tsv", labels, n_values, values)
    print(f"wrote {path}")
    return 0


def _cmd_trace_tau(args):
    config = _config_from_args(args, "arg", tau_trace=True)
    rc = resolve(config)
    summary, _ = run_batch(config)
    out = _out_dir(args)
    prefix = args.prefix or "tau"
    written = [
        write_fig2(out / f"{prefix}_tau.tsv", summary),
        write_metadata(out / f"{prefix}_meta.txt", rc),
    ]
    print(
        f"{variant_label(config)} n={config.n} trials={config.trials} "
        f"mean/n2={summary.mean_over_n2:.6f}"
    )
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_usage(args):
    config = _config_from_args(args, "arg", usage_trace=True)
    rc = resolve(config)
    summary, _ = run_batch(config)
    out = _out_dir(args)
    prefix = args.prefix or "usage"
    written = [
        write_fig3(out / f"{prefix}_usage.tsv", summary, rc.sizes),
        write_metadata(out / f"{prefix}_meta.txt", rc),
    ]
    if config.mechanism == "arg":
        print(
            f"{variant_label(config)} n={config.n} trials={config.trials} "
            f"tau_exceed_fraction={summary.exceed_fraction:.6f}"
        )
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_theory(args):
    out = _out_dir(args)
    rows = theory_table(args.n_values, args.k_values)
    path = args.out or (out / "theory.tsv")
    written = [write_theory(path, rows)]
    if args.tau_max_out:
        n = args.n_values[0]
        k = args.k_values[0]
        sigma = resolve_sigma(args.sigma_schedule or "sqrt_n_over_ln_n", n,
                              args.sigma_const)
        values = tau_max_percent_table(n, k, sigma)
        written.append(
            write_tau_max(args.tau_max_out, range(101), [v / n for v in values])
        )
    for p in written:
        print(f"wrote {p}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lohh",
        description="Selection hyper-heuristics on LeadingOnes: experiments "
        "and exact runtime tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment batch")
    _add_common(p_run, need_n=False)
    p_run.add_argument("--mech", default="arg", choices=MECHANISM_NAMES)
    p_run.add_argument("--tau", default=None,
                       help="GRG learning period: number, c*nlnn, or inf")
    p_run.add_argument("--trace-tau", action="store_true", dest="trace_tau")
    p_run.add_argument("--trace-usage", action="store_true", dest="trace_usage")
    p_run.add_argument("--from-meta", default=None,
                       help="rebuild the config from a metadata sidecar")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="runtime vs n for several variants")
    _add_common(p_sweep, need_n=False)
    p_sweep.add_argument("--n-values", type=_int_list, required=True)
    p_sweep.add_argument(
        "--variants",
        type=lambda s: [tok.strip() for tok in s.split(",") if tok.strip()],
        default=list(DEFAULT_SWEEP_VARIANTS),
        help="comma list of arg:<schedule> / grg:<tau> / mechanism tokens",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_tau = sub.add_parser("trace-tau", help="ARG tau trajectory TSV")
    _add_common(p_tau)
    p_tau.set_defaults(func=_cmd_trace_tau)

    p_usage = sub.add_parser("usage", help="ARG operator usage TSV")
    _add_common(p_usage, trials_default=20)
    p_usage.set_defaults(func=_cmd_usage)

    p_th = sub.add_parser("theory", help="best-possible runtime table")
    p_th.add_argument("--n-values", type=_int_list, required=True)
    p_th.add_argument("--k-values", type=_int_list, required=True)
    p_th.add_argument("--out", default=None, help="table path (default theory.tsv)")
    p_th.add_argument("--tau-max-out", default=None,
                      help="also write the tau_max envelope for the first n, k")
    p_th.add_argument("--sigma", dest="sigma_schedule", default=None,
                      choices=SIGMA_SCHEDULES)
    p_th.add_argument("--sigma-const", type=float, default=None)
    p_th.add_argument("--out-dir", default=None)
    p_th.set_defaults(func=_cmd_theory)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", None) is not None and getattr(args, "k", None) is not None:
        if args.k > args.n and not getattr(args, "ops", None):
            parser.error("--k exceeds --n")
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        target = getattr(err, "filename", None)
        where = f" ({target})" if target else ""
        print(f"error: {err}{where}", file=sys.stderr)
        return 1
    except Exception as err:  # keep tracebacks out of normal operation
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
