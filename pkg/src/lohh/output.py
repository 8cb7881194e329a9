"""Delimited output: the three TSV layouts and the run-metadata sidecar.

All files are plain UTF-8 with tab separators, one header line, and
newline="\n" regardless of platform so reruns are byte-comparable.  The
metadata sidecar is key=value text; `config_from_metadata` turns one back
into an ExperimentConfig that reproduces the same TSVs.
"""

import math
import subprocess
from importlib import metadata as _importlib_metadata
from pathlib import Path

from .harness import BatchSummary, ExperimentConfig, ResolvedConfig

_META_NONE = "none"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def variant_label(config: ExperimentConfig) -> str:
    """Column label for a config: mechanism plus its defining parameter."""
    if config.mechanism == "arg":
        if config.sigma_schedule == "const":
            return f"arg:const={_fmt(float(config.sigma_const))}"
        return f"arg:{config.sigma_schedule}"
    if config.mechanism == "grg":
        return f"grg:{config.tau}"
    return config.mechanism


def _write_rows(path, header, rows):
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(cell) for cell in row) + "\n")
    return path


def write_fig1(path, labels, n_values, values):
    """Runtime sweep: one row per n, one mean/n² column per variant."""
    rows = [
        [n] + [float(values[i][j]) for j in range(len(labels))]
        for i, n in enumerate(n_values)
    ]
    return _write_rows(path, ["n"] + list(labels), rows)


def write_fig2(path, summary: BatchSummary):
    """Tau trajectory: average and up to five individual runs, by percent."""
    if summary.tau_curve_mean is None:
        raise ValueError("summary has no tau trace; run with tau_trace=True")
    runs = summary.tau_curve_runs
    header = ["pct_lo", "avg_tau_over_n"] + [f"run{i + 1}" for i in range(len(runs))]
    rows = []
    for pct in range(101):
        avg = summary.tau_curve_mean[pct]
        if math.isnan(avg):
            continue
        rows.append([pct, float(avg)] + [float(r[pct]) for r in runs])
    return _write_rows(path, header, rows)


def write_fig3(path, summary: BatchSummary, sizes):
    """Operator usage: percentage of iterations per fitness bucket."""
    if summary.usage_share is None:
        raise ValueError("summary has no usage trace; run with usage_trace=True")
    buckets = summary.usage_share.shape[0]
    header = ["pct_lo"] + [f"rls{m}_pct" for m in sizes]
    rows = []
    for b in range(buckets):
        if math.isnan(summary.usage_share[b][0]):
            continue  # bucket never visited
        pct_lo = 100 * b / buckets
        pct_cell = int(pct_lo) if float(pct_lo).is_integer() else float(pct_lo)
        rows.append(
            [pct_cell] + [float(100.0 * summary.usage_share[b][j]) for j in range(len(sizes))]
        )
    return _write_rows(path, header, rows)


def write_theory(path, rows):
    """Best-possible runtime table rows: (n, k, E_opt, E_opt/n², constant)."""
    return _write_rows(
        path,
        ["n", "k", "E_opt", "E_opt_over_n2", "leading_constant"],
        [[n, k, float(e), float(e_n2), float(c)] for n, k, e, e_n2, c in rows],
    )


def write_tau_max(path, percents, tau_max_over_n):
    """Envelope curve for overlaying on a tau trajectory plot."""
    return _write_rows(
        path,
        ["pct_lo", "tau_max_over_n"],
        [[p, float(v)] for p, v in zip(percents, tau_max_over_n)],
    )


def _package_version():
    try:
        return _importlib_metadata.version("lohh")
    except Exception:
        return "unknown"


def _git_describe():
    try:
        proc = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=10,
        )
        if proc.returncode == 0 and proc.stdout.strip():
            return proc.stdout.strip()
    except Exception:
        pass
    return "unknown"


def write_metadata(path, resolved: ResolvedConfig):
    """Sidecar with the full config plus resolved schedule values."""
    cfg = resolved.config
    pairs = [
        ("tool", "lohh"),
        ("version", _package_version()),
        ("git", _git_describe()),
        ("n", cfg.n),
        ("mechanism", cfg.mechanism),
        ("portfolio", ",".join(str(m) for m in resolved.sizes)),
        ("sigma_schedule", cfg.sigma_schedule),
        ("sigma_const", _META_NONE if cfg.sigma_const is None else float(cfg.sigma_const)),
        ("sigma_resolved", resolved.sigma if cfg.mechanism == "arg" else _META_NONE),
        ("cstar", _META_NONE if resolved.cstar is None else resolved.cstar),
        ("tau", _META_NONE if cfg.tau is None else cfg.tau),
        (
            "tau_resolved",
            resolved.tau_value if cfg.mechanism == "grg" else _META_NONE,
        ),
        ("F", float(cfg.F)),
        ("tau0", float(cfg.tau0)),
        ("trials", cfg.trials),
        ("master_seed", cfg.master_seed),
        ("buckets", cfg.buckets),
        ("usage_trace", cfg.usage_trace),
        ("tau_trace", cfg.tau_trace),
        ("eval_budget", resolved.budget),
        ("threads", cfg.threads),
        ("engine", cfg.engine),
        ("engine_resolved", resolved.engine),
    ]
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in pairs:
            fh.write(f"{key}={_fmt(value)}\n")
    return path


def read_metadata(path) -> dict:
    """Parse a key=value sidecar back into a dict of strings."""
    meta = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed metadata line: {line!r}")
            meta[key.strip()] = value.strip()
    return meta


def _opt(meta, key, convert):
    raw = meta.get(key, _META_NONE)
    if raw == _META_NONE:
        return None
    return convert(raw)


def config_from_metadata(meta: dict) -> ExperimentConfig:
    """Rebuild the ExperimentConfig a sidecar describes.

    Only configuration keys are read; informational keys (resolved sigma,
    c*, git) are ignored, so a round trip reproduces identical TSVs.
    """
    try:
        portfolio = tuple(
            int(tok) for tok in meta["portfolio"].split(",") if tok
        )
        return ExperimentConfig(
            n=int(meta["n"]),
            mechanism=meta["mechanism"],
            portfolio=portfolio,
            sigma_schedule=meta.get("sigma_schedule", "const"),
            sigma_const=_opt(meta, "sigma_const", float),
            tau=_opt(meta, "tau", str),
            F=float(meta.get("F", 1.5)),
            tau0=float(meta.get("tau0", 1.0)),
            trials=int(meta["trials"]),
            master_seed=int(meta["master_seed"]),
            buckets=int(meta.get("buckets", 100)),
            usage_trace=meta.get("usage_trace", "false") == "true",
            tau_trace=meta.get("tau_trace", "false") == "true",
            eval_budget=_opt(meta, "eval_budget", int),
            threads=int(meta.get("threads", 1)),
            engine=meta.get("engine", "auto"),
        )
    except KeyError as err:
        raise ValueError(f"metadata is missing required key {err}") from None
