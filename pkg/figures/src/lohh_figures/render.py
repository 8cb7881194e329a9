"""Builds the three chart kinds from parsed tables.

build_figure is a pure function of the TSV contents, so the same inputs
always produce the same drawing. render saves it as a PNG with fixed
metadata, which keeps the output bytes stable across repeated calls.
"""

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from matplotlib.figure import Figure

from .io import AlignmentError, load_table, theory_constants

KINDS = ("runtime-sweep", "tau-trace", "usage")

_RUN_COL = re.compile(r"run\d+$")
_USAGE_COL = re.compile(r"rls\d+_pct$")


@dataclass
class FigureSpec:
    kind: str
    input: Path
    out: Path
    theory: Path | None = None
    envelope: Path | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(
                f"unknown figure kind {self.kind!r}, expected one of {', '.join(KINDS)}"
            )
        if self.kind == "runtime-sweep" and self.theory is None:
            raise ValueError("runtime-sweep needs a theory table for reference lines")
        if self.kind == "tau-trace" and self.envelope is None:
            raise ValueError("tau-trace needs an envelope table")


def _new_axes():
    fig = Figure(figsize=(6.4, 4.2))
    return fig, fig.subplots()


def _runtime_sweep(spec):
    table = load_table(spec.input)
    n = table.column("n")
    variants = table.matching(lambda name: name != "n")
    if not variants:
        raise AlignmentError(f"{table.path.name}: only an n column, nothing to plot")

    fig, ax = _new_axes()
    for name in variants:
        ax.plot(n, table.column(name), marker="o", markersize=3, label=name)

    constants = theory_constants(load_table(spec.theory))
    if 1 not in constants:
        raise AlignmentError(f"{Path(spec.theory).name}: no k=1 row for the rls1 line")
    best_k = max(constants)
    ax.axhline(constants[1], color="0.4", linestyle="--", linewidth=1,
               label=f"rls1 limit ({constants[1]:g})")
    ax.axhline(constants[best_k], color="0.4", linestyle=":", linewidth=1,
               label=f"k={best_k} limit ({constants[best_k]:g})")

    ax.set_xscale("log")
    ax.set_xlabel("problem size n")
    ax.set_ylabel("mean evaluations / n^2")
    ax.legend(fontsize=8)
    return fig


def _tau_trace(spec):
    table = load_table(spec.input)
    pct = table.column("pct_lo")
    avg = table.column("avg_tau_over_n")
    runs = table.matching(_RUN_COL.fullmatch)
    if not runs:
        raise AlignmentError(f"{table.path.name}: no run columns")

    env = load_table(spec.envelope)
    env_pct = env.column("pct_lo")
    env_tau = env.column("tau_max_over_n")
    if not np.array_equal(pct, env_pct):
        raise AlignmentError(
            f"{Path(spec.envelope).name}: percent grid does not match "
            f"{table.path.name} ({len(env_pct)} vs {len(pct)} rows)"
        )

    fig, ax = _new_axes()
    for name in runs:
        ax.plot(pct, table.column(name), color="0.6", linewidth=0.7,
                label="_" + name)
    ax.plot(pct, avg, color="black", linestyle=":", linewidth=1.8,
            label=f"average of {len(runs)} runs")
    ax.plot(pct, env_tau, color="tab:red", linestyle="--", linewidth=1.2,
            label="tau_max / n")

    ax.set_xlabel("fitness (% of n)")
    ax.set_ylabel("tau / n")
    ax.legend(fontsize=8)
    return fig


def _usage(spec):
    table = load_table(spec.input)
    pct = table.column("pct_lo")
    operators = table.matching(_USAGE_COL.fullmatch)
    if not operators:
        raise AlignmentError(f"{table.path.name}: no rls*_pct columns")

    fig, ax = _new_axes()
    for name in operators:
        ax.plot(pct, table.column(name), label=name[: -len("_pct")])

    ax.set_xlabel("fitness (% of n)")
    ax.set_ylabel("% of iterations")
    ax.set_ylim(0, 100)
    ax.legend(fontsize=8)
    return fig


_BUILDERS = {
    "runtime-sweep": _runtime_sweep,
    "tau-trace": _tau_trace,
    "usage": _usage,
}


def build_figure(spec: FigureSpec) -> Figure:
    return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec):
    """Draw the figure and write it to spec.out as a PNG."""
    fig = build_figure(spec)
    fig.savefig(spec.out, format="png", dpi=150,
                metadata={"Software": "lohh-figures"})
    return Path(spec.out)
