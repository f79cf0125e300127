"""CSV and SVG writers for traces, sweeps and complexity estimates.

Every file starts with ``# key: value`` comment lines recording the full
parameter set, so a run can be reproduced from its output.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Mapping, TextIO

import numpy as np

from .complexity import CSV_COLUMNS as COMPLEXITY_COLUMNS, ComplexityEstimate
from .optimizer import METRICS, SweepResult
from .spread import SimulationTrace

TRACE_COLUMNS = ("time", "n_t", "lambda_v", "lambda_e", "lambda_s")
SWEEP_COLUMNS = (
    "rho",
    "exp_lambda_v",
    "exp_lambda_e",
    "exp_lambda_s",
    "is_local_opt_v",
    "is_local_opt_e",
    "is_local_opt_s",
    "is_global_opt_v",
    "is_global_opt_e",
    "is_global_opt_s",
    "tail_bound_v",
    "tail_bound_e",
    "horizon",
    "exp_lambda_s_replica_mean",
)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_header(out: TextIO, meta: Mapping) -> None:
    for key, value in meta.items():
        out.write(f"# {key}: {value}\n")


def read_header(path) -> dict:
    """Parse the ``# key: value`` lines at the top of an output file."""
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
    return meta


def write_trace_csv(trace: SimulationTrace, out: TextIO, meta: Mapping = {}) -> None:
    write_header(out, meta)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for row in zip(trace.times, trace.n_t, trace.lambda_v, trace.lambda_e, trace.lambda_s):
        w.writerow([_fmt(x) for x in row])


def write_sweep_csv(result: SweepResult, out: TextIO, meta: Mapping = {}) -> None:
    write_header(out, meta)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    n = len(result.rho_grid)
    flags = {}
    for k in METRICS:
        local = np.zeros(n, dtype=bool)
        glob = np.zeros(n, dtype=bool)
        for o in result.optima[k]:
            (glob if o.kind == "global" else local)[o.index] = True
        flags[k] = (local, glob)
    for i in range(n):
        w.writerow(
            [
                _fmt(result.rho_grid[i]),
                _fmt(result.expected_lambda_v[i]),
                _fmt(result.expected_lambda_e[i]),
                _fmt(result.expected_lambda_s[i]),
                *(_fmt(flags[k][0][i]) for k in METRICS),
                *(_fmt(flags[k][1][i]) for k in METRICS),
                _fmt(result.tail_v[i]),
                _fmt(result.tail_e[i]),
                _fmt(result.horizons[i]),
                _fmt(result.expected_lambda_s_replica_mean[i]),
            ]
        )


def write_complexity_csv(est: ComplexityEstimate, out: TextIO, meta: Mapping = {}) -> None:
    write_header(out, meta)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(COMPLEXITY_COLUMNS)
    w.writerow(est.csv_row())


# ---------------------------------------------------------------------------
# SVG


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed ids and no timestamp keep the SVG byte-identical across runs
    matplotlib.rcParams["svg.hashsalt"] = "infocapture"
    matplotlib.rcParams["svg.fonttype"] = "none"
    return plt


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def plot_trace_svg(trace: SimulationTrace, path: Path, title: str = "") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(trace.times, trace.lambda_v, label="Lambda_V")
    ax.plot(trace.times, trace.lambda_e, label="Lambda_E")
    ax.plot(trace.times, trace.lambda_s, label="Lambda_S")
    ax.set_xlabel("time")
    ax.set_ylabel("fraction captured")
    ax.set_ylim(-0.02, 1.02)
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)


def plot_sweep_svg(result: SweepResult, path: Path, title: str = "") -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4))
    for k, label in (("v", "E[Lambda_V]"), ("e", "E[Lambda_E]")):
        vals = result.values(k)
        (line,) = ax.plot(result.rho_grid, vals, marker=".", label=label)
        g = result.global_optimum(k)
        ax.plot([g.rho], [g.value], "o", color=line.get_color(), markersize=8, fillstyle="none")
        for o in result.local_optima(k):
            ax.plot([o.rho], [o.value], "^", color=line.get_color(), markersize=7, fillstyle="none")
    ax.set_xscale("log")
    ax.set_xlabel("infection rate rho")
    ax.set_ylabel("expected information captured")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
