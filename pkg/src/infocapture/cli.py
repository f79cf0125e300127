"""Command-line interface: ``infocapture {generate,complexity,simulate,sweep}``.

Exit codes: 0 success, 1 invalid input, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .complexity import COMPRESSORS, ENCODINGS, estimate_kolmogorov
from .detection import DetectionParams
from .export import (
    plot_sweep_svg,
    plot_trace_svg,
    write_complexity_csv,
    write_sweep_csv,
    write_trace_csv,
)
from .graph import (
    generate_cohort_network,
    generate_random_network,
    generate_scale_free,
    read_edge_list,
    write_edge_list,
    write_mapping,
)
from .learning import LearningParams
from .optimizer import DEFAULT_MAX_HORIZON, sweep_rho
from .spread import mean_field, run_monte_carlo

log = logging.getLogger("infocapture")

ENGINE_NAMES = {"mc": "monte_carlo", "mf": "mean_field"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _rho_grid(text: str) -> list:
    """``0.01,0.1,0.5`` or ``log:LO:HI:N`` (log-spaced)."""
    try:
        if text.startswith("log:"):
            lo, hi, n = text[4:].split(":")
            return np.geomspace(float(lo), float(hi), int(n)).tolist()
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad rho grid {text!r}") from None


def _add_graph_args(p):
    p.add_argument("--graph", required=True, type=Path, help="edge-list file")
    p.add_argument("--remap", action="store_true",
                   help="treat vertex ids as arbitrary labels and write mapping.csv")


def _add_model_args(p):
    p.add_argument("--alpha", type=float, default=100.0, help="edge learning efficiency")
    p.add_argument("--beta", type=float, default=100.0, help="vertex learning efficiency")
    p.add_argument("--rate", type=float, default=1.0, help="global learning rate r")
    p.add_argument("--weighted-rates", action="store_true",
                   help="edge rates proportional to the edge-list weight column")
    p.add_argument("--sigma", type=float, default=1.0, help="detection normalizer")
    p.add_argument("--m", type=float, default=1.0, help="detection initial-state offset M")
    p.add_argument("--seeds", type=int, default=1, help="number of random seed vertices")
    p.add_argument("--seed-vertices", type=_int_list, default=None,
                   help="fixed comma-separated seed vertices (overrides --seeds)")
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--engine", choices=sorted(ENGINE_NAMES), default="mf")
    p.add_argument("--dt", type=float, default=1.0, help="model time per step")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for all randomness")
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.add_argument("--svg", action="store_true", help="also write an SVG plot")
    p.add_argument("--compressor", choices=sorted(COMPRESSORS), default="zlib")
    p.add_argument("--mf-normalization", choices=("degree_sum", "vertex_count"), default="degree_sum")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infocapture", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic network as an edge list")
    g.add_argument("--kind", choices=("cohort", "random", "scale_free"), required=True)
    g.add_argument("--n", type=int, required=True, help="vertex count")
    g.add_argument("--labels", type=_int_list, help="cohort label per vertex (cohort)")
    g.add_argument("--cohorts", type=int, help="number of equal-size consecutive cohorts (cohort)")
    g.add_argument("--p", type=float, help="edge probability (random)")
    g.add_argument("--attach", type=int, help="edges per arriving vertex (scale_free)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True, help="output edge-list file")

    c = sub.add_parser("complexity", help="estimate K_E and the learnability verdict")
    _add_graph_args(c)
    c.add_argument("--compressor", choices=sorted(COMPRESSORS), default="zlib")
    c.add_argument("--encoding", choices=ENCODINGS, default="gap")
    c.add_argument("--out", type=Path, help="also write the CSV row to this file")

    s = sub.add_parser("simulate", help="run one infection simulation and export the trace")
    _add_graph_args(s)
    _add_model_args(s)
    s.add_argument("--rho", type=float, required=True, help="infection rate")
    s.add_argument("--horizon", type=int, default=100, help="steps to simulate")
    s.add_argument("--per-replica", action="store_true", help="also write one CSV per replica (mc)")
    s.add_argument("--truncate-on-detection", action="store_true",
                   help="experimental (mc): stop each replica at a sampled detection time")

    w = sub.add_parser("sweep", help="expected captured information across rho")
    _add_graph_args(w)
    _add_model_args(w)
    w.add_argument("--rho-grid", type=_rho_grid, default=None,
                   help="comma list or log:LO:HI:N (default: 50 log points in [0.005, 1] + refinement)")
    w.add_argument("--horizon", type=int, default=None,
                   help="fixed steps per run (default: extend until detection saturates)")
    w.add_argument("--max-horizon", type=int, default=DEFAULT_MAX_HORIZON)
    w.add_argument("--no-detection", action="store_true", help="weight all information by 1")
    return parser


# ---------------------------------------------------------------------------


def _meta(argv: Sequence[str], args) -> dict:
    meta = {"infocapture": __version__, "invocation": "infocapture " + shlex.join(argv)}
    for key, value in sorted(vars(args).items()):
        if key in ("verbose",):
            continue
        if isinstance(value, list) and len(value) > 8:
            value = ",".join(repr(v) for v in value)
        meta[key] = value
    return meta


def _load(args):
    graph = read_edge_list(args.graph, remap=args.remap)
    return graph


def _learning(args, graph) -> LearningParams:
    if args.weighted_rates:
        return LearningParams.with_weighted_edges(graph, args.alpha, args.beta, args.rate)
    return LearningParams(args.alpha, args.beta, args.rate)


def _write_mapping(args, graph, outdir: Path):
    if args.remap:
        with open(outdir / "mapping.csv", "w", encoding="utf-8") as fh:
            write_mapping(graph, fh)


def cmd_generate(args, argv) -> int:
    if args.kind == "cohort":
        if args.labels is not None:
            labels = args.labels
        elif args.cohorts:
            labels = np.repeat(np.arange(args.cohorts), -(-args.n // args.cohorts))[: args.n].tolist()
        else:
            raise ValueError("cohort generator needs --labels or --cohorts")
        graph = generate_cohort_network(args.n, labels)
    elif args.kind == "random":
        if args.p is None:
            raise ValueError("random generator needs --p")
        graph = generate_random_network(args.n, args.p, seed=args.seed)
    else:
        if args.attach is None:
            raise ValueError("scale_free generator needs --attach")
        graph = generate_scale_free(args.n, args.attach, seed=args.seed)
    meta = _meta(argv, args)
    with open(args.out, "w", encoding="utf-8") as fh:
        write_edge_list(graph, fh, header=[f"{k}: {v}" for k, v in meta.items()])
    print(f"wrote {args.out}: n={graph.vertex_count} |E|={graph.edge_count}")
    return 0


def cmd_complexity(args, argv) -> int:
    graph = _load(args)
    est = estimate_kolmogorov(graph, compressor=args.compressor, encoding=args.encoding)
    write_complexity_csv(est, sys.stdout)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_complexity_csv(est, fh, _meta(argv, args))
    verdict = "easily learnable" if est.easily_learnable else "not easily learnable"
    print(
        f"# |E|={est.edge_count} K_E~{est.k_e_edges:.1f} edge-equivalents "
        f"({est.k_e_edges / est.edge_count:.3f} of |E|); "
        f"critical threshold {est.critical_threshold:.4f}; {verdict}"
    )
    return 0


def cmd_simulate(args, argv) -> int:
    graph = _load(args)
    learning = _learning(args, graph)
    k_e = estimate_kolmogorov(graph, compressor=args.compressor).k_e_edges if graph.edge_count else 0.0
    args.out.mkdir(parents=True, exist_ok=True)
    meta = _meta(argv, args)
    meta["k_e_edges"] = repr(k_e)
    engine = ENGINE_NAMES[args.engine]
    replicas = []
    if engine == "mean_field":
        if args.seed_vertices:
            seed_count = len(args.seed_vertices)
        else:
            seed_count = args.seeds
        trace = mean_field(graph, args.rho, learning, seed_count=seed_count, horizon=args.horizon,
                           dt=args.dt, k_e_edges=k_e, normalization=args.mf_normalization)
    else:
        detection = DetectionParams(args.rho, args.sigma, args.m) if args.truncate_on_detection else None
        res = run_monte_carlo(graph, learning, args.rho, seeds=args.seed_vertices, horizon=args.horizon,
                              replicas=args.replicas, rng_seed=args.seed, seed_count=args.seeds, dt=args.dt,
                              k_e_edges=k_e, keep_replicas=args.per_replica,
                              truncate_on_detection=detection)
        trace = res.aggregate
        replicas = res.replicas
    with open(args.out / "trace.csv", "w", encoding="utf-8") as fh:
        write_trace_csv(trace, fh, meta)
    for i, rep in enumerate(replicas):
        with open(args.out / f"replica_{i:04d}.csv", "w", encoding="utf-8") as fh:
            write_trace_csv(rep, fh, {**meta, "replica": i})
    _write_mapping(args, graph, args.out)
    if args.svg:
        plot_trace_svg(trace, args.out / "trace.svg", f"{engine}, rho={args.rho:g}")
    print(f"wrote {args.out / 'trace.csv'}: final N={trace.n_t[-1]:.2f} "
          f"Lambda_V={trace.lambda_v[-1]:.4f} Lambda_E={trace.lambda_e[-1]:.4f}")
    return 0


def cmd_sweep(args, argv) -> int:
    graph = _load(args)
    learning = _learning(args, graph)
    k_e = estimate_kolmogorov(graph, compressor=args.compressor).k_e_edges
    args.out.mkdir(parents=True, exist_ok=True)
    engine = ENGINE_NAMES[args.engine]
    seed_count = len(args.seed_vertices) if args.seed_vertices else args.seeds
    result = sweep_rho(
        graph, learning, args.sigma, args.m, args.rho_grid,
        engine=engine, detect=not args.no_detection, seed_count=seed_count, seeds=args.seed_vertices,
        horizon=args.horizon, replicas=args.replicas, rng_seed=args.seed, dt=args.dt,
        k_e_edges=k_e, max_horizon=args.max_horizon, normalization=args.mf_normalization,
    )
    meta = _meta(argv, args)
    meta["k_e_edges"] = repr(k_e)
    with open(args.out / "sweep.csv", "w", encoding="utf-8") as fh:
        write_sweep_csv(result, fh, meta)
    _write_mapping(args, graph, args.out)
    if args.svg:
        plot_sweep_svg(result, args.out / "sweep.svg", f"{engine}, sigma={args.sigma:g}, M={args.m:g}")
    for k, name in (("v", "Lambda_V"), ("e", "Lambda_E")):
        g = result.global_optimum(k)
        locs = ", ".join(f"{o.rho:.4g}" for o in result.local_optima(k)) or "none"
        print(f"E[{name}]: global optimum rho={g.rho:.4g} value={g.value:.6g}; local optima at {locs}")
    print(f"wrote {args.out / 'sweep.csv'} ({len(result.rho_grid)} grid points)")
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "complexity": cmd_complexity,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, argv)
    except OSError as exc:
        print(f"infocapture: I/O error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"infocapture: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
