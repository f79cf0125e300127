"""Infection dynamics: stochastic per-neighbour spreading (Monte Carlo) and
the deterministic mean-field recursion for the expected infected count.

Time is discrete. Infection onsets and trace indices are step numbers;
``dt`` converts steps to model time (Gompertz elapsed time and the
detection clock both use ``step * dt``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .complexity import estimate_kolmogorov, social_essence_series
from .errors import DomainError
from .graph import Graph
from .learning import LearningParams, grouped_onset_series, onset_series

log = logging.getLogger(__name__)

NORMALIZATIONS = ("degree_sum", "vertex_count")


@dataclass(frozen=True, eq=False)
class InfectionState:
    """Who is infected and since when.

    ``vertex_infection_time[u]`` is the onset step T_u, or ``inf`` for a
    susceptible vertex. There is no recovery.
    """

    graph: Graph
    vertex_infection_time: np.ndarray
    clock: int = 0

    @classmethod
    def seeded(cls, graph: Graph, seeds: Sequence[int], clock: int = 0) -> "InfectionState":
        seeds = np.asarray(list(seeds), dtype=np.int64)
        if len(seeds) == 0:
            raise DomainError("seed set must be non-empty")
        if seeds.min() < 0 or seeds.max() >= graph.vertex_count:
            raise DomainError("seed vertex out of range")
        times = np.full(graph.vertex_count, np.inf)
        times[seeds] = clock
        return cls(graph, times, clock)

    @property
    def infected(self) -> np.ndarray:
        return np.isfinite(self.vertex_infection_time)

    @property
    def n_infected(self) -> int:
        return int(np.count_nonzero(self.infected))

    @property
    def edge_infection_time(self) -> np.ndarray:
        """T_e = min(T_u, T_v); ``inf`` when neither endpoint is infected."""
        e = self.graph.edges
        t = self.vertex_infection_time
        return np.minimum(t[e[:, 0]], t[e[:, 1]])

    @property
    def edge_infected(self) -> np.ndarray:
        return np.isfinite(self.edge_infection_time)


@dataclass
class SimulationTrace:
    """Per-step series of one run (or an average of runs).

    ``times`` holds model time ``step * dt``. ``final_state`` is set for a
    single stochastic replica and ``None`` for mean-field and aggregate
    traces.
    """

    times: np.ndarray
    n_t: np.ndarray
    lambda_v: np.ndarray
    lambda_e: np.ndarray
    lambda_s: np.ndarray
    vertex_count: int
    edge_count: int
    k_e_edges: float
    dt: float = 1.0
    final_state: Optional[InfectionState] = None
    detected_at: Optional[int] = None

    def __post_init__(self):
        n = len(self.times)
        for name in ("n_t", "lambda_v", "lambda_e", "lambda_s"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"series {name} has length {len(getattr(self, name))}, expected {n}")

    @property
    def horizon(self) -> int:
        return len(self.times) - 1

    def series(self, which: str) -> np.ndarray:
        key = {"vertices": "lambda_v", "edges": "lambda_e", "social": "lambda_s"}.get(which, which)
        if key not in ("lambda_v", "lambda_e", "lambda_s"):
            raise DomainError(f"unknown series {which!r}")
        return getattr(self, key)


@dataclass
class MonteCarloResult:
    aggregate: SimulationTrace
    replicas: list = field(default_factory=list)
    lambda_s_from_mean_lambda_e: Optional[np.ndarray] = None


def _resolve_k_e(graph: Graph, k_e_edges: Optional[float]) -> float:
    if k_e_edges is not None:
        return float(k_e_edges)
    if graph.edge_count == 0:
        return 0.0
    return estimate_kolmogorov(graph).k_e_edges


def _check_rho(rho: float):
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"rho must lie in [0, 1], got {rho}")


def attack_probability(
    graph: Graph, u: int, n_t: float, rho: float, normalization: str = "degree_sum"
) -> float:
    """1 - exp(-N_t * rho * deg(u) / sum_v deg(v)).

    ``normalization="vertex_count"`` divides by |V| instead, matching the
    expected number of infected neighbours N_t * deg(u) / |V| under uniform
    mixing.
    """
    _check_rho(rho)
    if graph.edge_count == 0:
        raise DomainError("attack probability undefined on a graph without edges")
    if not 0 <= n_t <= graph.vertex_count:
        raise DomainError("n_t must lie in [0, |V|]")
    norm = _normalizer(graph, normalization)
    return float(-np.expm1(-n_t * rho * graph.degrees[u] / norm))


def _normalizer(graph: Graph, normalization: str) -> float:
    if normalization == "degree_sum":
        return float(graph.degree_sum)
    if normalization == "vertex_count":
        return float(graph.vertex_count)
    raise DomainError(f"unknown normalization {normalization!r}; choose from {NORMALIZATIONS}")


def mean_field_counts(
    graph: Graph,
    rho: float,
    seed_count: int = 1,
    horizon: int = 100,
    normalization: str = "degree_sum",
) -> np.ndarray:
    """Expected infected counts N_0..N_horizon from the survival recursion.

    Each vertex keeps a running survival product
    prod_{i<=t} exp(-N_i * rho * deg(v) / norm); then
    N_{t+1} = max(seed_count, |V| - sum_v survival_v). Seeds are permanently
    infected, hence the floor.
    """
    _check_rho(rho)
    n = graph.vertex_count
    if graph.edge_count == 0:
        raise DomainError("mean-field recursion needs at least one edge")
    if not 1 <= seed_count <= n:
        raise DomainError(f"seed_count must lie in [1, {n}]")
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    hazard = rho * graph.degrees / _normalizer(graph, normalization)
    log_survival = np.zeros(n)
    counts = np.empty(horizon + 1)
    counts[0] = seed_count
    for t in range(horizon):
        log_survival -= counts[t] * hazard
        counts[t + 1] = max(float(seed_count), n - float(np.exp(log_survival).sum()))
    return counts


def mean_field(
    graph: Graph,
    rho: float,
    learning: LearningParams,
    seed_count: int = 1,
    horizon: int = 100,
    dt: float = 1.0,
    k_e_edges: Optional[float] = None,
    normalization: str = "degree_sum",
) -> SimulationTrace:
    """Deterministic trace from the mean-field recursion.

    Expected indicators are p[I_u] = N_t/|V| and p[I_e] = 2x - x^2 with
    x = N_t/|V|. The increments of these probabilities are the onset
    distribution; Lambda series mix the Gompertz curve over those onsets.
    Per-element rates enter through the fraction of elements sharing each
    rate.
    """
    counts = mean_field_counts(graph, rho, seed_count, horizon, normalization)
    n, m = graph.vertex_count, graph.edge_count
    x = counts / n
    cover = 2 * x - x * x
    dv = np.diff(x, prepend=0.0)
    de = np.diff(cover, prepend=0.0)

    lam_v = np.zeros(horizon + 1)
    for rate, frac in _rate_fractions(learning.vertex_rate_array(n)):
        lam_v += frac * onset_series(dv, learning.beta, rate, dt)
    lam_e = np.zeros(horizon + 1)
    for rate, frac in _rate_fractions(learning.edge_rate_array(m)):
        lam_e += frac * onset_series(de, learning.alpha, rate, dt)
    lam_v = np.clip(lam_v, 0.0, 1.0)
    lam_e = np.clip(lam_e, 0.0, 1.0)

    k_e = _resolve_k_e(graph, k_e_edges)
    return SimulationTrace(
        times=np.arange(horizon + 1) * dt,
        n_t=counts,
        lambda_v=lam_v,
        lambda_e=lam_e,
        lambda_s=social_essence_series(lam_e, m, k_e),
        vertex_count=n,
        edge_count=m,
        k_e_edges=k_e,
        dt=dt,
    )


def _rate_fractions(rates: np.ndarray):
    uniq, counts = np.unique(rates, return_counts=True)
    total = counts.sum()
    return [(float(r), c / total) for r, c in zip(uniq, counts)]


def _transmit(
    src: np.ndarray, dst: np.ndarray, infected: np.ndarray, rho: float, rng: np.random.Generator
) -> np.ndarray:
    """Vertices newly infected in one step (sorted, unique)."""
    active = infected[src] & ~infected[dst]
    targets = dst[active]
    if rho <= 0.0 or len(targets) == 0:
        return targets[:0]
    hit = targets[rng.random(len(targets)) < rho]
    return np.unique(hit)


def monte_carlo_step(
    graph: Graph, state: InfectionState, rho: float, rng: np.random.Generator
) -> InfectionState:
    """One synchronous step: every infected vertex tries each susceptible
    neighbour independently with probability ``rho``."""
    _check_rho(rho)
    src, dst = graph.directed
    new = _transmit(src, dst, state.infected, rho, rng)
    clock = state.clock + 1
    times = state.vertex_infection_time.copy()
    times[new] = clock
    return replace(state, vertex_infection_time=times, clock=clock)


def _replica_trace(
    graph: Graph,
    times_u: np.ndarray,
    learning: LearningParams,
    horizon: int,
    dt: float,
    k_e: float,
    final_state: InfectionState,
    detected_at: Optional[int] = None,
) -> SimulationTrace:
    n, m = graph.vertex_count, graph.edge_count
    counts = np.bincount(times_u[np.isfinite(times_u)].astype(np.int64), minlength=horizon + 1)
    n_t = np.cumsum(counts[: horizon + 1]).astype(float)
    lam_v = grouped_onset_series(times_u, learning.vertex_rate_array(n), learning.beta, horizon, dt) / n
    if m:
        te = np.minimum(times_u[graph.edges[:, 0]], times_u[graph.edges[:, 1]])
        lam_e = grouped_onset_series(te, learning.edge_rate_array(m), learning.alpha, horizon, dt) / m
    else:
        lam_e = np.zeros(horizon + 1)
    lam_v = np.clip(lam_v, 0.0, 1.0)
    lam_e = np.clip(lam_e, 0.0, 1.0)
    if detected_at is not None and detected_at < horizon:
        # truncated trajectory: nothing more is learned after detection
        for s in (n_t, lam_v, lam_e):
            s[detected_at + 1:] = s[detected_at]
    lam_s = social_essence_series(lam_e, m, k_e) if m else np.zeros(horizon + 1)
    return SimulationTrace(
        times=np.arange(horizon + 1) * dt,
        n_t=n_t,
        lambda_v=lam_v,
        lambda_e=lam_e,
        lambda_s=lam_s,
        vertex_count=n,
        edge_count=m,
        k_e_edges=k_e,
        dt=dt,
        final_state=final_state,
        detected_at=detected_at,
    )


def simulate_replica(
    graph: Graph,
    rho: float,
    seeds: Sequence[int],
    horizon: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Run one replica and return the onset step of every vertex (inf if never)."""
    _check_rho(rho)
    times = np.full(graph.vertex_count, np.inf)
    times[np.asarray(list(seeds), dtype=np.int64)] = 0
    infected = np.isfinite(times)
    src, dst = graph.directed
    for step in range(1, horizon + 1):
        new = _transmit(src, dst, infected, rho, rng)
        if len(new):
            infected[new] = True
            times[new] = step
        elif not (infected[src] & ~infected[dst]).any():
            break  # nothing left to reach
    return times


def run_monte_carlo(
    graph: Graph,
    learning: LearningParams,
    rho: float,
    seeds: Optional[Sequence[int]] = None,
    horizon: int = 100,
    replicas: int = 100,
    rng_seed: int = 0,
    seed_count: int = 1,
    dt: float = 1.0,
    k_e_edges: Optional[float] = None,
    keep_replicas: bool = True,
    truncate_on_detection=None,
) -> MonteCarloResult:
    """Independent stochastic replicas and their per-step mean.

    Replica ``i`` draws from its own stream spawned off ``rng_seed``, so
    results do not depend on execution order. With ``seeds=None`` every
    replica picks ``seed_count`` distinct seed vertices uniformly at random.

    ``truncate_on_detection`` (experimental) takes a DetectionParams; each
    replica then samples a detection step from the detection curve and
    stops spreading and learning from that step on.
    """
    _check_rho(rho)
    if replicas < 1:
        raise DomainError("replicas must be >= 1")
    if horizon < 1:
        raise DomainError("horizon must be >= 1")
    n = graph.vertex_count
    if seeds is not None:
        seeds = list(seeds)
        if not seeds:
            raise DomainError("seed set must be non-empty")
        InfectionState.seeded(graph, seeds)  # range check
    elif not 1 <= seed_count <= n:
        raise DomainError(f"seed_count must lie in [1, {n}]")
    k_e = _resolve_k_e(graph, k_e_edges)

    if truncate_on_detection is not None:
        from .detection import detection_probability

        p_det = detection_probability(np.arange(horizon + 1) * dt, truncate_on_detection)

    streams = np.random.SeedSequence(rng_seed).spawn(replicas)
    traces = []
    sums = None
    for ss in streams:
        rng = np.random.default_rng(ss)
        rep_seeds = seeds if seeds is not None else rng.choice(n, size=seed_count, replace=False)
        detected_at = None
        run_horizon = horizon
        if truncate_on_detection is not None:
            u = rng.random()
            hit = np.flatnonzero(p_det >= u)
            if len(hit):
                detected_at = int(hit[0])
                run_horizon = detected_at
        times_u = simulate_replica(graph, rho, rep_seeds, run_horizon, rng)
        state = InfectionState(graph, times_u, min(run_horizon, horizon))
        tr = _replica_trace(graph, times_u, learning, horizon, dt, k_e, state, detected_at)
        stacked = np.stack([tr.n_t, tr.lambda_v, tr.lambda_e, tr.lambda_s])
        sums = stacked if sums is None else sums + stacked
        if keep_replicas:
            traces.append(tr)
    mean = sums / replicas
    agg = SimulationTrace(
        times=np.arange(horizon + 1) * dt,
        n_t=mean[0],
        lambda_v=mean[1],
        lambda_e=mean[2],
        lambda_s=mean[3],
        vertex_count=n,
        edge_count=graph.edge_count,
        k_e_edges=k_e,
        dt=dt,
    )
    s_from_mean = social_essence_series(mean[2], graph.edge_count, k_e) if graph.edge_count else None
    return MonteCarloResult(agg, traces, s_from_mean)

