"""Sweep the infection rate rho and locate the best attack aggressiveness."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .complexity import estimate_kolmogorov, social_essence_series
from .detection import (
    INCREMENT_FLOOR,
    DetectionParams,
    expected_information,
    saturation_time,
    truncation_tail,
)
from .errors import DomainError
from .graph import Graph
from .learning import LearningParams
from .spread import mean_field, run_monte_carlo

log = logging.getLogger(__name__)

ENGINES = ("mean_field", "monte_carlo")
METRICS = ("v", "e", "s")

DEFAULT_GRID_POINTS = 50
DEFAULT_GRID_RANGE = (0.005, 1.0)
DEFAULT_MAX_HORIZON = 200_000


@dataclass(frozen=True)
class Optimum:
    rho: float
    value: float
    kind: str  # "local" or "global"
    index: int


@dataclass
class SweepResult:
    rho_grid: np.ndarray
    expected_lambda_v: np.ndarray
    expected_lambda_e: np.ndarray
    expected_lambda_s: np.ndarray
    optima: dict = field(default_factory=dict)
    tail_v: Optional[np.ndarray] = None
    tail_e: Optional[np.ndarray] = None
    horizons: Optional[np.ndarray] = None
    expected_lambda_s_replica_mean: Optional[np.ndarray] = None

    def values(self, metric: str) -> np.ndarray:
        return {"v": self.expected_lambda_v, "e": self.expected_lambda_e, "s": self.expected_lambda_s}[metric]

    def global_optimum(self, metric: str) -> Optimum:
        return next(o for o in self.optima[metric] if o.kind == "global")

    def local_optima(self, metric: str) -> list:
        return [o for o in self.optima[metric] if o.kind == "local"]


def default_grid(points: int = DEFAULT_GRID_POINTS, lo: float = DEFAULT_GRID_RANGE[0], hi: float = DEFAULT_GRID_RANGE[1]) -> np.ndarray:
    return np.geomspace(lo, hi, points)


def find_optima(values: Sequence[float], grid: Sequence[float]) -> list:
    """Global argmax plus every strict interior local maximum.

    Ties for the global maximum go to the first occurrence. The global point
    is reported once, as ``"global"``; ``"local"`` entries are the other
    interior points strictly above both neighbours, so plateaus produce none.
    """
    vals = np.asarray(values, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if len(vals) == 0:
        raise DomainError("find_optima needs at least one value")
    if len(vals) != len(grid):
        raise DomainError("values and grid must have equal length")
    if np.any(np.isnan(vals)):
        raise DomainError("values contain NaN")
    g = int(np.argmax(vals))
    out = [Optimum(float(grid[g]), float(vals[g]), "global", g)]
    for i in range(1, len(vals) - 1):
        if i != g and vals[i] > vals[i - 1] and vals[i] > vals[i + 1]:
            out.append(Optimum(float(grid[i]), float(vals[i]), "local", i))
    out.sort(key=lambda o: (o.index, o.kind))
    return out


def _validate_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or len(g) == 0:
        raise DomainError("rho grid must be a non-empty 1-d sequence")
    if np.any(~np.isfinite(g)) or g[0] <= 0 or g[-1] > 1:
        raise DomainError("rho grid values must lie in (0, 1]")
    if np.any(np.diff(g) <= 0):
        raise DomainError("rho grid must be strictly increasing")
    return g


@dataclass
class _Point:
    v: float
    e: float
    s: float
    tail_v: float
    tail_e: float
    horizon: int
    s_replica_mean: float = math.nan


def _last_increment(series: np.ndarray) -> float:
    return float(series[-1] - series[-2]) if len(series) > 1 else float(series[-1])


def evaluate_rho(
    graph: Graph,
    learning: LearningParams,
    rho: float,
    sigma: float,
    m: float,
    *,
    engine: str = "mean_field",
    detect: bool = True,
    seed_count: int = 1,
    seeds: Optional[Sequence[int]] = None,
    horizon: Optional[int] = None,
    replicas: int = 100,
    rng_seed: int = 0,
    dt: float = 1.0,
    k_e_edges: float,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    normalization: str = "degree_sum",
) -> _Point:
    """Expected captured information at one rho.

    Without an explicit horizon, the run is extended (doubling) until
    detection is saturated and the last per-step increments fall below the
    floor, or ``max_horizon`` is reached.
    """
    params = DetectionParams(rho, sigma, m) if detect else None
    auto = horizon is None
    if auto:
        if params is not None:
            horizon = max(1, math.ceil(saturation_time(params) / dt))
        else:
            horizon = 100
        horizon = min(horizon, max_horizon)

    while True:
        if engine == "mean_field":
            trace = mean_field(graph, rho, learning, seed_count=seed_count, horizon=horizon, dt=dt,
                               k_e_edges=k_e_edges, normalization=normalization)
            result = None
        elif engine == "monte_carlo":
            result = run_monte_carlo(graph, learning, rho, seeds=seeds, horizon=horizon, replicas=replicas,
                                     rng_seed=rng_seed, seed_count=seed_count, dt=dt, k_e_edges=k_e_edges)
            trace = result.aggregate
        else:
            raise DomainError(f"unknown engine {engine!r}; choose from {ENGINES}")
        if not auto or horizon >= max_horizon:
            break
        if max(_last_increment(trace.lambda_v), _last_increment(trace.lambda_e)) < INCREMENT_FLOOR:
            break
        horizon = min(2 * horizon, max_horizon)

    if auto and horizon >= max_horizon:
        log.warning("rho=%g: horizon capped at %d steps before the integrand settled", rho, max_horizon)

    v = expected_information(trace, "vertices", params)
    e = expected_information(trace, "edges", params)
    s = float(social_essence_series(e, graph.edge_count, k_e_edges))
    point = _Point(v, e, s, truncation_tail(trace, "vertices", params), truncation_tail(trace, "edges", params), horizon)
    if result is not None and result.replicas:
        per = [expected_information(r, "edges", params) for r in result.replicas]
        point.s_replica_mean = float(np.mean(social_essence_series(np.array(per), graph.edge_count, k_e_edges)))
    return point


def _refine(grid: np.ndarray, optima: dict) -> np.ndarray:
    extra = set()
    for opts in optima.values():
        for o in opts:
            i = o.index
            if i > 0:
                extra.add(math.sqrt(grid[i - 1] * grid[i]))
            if i < len(grid) - 1:
                extra.add(math.sqrt(grid[i] * grid[i + 1]))
    return np.array(sorted(extra - set(grid.tolist())))


def sweep_rho(
    graph: Graph,
    learning: LearningParams,
    sigma: float,
    m: float,
    rho_grid: Optional[Sequence[float]] = None,
    *,
    engine: str = "mean_field",
    detect: bool = True,
    seed_count: int = 1,
    seeds: Optional[Sequence[int]] = None,
    horizon: Optional[int] = None,
    replicas: int = 100,
    rng_seed: int = 0,
    dt: float = 1.0,
    k_e_edges: Optional[float] = None,
    refine: Optional[bool] = None,
    max_horizon: int = DEFAULT_MAX_HORIZON,
    normalization: str = "degree_sum",
) -> SweepResult:
    """Expected captured information across a grid of infection rates.

    Detection uses the same rho as spreading. Every grid point reuses
    ``rng_seed`` (common random numbers), so a point's value does not depend
    on which other points are in the grid. With the default grid, one
    refinement pass inserts geometric midpoints next to every optimum.
    """
    if engine not in ENGINES:
        raise DomainError(f"unknown engine {engine!r}; choose from {ENGINES}")
    if horizon is not None and horizon < 1:
        raise DomainError("horizon must be >= 1")
    if replicas < 1:
        raise DomainError("replicas must be >= 1")
    if graph.edge_count == 0:
        raise DomainError("cannot sweep a graph without edges")
    if refine is None:
        refine = rho_grid is None
    grid = default_grid() if rho_grid is None else _validate_grid(rho_grid)
    if k_e_edges is None:
        k_e_edges = estimate_kolmogorov(graph).k_e_edges

    kwargs = dict(engine=engine, detect=detect, seed_count=seed_count, seeds=seeds, horizon=horizon,
                  replicas=replicas, rng_seed=rng_seed, dt=dt, k_e_edges=k_e_edges,
                  max_horizon=max_horizon, normalization=normalization)
    points = {float(r): evaluate_rho(graph, learning, float(r), sigma, m, **kwargs) for r in grid}

    if refine and len(grid) > 1:
        result = _assemble(points)
        for r in _refine(result.rho_grid, result.optima):
            points[float(r)] = evaluate_rho(graph, learning, float(r), sigma, m, **kwargs)
    return _assemble(points)


def _assemble(points: dict) -> SweepResult:
    rhos = np.array(sorted(points))
    pts = [points[r] for r in rhos]
    res = SweepResult(
        rho_grid=rhos,
        expected_lambda_v=np.array([p.v for p in pts]),
        expected_lambda_e=np.array([p.e for p in pts]),
        expected_lambda_s=np.array([p.s for p in pts]),
        tail_v=np.array([p.tail_v for p in pts]),
        tail_e=np.array([p.tail_e for p in pts]),
        horizons=np.array([p.horizon for p in pts]),
        expected_lambda_s_replica_mean=np.array([p.s_replica_mean for p in pts]),
    )
    res.optima = {k: find_optima(res.values(k), rhos) for k in METRICS}
    return res
