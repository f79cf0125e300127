"""Gompertz learning curves and the captured-information fractions
Lambda_V(t) and Lambda_E(t)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .errors import DomainError

if TYPE_CHECKING:
    from .graph import Graph
    from .spread import InfectionState


def _positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value}")


@dataclass(frozen=True)
class LearningParams:
    """Learning efficiencies and rates.

    ``alpha`` drives edge learning, ``beta`` vertex learning. ``rate`` is the
    global learning rate; ``vertex_rates`` / ``edge_rates`` override it per
    element (edge rates are aligned with ``Graph.edges``).
    """

    alpha: float
    beta: float
    rate: float = 1.0
    vertex_rates: Optional[np.ndarray] = None
    edge_rates: Optional[np.ndarray] = None

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        _positive("rate", self.rate)
        for name in ("vertex_rates", "edge_rates"):
            r = getattr(self, name)
            if r is None:
                continue
            r = np.asarray(r, dtype=float)
            if r.ndim != 1 or not np.all(np.isfinite(r)) or np.any(r <= 0):
                raise DomainError(f"{name} must be a 1-d array of finite positive rates")
            r.flags.writeable = False
            object.__setattr__(self, name, r)

    def vertex_rate_array(self, n: int) -> np.ndarray:
        if self.vertex_rates is None:
            return np.full(n, self.rate)
        if len(self.vertex_rates) != n:
            raise DomainError(f"expected {n} vertex rates, got {len(self.vertex_rates)}")
        return self.vertex_rates

    def edge_rate_array(self, m: int) -> np.ndarray:
        if self.edge_rates is None:
            return np.full(m, self.rate)
        if len(self.edge_rates) != m:
            raise DomainError(f"expected {m} edge rates, got {len(self.edge_rates)}")
        return self.edge_rates

    @classmethod
    def with_weighted_edges(cls, graph: "Graph", alpha: float, beta: float, rate: float) -> "LearningParams":
        """Edge rates proportional to edge weight, rescaled to mean ``rate``.

        Falls back to the global rate when the graph carries no weights.
        """
        if graph.weights is None or graph.edge_count == 0:
            return cls(alpha, beta, rate)
        w = graph.weights
        return cls(alpha, beta, rate, edge_rates=rate * w / w.mean())


def gompertz(scale, rate, elapsed):
    """exp(-scale * exp(-rate * elapsed)).

    Vectorized over all three arguments; returns a float for scalar input.
    """
    scale_a = np.asarray(scale, dtype=float)
    rate_a = np.asarray(rate, dtype=float)
    if np.any(~(scale_a > 0)) or np.any(~np.isfinite(scale_a)):
        raise DomainError("Gompertz scale must be finite and > 0")
    if np.any(~(rate_a > 0)) or np.any(~np.isfinite(rate_a)):
        raise DomainError("Gompertz rate must be finite and > 0")
    el = np.asarray(elapsed, dtype=float)
    if np.any(el < 0):
        raise DomainError("elapsed time must be >= 0")
    out = np.exp(-scale_a * np.exp(-rate_a * el))
    return float(out) if out.ndim == 0 else out


def _check_time(state: "InfectionState", t: float):
    if t < 0:
        raise DomainError("t must be >= 0")
    if state.n_infected and np.max(state.vertex_infection_time[state.infected]) > t:
        raise DomainError("infection state has onsets later than t")


def lambda_v(state: "InfectionState", params: LearningParams, t: float, dt: float = 1.0) -> float:
    """Fraction of vertex information captured at step ``t``.

    Onsets and ``t`` are in steps; ``dt`` converts steps to Gompertz time.
    """
    n = state.graph.vertex_count
    if n == 0:
        raise DomainError("Lambda_V undefined for a graph without vertices")
    _check_time(state, t)
    mask = state.infected
    if not mask.any():
        return 0.0
    rates = params.vertex_rate_array(n)[mask]
    elapsed = (t - state.vertex_infection_time[mask]) * dt
    return float(np.sum(gompertz(params.beta, rates, elapsed)) / n)


def edge_learning_sum(state: "InfectionState", params: LearningParams, t: float, dt: float = 1.0) -> float:
    """sum_e I_e(t) * p_E(e, t - T_e): learned edge mass, not normalized."""
    m = state.graph.edge_count
    if m == 0:
        raise DomainError("Lambda_E undefined for a graph without edges")
    _check_time(state, t)
    te = state.edge_infection_time
    mask = np.isfinite(te)
    if not mask.any():
        return 0.0
    rates = params.edge_rate_array(m)[mask]
    return float(np.sum(gompertz(params.alpha, rates, (t - te[mask]) * dt)))


def lambda_e(state: "InfectionState", params: LearningParams, t: float, dt: float = 1.0) -> float:
    """Fraction of edge information captured at step ``t``.

    An edge is covered once either endpoint is infected; its onset is the
    earlier endpoint onset.
    """
    return edge_learning_sum(state, params, t, dt) / state.graph.edge_count


def onset_series(onset_weights: np.ndarray, scale: float, rate: float, dt: float = 1.0) -> np.ndarray:
    """Aggregate Gompertz learning over onsets on a step grid.

    ``onset_weights[j]`` is the (possibly fractional) mass whose learning
    starts at step j. Returns ``out[k] = sum_{j<=k} w[j] * g(k - j)``.
    """
    w = np.asarray(onset_weights, dtype=float)
    steps = np.arange(len(w), dtype=float)
    g = gompertz(scale, rate, steps * dt)
    if len(w) == 0:
        return w
    if len(w) > 256:
        from scipy.signal import fftconvolve

        out = fftconvolve(w, g)[: len(w)]
        # fft round-off can leave tiny negatives / non-monotone wiggles
        out = np.maximum.accumulate(np.maximum(out, 0.0)) if np.all(w >= 0) else out
        return out
    return np.convolve(w, g)[: len(w)]


def grouped_onset_series(onsets: np.ndarray, rates: np.ndarray, scale: float, horizon: int, dt: float = 1.0) -> np.ndarray:
    """Sum of g(scale, rate_i, k - onset_i) over elements with finite onset.

    Elements are grouped by rate so the cost is one convolution per distinct
    rate rather than one curve per element.
    """
    finite = np.isfinite(onsets)
    out = np.zeros(horizon + 1)
    if not finite.any():
        return out
    on = onsets[finite].astype(np.int64)
    r = rates[finite]
    uniq, inverse = np.unique(r, return_inverse=True)
    for i, rate in enumerate(uniq):
        counts = np.bincount(on[inverse == i], minlength=horizon + 1)[: horizon + 1]
        out += onset_series(counts, scale, float(rate), dt)
    return out
