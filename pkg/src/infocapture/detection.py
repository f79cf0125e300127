"""Richards-curve detection and detection-weighted information totals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError

# integration cutoff
DETECTION_SATURATION = 1e-6
INCREMENT_FLOOR = 1e-9
_MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class DetectionParams:
    rho: float
    sigma: float
    m: float

    def __post_init__(self):
        if not (0.0 < self.rho <= 1.0):
            raise DomainError(f"detection needs rho in (0, 1], got {self.rho}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be finite and > 0, got {self.sigma}")
        if not math.isfinite(self.m):
            raise DomainError("m must be finite")


def detection_probability(t, params: DetectionParams):
    """(1 + exp(-rho (t - M))) ** (-sigma / rho), evaluated in log space."""
    if params.rho == 0:
        raise DomainError("rho = 0 makes the detection exponent undefined")
    ta = np.asarray(t, dtype=float)
    log_inner = np.logaddexp(0.0, -params.rho * (ta - params.m))
    out = np.exp(-(params.sigma / params.rho) * log_inner)
    return float(out) if out.ndim == 0 else out


def saturation_time(params: DetectionParams, eps: float = DETECTION_SATURATION) -> float:
    """First t at which detection_probability exceeds ``1 - eps``."""
    # (1 + e^{-rho(t-M)}) = (1-eps)^{-rho/sigma}
    excess = math.expm1(-(params.rho / params.sigma) * math.log1p(-eps))
    return params.m - math.log(excess) / params.rho


def information_integral(
    values: np.ndarray, times: np.ndarray, p_detect: Callable[[np.ndarray], np.ndarray]
) -> float:
    """sum_k dLambda_k * (1 - p_detect(midpoint_k)).

    The first increment is the jump from 0 to ``values[0]`` at ``times[0]``
    (information available immediately on infection), weighted at
    ``times[0]``. Later increments are weighted at the midpoint of their step.
    """
    lam = np.asarray(values, dtype=float)
    t = np.asarray(times, dtype=float)
    if lam.shape != t.shape or lam.ndim != 1 or len(lam) == 0:
        raise DomainError("values and times must be equal-length 1-d arrays")
    inc = np.diff(lam, prepend=0.0)
    if np.any(inc < -_MONOTONE_SLACK):
        k = int(np.flatnonzero(inc < -_MONOTONE_SLACK)[0])
        raise ValueError(f"information series must be non-decreasing (drops at index {k})")
    inc = np.maximum(inc, 0.0)
    mid = np.concatenate([t[:1], 0.5 * (t[1:] + t[:-1])])
    weight = 1.0 - np.asarray(p_detect(mid), dtype=float)
    return float(np.dot(inc, weight))


def expected_information(trace, which: str, params: Optional[DetectionParams]) -> float:
    """Detection-weighted information captured over a trace.

    ``which`` is ``"vertices"`` or ``"edges"``. ``params=None`` disables
    detection, in which case the result is the final value of the series.
    """
    if which not in ("vertices", "edges"):
        raise DomainError(f"which must be 'vertices' or 'edges', got {which!r}")
    series = trace.series(which)
    if params is None:
        detect = np.zeros_like
    else:
        detect = lambda x: detection_probability(x, params)  # noqa: E731
    return information_integral(series, trace.times, detect)


def truncation_tail(trace, which: str, params: Optional[DetectionParams]) -> float:
    """Upper bound on the information the finite horizon leaves out.

    At most ``1 - Lambda_final`` remains to be learned, and every later
    increment is weighted by at most ``1 - p_detect(t_end)``.
    """
    series = trace.series(which)
    remaining = max(0.0, 1.0 - float(series[-1]))
    if params is None:
        return remaining
    return remaining * (1.0 - detection_probability(float(trace.times[-1]), params))
