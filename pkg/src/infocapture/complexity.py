"""Compression proxy for the Kolmogorov complexity of a graph's edge set,
plus the measures built on top of it (social essence, critical learning
threshold, learnability, protection bound).

True Kolmogorov complexity is uncomputable. The proxy compresses a
canonical binary encoding of the sorted edge list and expresses the result
in edge-equivalents::

    k_e_edges = |E| * compressed_bits / baseline_bits   (clamped to [0, |E|])

where ``baseline_bits`` is the size of the uncompressed canonical encoding.
Estimates depend on vertex labelling and on the compressor; only compare
numbers produced with the same settings.
"""

from __future__ import annotations

import bz2
import lzma
import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ComplexityUndefinedError, DomainError, SingularComplexityError
from .graph import Graph

COMPRESSORS: dict[str, Callable[[bytes], bytes]] = {
    "zlib": lambda b: zlib.compress(b, 9),
    "bz2": lambda b: bz2.compress(b, 9),
    "lzma": lambda b: lzma.compress(b, preset=9 | lzma.PRESET_EXTREME),
}

ENCODINGS = ("gap", "plain")

CSV_COLUMNS = (
    "edge_count",
    "raw_compressed_bits",
    "baseline_bits",
    "k_e_edges",
    "critical_threshold",
    "easily_learnable",
)


@dataclass(frozen=True)
class ComplexityEstimate:
    k_e_edges: float
    raw_compressed_bits: int
    baseline_bits: int
    edge_count: int
    compressor: str = "zlib"
    encoding: str = "gap"

    @property
    def critical_threshold(self) -> float:
        return critical_threshold(self.edge_count, self.k_e_edges)

    @property
    def easily_learnable(self) -> bool:
        if self.edge_count < 2:
            return False
        return is_easily_learnable(self.edge_count, self.k_e_edges)

    def csv_row(self) -> list:
        return [
            self.edge_count,
            self.raw_compressed_bits,
            self.baseline_bits,
            repr(float(self.k_e_edges)),
            repr(float(self.critical_threshold)),
            str(self.easily_learnable).lower(),
        ]


def endpoint_width(vertex_count: int) -> int:
    """Bits per endpoint: ceil(log2 n), at least 1."""
    return max(1, math.ceil(math.log2(max(vertex_count, 1))))


def _pack_fixed_width(values: np.ndarray, width: int) -> bytes:
    vals = values.astype(np.uint64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    bits = ((vals[:, None] >> shifts) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits.ravel()).tobytes()


def canonical_encoding(graph: Graph, encoding: str = "gap") -> tuple[bytes, int]:
    """Serialize the sorted edge list with fixed-width endpoints.

    ``"plain"`` writes ``u`` and ``v`` verbatim. ``"gap"`` writes ``u`` as the
    increase over the previous edge's ``u``, and ``v`` as the increase over
    the previous ``v`` in the same row (or over ``u`` when a row starts).
    Every gap is < n, so the field width is the same in both encodings.

    Returns ``(payload, baseline_bits)``, with ``baseline_bits`` the bit
    length before byte padding.
    """
    if encoding not in ENCODINGS:
        raise DomainError(f"unknown encoding {encoding!r}; choose from {ENCODINGS}")
    width = endpoint_width(graph.vertex_count)
    e = graph.edges  # already lexicographically sorted, u < v
    if encoding == "plain":
        fields = e.ravel()
    else:
        u, v = e[:, 0], e[:, 1]
        du = np.diff(u, prepend=0)
        prev_v = np.concatenate([[0], v[:-1]])
        dv = np.where(du == 0, v - prev_v, v - u)
        fields = np.stack([du, dv], axis=1).ravel()
    return _pack_fixed_width(fields, width), 2 * len(e) * width


def estimate_kolmogorov(
    graph: Graph, compressor: str = "zlib", encoding: str = "gap"
) -> ComplexityEstimate:
    """Compression-based K_E estimate, in edge-equivalents."""
    if graph.edge_count == 0:
        raise ComplexityUndefinedError("complexity of a graph without edges is undefined")
    try:
        compress = COMPRESSORS[compressor]
    except KeyError:
        raise DomainError(f"unknown compressor {compressor!r}; choose from {sorted(COMPRESSORS)}") from None
    payload, baseline = canonical_encoding(graph, encoding)
    compressed = 8 * len(compress(payload))
    m = graph.edge_count
    k = min(max(m * compressed / baseline, 0.0), float(m))
    return ComplexityEstimate(k, compressed, baseline, m, compressor, encoding)


def social_essence(lambda_e, edge_count: int, k_e_edges: float):
    """2 ** ((|E| * lambda_e - |E|) / (|E| - K_E)).

    Accepts a scalar or an array of ``lambda_e`` values.
    """
    if edge_count < 1:
        raise DomainError("edge_count must be >= 1")
    if not 0 <= k_e_edges <= edge_count:
        raise DomainError("k_e_edges must lie in [0, edge_count]")
    if k_e_edges == edge_count:
        raise SingularComplexityError("K_E == |E|: social essence is undefined (no redundant edges)")
    lam = np.asarray(lambda_e, dtype=float)
    if np.any((lam < 0) | (lam > 1)):
        raise DomainError("lambda_e must lie in [0, 1]")
    out = np.exp2((edge_count * lam - edge_count) / (edge_count - k_e_edges))
    return float(out) if out.ndim == 0 else out


def social_essence_series(lambda_e, edge_count: int, k_e_edges: float) -> np.ndarray:
    """Like :func:`social_essence`, but takes the K_E -> |E| limit instead of
    raising: 0 wherever lambda_e < 1 and 1 at lambda_e == 1."""
    lam = np.clip(np.asarray(lambda_e, dtype=float), 0.0, 1.0)
    if k_e_edges >= edge_count:
        return np.where(lam >= 1.0, 1.0, 0.0)
    return np.asarray(social_essence(lam, edge_count, k_e_edges), dtype=float)


def critical_threshold(edge_count: int, k_e_edges: float) -> float:
    """1 - ((|E| - K_E) / |E|) * ln|E|, unclamped."""
    if edge_count < 1:
        raise DomainError("edge_count must be >= 1")
    if not 0 <= k_e_edges <= edge_count:
        raise DomainError("k_e_edges must lie in [0, edge_count]")
    return 1.0 - (edge_count - k_e_edges) / edge_count * math.log(edge_count)


def learnability_bound(edge_count: int) -> float:
    """|E| - |E| / ln|E|: K_E below this makes a network easily learnable."""
    if edge_count < 2:
        raise DomainError("easily-learnable criterion needs edge_count >= 2")
    return edge_count - edge_count / math.log(edge_count)


def is_easily_learnable(edge_count: int, k_e_edges: float) -> bool:
    return k_e_edges < learnability_bound(edge_count)


def protection_bound(edge_count: int, k_e_edges: float) -> float:
    """Right-hand side |E| - (|E| - K_E) ln|E| of the protection inequality."""
    return edge_count - (edge_count - k_e_edges) * math.log(edge_count)


def protection_holds(infected_edge_learning_sum: float, edge_count: int, k_e_edges: float) -> bool:
    """True while the learned edge mass stays strictly below the protection bound.

    ``infected_edge_learning_sum`` is sum_e I_e(t) p_E(e, t - T_e), see
    :func:`infocapture.learning.edge_learning_sum`.
    """
    return infected_edge_learning_sum < protection_bound(edge_count, k_e_edges)
