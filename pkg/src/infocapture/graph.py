"""Immutable undirected simple graphs, edge-list I/O and synthetic generators.

Vertices are dense integers ``0..n-1``. Edges are stored once, as ``(u, v)``
with ``u < v``, sorted lexicographically, in an ``(|E|, 2)`` int64 array.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from .errors import EdgeListParseError, GraphValidationError

__all__ = [
    "Graph",
    "load_edge_list",
    "read_edge_list",
    "write_edge_list",
    "write_mapping",
    "generate_cohort_network",
    "generate_random_network",
    "generate_scale_free",
]

_HEADER_RE = re.compile(r"^#\s*vertices\s*:\s*(\d+)\s*$", re.IGNORECASE)


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph.

    Build through :meth:`from_edges` (validating) or one of the generators.
    ``weights`` optionally carries a positive activity weight per edge,
    aligned with ``edges``; ``labels`` maps dense ids back to external ids
    when the graph was loaded with remapping.
    """

    vertex_count: int
    edges: np.ndarray
    weights: Optional[np.ndarray] = None
    labels: Optional[tuple] = None
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", _frozen(edges))
        deg = np.bincount(edges.ravel(), minlength=self.vertex_count).astype(np.int64)
        object.__setattr__(self, "degrees", _frozen(deg))
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            object.__setattr__(self, "weights", _frozen(w))

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        pairs: Iterable[Sequence[int]],
        weights: Optional[Sequence[float]] = None,
        labels: Optional[Sequence] = None,
    ) -> "Graph":
        """Validate and canonicalize an edge collection.

        Raises GraphValidationError on self-loops, duplicate unordered
        pairs, negative ids, ids >= vertex_count, or bad weights.
        """
        if vertex_count < 0:
            raise GraphValidationError("vertex_count must be non-negative")
        arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        arr = arr.reshape(-1, 2)
        if len(arr):
            if arr.min() < 0 or arr.max() >= vertex_count:
                raise GraphValidationError(
                    f"edge endpoint out of range for {vertex_count} vertices"
                )
            loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
            if len(loops):
                u = int(arr[loops[0], 0])
                raise GraphValidationError(f"self-loop ({u},{u}) not allowed")
        canon = np.sort(arr, axis=1)
        order = np.lexsort((canon[:, 1], canon[:, 0]))
        canon = canon[order]
        if len(canon) > 1:
            dup = np.flatnonzero(np.all(canon[1:] == canon[:-1], axis=1))
            if len(dup):
                u, v = canon[dup[0]]
                raise GraphValidationError(f"duplicate edge ({u},{v})")
        w = None
        if weights is not None:
            w = np.asarray(weights, dtype=float)
            if w.shape != (len(arr),):
                raise GraphValidationError("weights must have one entry per edge")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise GraphValidationError("edge weights must be finite and positive")
            w = w[order]
        if labels is not None and len(labels) != vertex_count:
            raise GraphValidationError("labels must have one entry per vertex")
        return cls(
            vertex_count,
            canon,
            weights=w,
            labels=tuple(labels) if labels is not None else None,
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degree_sum(self) -> int:
        return 2 * len(self.edges)

    def edge_set(self) -> set:
        return {(int(u), int(v)) for u, v in self.edges}

    @cached_property
    def directed(self) -> tuple[np.ndarray, np.ndarray]:
        """Both orientations of every edge as (source, target) arrays."""
        e = self.edges
        src = _frozen(np.concatenate([e[:, 0], e[:, 1]]))
        dst = _frozen(np.concatenate([e[:, 1], e[:, 0]]))
        return src, dst

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency: ``indices[indptr[u]:indptr[u+1]]`` are u's neighbours."""
        src, dst = self.directed
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        np.cumsum(self.degrees, out=indptr[1:])
        return _frozen(indptr), _frozen(dst[order])

    def neighbors(self, u: int) -> np.ndarray:
        indptr, indices = self.adjacency
        return indices[indptr[u]:indptr[u + 1]]

    def is_connected(self) -> bool:
        if self.vertex_count <= 1:
            return True
        indptr, indices = self.adjacency
        seen = np.zeros(self.vertex_count, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in indices[indptr[u]:indptr[u + 1]]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return bool(seen.all())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and np.array_equal(self.edges, other.edges)
        )

    def __hash__(self):
        return hash((self.vertex_count, self.edges.tobytes()))

    def __repr__(self):
        return f"Graph(vertex_count={self.vertex_count}, edge_count={self.edge_count})"


# ---------------------------------------------------------------------------
# edge-list I/O


def load_edge_list(
    source: Union[TextIO, bytes, str, Iterable], remap: bool = False
) -> Graph:
    """Parse an edge list.

    ``source`` may be a text or binary stream, a ``bytes``/``str`` blob, or
    any iterable of lines. Each non-empty, non-comment line holds ``u v``
    and optionally a positive weight. A ``# vertices: n`` comment fixes the
    vertex count; otherwise it is ``1 + max id``.

    With ``remap=True`` the ids may be arbitrary tokens; they are mapped to
    ``0..n-1`` in order of first appearance and kept in ``Graph.labels``.
    """
    if isinstance(source, (bytes, bytearray)):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)

    declared: Optional[int] = None
    pairs: list[tuple] = []
    weights: list[float] = []
    weighted: Optional[bool] = None
    linenos: list[int] = []
    for lineno, raw in enumerate(source, start=1):
        line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER_RE.match(line)
            if m:
                declared = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise EdgeListParseError(lineno, line, "expected 'u v' or 'u v weight'")
        if remap:
            u, v = parts[0], parts[1]
        else:
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(lineno, line, "vertex ids must be integers") from None
            if u < 0 or v < 0:
                raise EdgeListParseError(lineno, line, "vertex ids must be non-negative")
        has_w = len(parts) == 3
        if weighted is None:
            weighted = has_w
        elif weighted != has_w:
            raise EdgeListParseError(lineno, line, "mixed weighted and unweighted lines")
        if has_w:
            try:
                weights.append(float(parts[2]))
            except ValueError:
                raise EdgeListParseError(lineno, line, "weight must be a number") from None
        pairs.append((u, v))
        linenos.append(lineno)

    labels = None
    if remap:
        index: dict = {}
        for u, v in pairs:
            index.setdefault(u, len(index))
            index.setdefault(v, len(index))
        pairs = [(index[u], index[v]) for u, v in pairs]
        labels = list(index)
        n = len(index)
        if declared is not None:
            if declared < n:
                raise GraphValidationError(f"header declares {declared} vertices but {n} ids seen")
            labels += [None] * (declared - n)
            n = declared
    else:
        seen_max = max((max(p) for p in pairs), default=-1)
        n = seen_max + 1
        if declared is not None:
            if declared < n:
                raise GraphValidationError(
                    f"header declares {declared} vertices but id {seen_max} seen"
                )
            n = declared

    # point at the offending line rather than only the pair
    seen: dict = {}
    for (u, v), lineno in zip(pairs, linenos):
        if u == v:
            raise GraphValidationError(f"line {lineno}: self-loop ({u},{u}) not allowed")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphValidationError(
                f"line {lineno}: duplicate edge {key} (first on line {seen[key]})"
            )
        seen[key] = lineno

    return Graph.from_edges(n, pairs, weights=weights if weighted else None, labels=labels)


def read_edge_list(path: Union[str, Path], remap: bool = False) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return load_edge_list(fh, remap=remap)


def write_edge_list(graph: Graph, out: TextIO, header: Sequence[str] = ()) -> None:
    """Write ``graph`` in the edge-list format read by :func:`load_edge_list`."""
    for line in header:
        out.write(f"# {line}\n")
    out.write(f"# vertices: {graph.vertex_count}\n")
    if graph.weights is None:
        for u, v in graph.edges:
            out.write(f"{u} {v}\n")
    else:
        for (u, v), w in zip(graph.edges, graph.weights):
            out.write(f"{u} {v} {w!r}\n")


def write_mapping(graph: Graph, out: TextIO) -> None:
    """Write the dense-id -> external-id table of a remapped graph as CSV."""
    if graph.labels is None:
        raise GraphValidationError("graph carries no external labels")
    out.write("vertex,label\n")
    for i, label in enumerate(graph.labels):
        out.write(f"{i},{'' if label is None else label}\n")


# ---------------------------------------------------------------------------
# generators


def generate_cohort_network(n: int, month_assignment: Sequence) -> Graph:
    """Disjoint cliques: ``u`` and ``v`` are adjacent iff they share a cohort label."""
    if n < 0:
        raise GraphValidationError("n must be non-negative")
    if len(month_assignment) != n:
        raise GraphValidationError("month_assignment must have length n")
    groups: dict = {}
    for u, label in enumerate(month_assignment):
        groups.setdefault(label, []).append(u)
    chunks = []
    for members in groups.values():
        if len(members) > 1:
            m = np.asarray(members, dtype=np.int64)
            iu, iv = np.triu_indices(len(m), 1)
            chunks.append(np.stack([m[iu], m[iv]], axis=1))
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return Graph(n, edges[order])


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # row u covers linear indices [start(u), start(u+1)), start(u) = u*n - u*(u+1)/2
    rows = np.arange(n, dtype=np.int64)
    starts = rows * n - rows * (rows + 1) // 2
    u = np.searchsorted(starts, k, side="right") - 1
    v = k - starts[u] + u + 1
    return u, v


def generate_random_network(n: int, p: float, seed: Optional[int] = None) -> Graph:
    """Erdős–Rényi G(n, p).

    Pairs are enumerated in lexicographic order and the gaps between
    successive present pairs are drawn as geometric variables, so the cost
    scales with the number of edges rather than with n².
    """
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise GraphValidationError(f"edge probability must lie in [0, 1], got {p}")
    if n < 0:
        raise GraphValidationError("n must be non-negative")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph(n, np.empty((0, 2), dtype=np.int64))
    rng = np.random.default_rng(seed)
    picks = []
    pos = -1
    batch = max(16, int(total * p * 1.1) + 16)
    while True:
        gaps = rng.geometric(p, size=batch)
        # tiny p can overflow int64; anything past the end is equivalent
        gaps[(gaps <= 0) | (gaps > total)] = total + 1
        idx = pos + np.cumsum(gaps)
        keep = idx[idx < total]
        picks.append(keep)
        if len(keep) < batch:
            break
        pos = int(idx[-1])
    k = np.concatenate(picks)
    u, v = _pair_from_index(k, n)
    return Graph(n, np.stack([u, v], axis=1))


def generate_scale_free(n: int, m: int, seed: Optional[int] = None) -> Graph:
    """Barabási–Albert preferential attachment.

    Starts from a clique on ``m`` vertices, then each arriving vertex links
    to ``m`` distinct existing vertices chosen with probability proportional
    to degree (core vertices also hold one base ticket each so that ``m=1``
    can start from a single isolated vertex). Produces
    ``C(m, 2) + (n - m) * m`` edges and a connected graph.
    """
    if not (1 <= m < n):
        raise GraphValidationError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    # one entry per unit of degree, plus a base ticket per core vertex
    tickets = np.empty(m + 2 * (len(edges) + (n - m) * m), dtype=np.int64)
    fill = 0
    for i in range(m):
        tickets[fill] = i
        fill += 1
    for i, j in edges:
        tickets[fill:fill + 2] = (i, j)
        fill += 2
    for v in range(m, n):
        targets: list[int] = []
        while len(targets) < m:
            t = int(tickets[rng.integers(fill)])
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((t, v))
            tickets[fill:fill + 2] = (t, v)
            fill += 2
    return Graph.from_edges(n, edges)
