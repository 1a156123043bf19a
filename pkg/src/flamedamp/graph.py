"""Directed weighted graphs, edge-list ingestion and the out-degree Laplacian.

The Laplacian convention is ``L = D_out - A`` where ``A[i, j] = w_ij`` is the
weight of the link ``i -> j``. Rows sum to zero, so the largest diagonal entry
(the maximum weighted out-degree) is both the centre and the radius of the
largest Gershgorin disk.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
from scipy.sparse.csgraph import connected_components


Edge = tuple[int, int, float]


class GraphFormatError(ValueError):
    """Raised when an edge list cannot be turned into a valid graph."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class WeightedDigraph:
    """Directed graph on nodes ``0..node_count-1`` with nonnegative weights.

    Construction validates the invariants: indices in range, weights finite
    and nonnegative, no self-loops and at most one edge per ordered pair.
    Zero-weight edges are kept in ``edges`` but behave exactly like absent
    links everywhere downstream.
    """

    node_count: int
    edges: tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.node_count < 1:
            raise GraphFormatError(f"node_count must be positive, got {self.node_count}")
        edges = tuple((int(s), int(t), float(w)) for s, t, w in self.edges)
        seen = set()
        for s, t, w in edges:
            if not (0 <= s < self.node_count and 0 <= t < self.node_count):
                raise GraphFormatError(
                    f"edge {s}->{t} outside node range [0, {self.node_count})")
            if s == t:
                raise GraphFormatError(f"self-loop at node {s}")
            if not np.isfinite(w):
                raise GraphFormatError(f"non-finite weight on edge {s}->{t}")
            if w < 0:
                raise GraphFormatError(f"negative weight {w} on edge {s}->{t}")
            if (s, t) in seen:
                raise GraphFormatError(f"duplicate edge {s}->{t}")
            seen.add((s, t))
        object.__setattr__(self, "edges", edges)

    def adjacency(self) -> np.ndarray:
        """Dense weight matrix with ``A[i, j] = w_ij``."""
        a = np.zeros((self.node_count, self.node_count))
        for s, t, w in self.edges:
            a[s, t] = w
        return a

    def out_degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def is_strongly_connected(self) -> bool:
        """True when every node reaches every other node through positive-weight links."""
        a = self.adjacency() > 0
        ncomp, _ = connected_components(a, directed=True, connection="strong")
        return ncomp == 1

    def terminal_components(self) -> int:
        """Number of strongly connected components with no link leaving them.

        This is the multiplicity of the zero eigenvalue of the out-degree
        Laplacian; a single terminal component means a simple zero mode.
        """
        a = self.adjacency() > 0
        _, labels = connected_components(a, directed=True, connection="strong")
        leaving = set()
        for s, t in zip(*np.nonzero(a)):
            if labels[s] != labels[t]:
                leaving.add(labels[s])
        return len(set(labels.tolist()) - leaving)


def _parse_lines(lines: Iterable[str], skip_header: bool) -> tuple[list[Edge], int]:
    edges: list[Edge] = []
    seen: set[tuple[int, int]] = set()
    max_index = -1
    for lineno, raw in enumerate(lines, start=1):
        if skip_header and lineno == 1:
            continue
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise GraphFormatError(
                f"expected 'source,target,weight', got {line!r}", lineno)
        try:
            s, t = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse {line!r}", lineno) from None
        if s < 0 or t < 0:
            raise GraphFormatError("node indices must be nonnegative", lineno)
        if s == t:
            raise GraphFormatError(f"self-loop at node {s}", lineno)
        if not np.isfinite(w):
            raise GraphFormatError(f"non-finite weight {parts[2]!r}", lineno)
        if w < 0:
            raise GraphFormatError(f"negative weight {w}", lineno)
        if (s, t) in seen:
            raise GraphFormatError(f"duplicate edge {s}->{t}", lineno)
        seen.add((s, t))
        edges.append((s, t, w))
        max_index = max(max_index, s, t)
    return edges, max_index


def load_edge_list(text: str | TextIO, *, header: bool = False,
                   nodes: int | None = None) -> WeightedDigraph:
    """Parse ``source,target,weight`` lines into a validated graph.

    ``text`` may be a string or an open text stream. Blank lines and lines
    starting with ``#`` are ignored. The node count is ``1 + max index``
    unless ``nodes`` overrides it.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    edges, max_index = _parse_lines(stream, header)

    if nodes is None:
        if max_index < 0:
            raise GraphFormatError("no edges supplied; pass nodes= to fix the graph size")
        nodes = max_index + 1
    elif nodes <= max_index:
        raise GraphFormatError(
            f"node override {nodes} too small for index {max_index}")
    return WeightedDigraph(nodes, tuple(edges))


def build_laplacian(g: WeightedDigraph) -> np.ndarray:
    """Return ``D_out - A`` as a dense float matrix."""
    a = g.adjacency()
    return np.diag(a.sum(axis=1)) - a


def max_out_degree(g: WeightedDigraph) -> float:
    """Largest weighted out-degree; ``0.0`` for an edgeless graph."""
    return float(build_laplacian(g).diagonal().max())


def laplacian_row_sum_error(laplacian: np.ndarray) -> float:
    return float(np.abs(laplacian.sum(axis=1)).max()) if laplacian.size else 0.0


def random_digraph(rng: np.random.Generator, n: int, *, density: float = 0.4,
                   max_weight: float = 10.0, strongly_connected: bool = False) -> WeightedDigraph:
    """Random graph with weights uniform in ``(0, max_weight]``.

    With ``strongly_connected`` a directed ring ``i -> i+1`` is laid down
    first so every node reaches every other.
    """
    pairs = {}
    if strongly_connected and n > 1:
        for i in range(n):
            pairs[(i, (i + 1) % n)] = max_weight * (1.0 - rng.random())
    for i in range(n):
        for j in range(n):
            if i != j and (i, j) not in pairs and rng.random() < density:
                pairs[(i, j)] = max_weight * (1.0 - rng.random())
    return WeightedDigraph(n, tuple((i, j, w) for (i, j), w in sorted(pairs.items())))
