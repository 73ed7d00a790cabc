"""Undirected graphs: construction, random generation, matrix views and edge-list IO."""
from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import GraphFormatError, GraphGenerationError
from .streams import Stream

__all__ = [
    "Graph",
    "erdos_renyi",
    "degrees",
    "adjacency",
    "laplacian",
    "is_connected",
    "max_degree",
    "neighbors",
    "path_graph",
    "cycle_graph",
    "complete_graph",
    "star_graph",
    "read_edgelist",
    "write_edgelist",
    "graph_hash",
]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on nodes ``0..n-1``.

    Edges are stored once as ``(i, j)`` with ``i < j``, sorted.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one node")
        canon = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) out of range for n={self.n}")
            e = (a, b) if a < b else (b, a)
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(x)) for x in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, tuple(edges))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency_lists(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    def edge_array(self) -> np.ndarray:
        """``(m, 2)`` integer array of the stored edges."""
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and leaves ``1..leaves``."""
    return Graph(leaves + 1, tuple((0, j) for j in range(1, leaves + 1)))


def erdos_renyi(n: int, edge_prob: float, seed: int, max_retries: int = 1000) -> Graph:
    """Connected G(n, p) sample by rejection.

    Attempt ``a`` reads block ``a`` of the ``(seed, "graph")`` stream, so the
    result is a deterministic function of ``(n, edge_prob, seed)``.
    """
    if n < 2:
        raise ValueError("erdos_renyi needs n >= 2")
    if not 0.0 < edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in (0, 1]")
    iu, ju = np.triu_indices(n, k=1)
    stream = Stream(seed, "graph")
    for attempt in range(max_retries):
        keep = stream.uniform(attempt, iu.size) < edge_prob
        g = Graph(n, tuple(zip(iu[keep].tolist(), ju[keep].tolist())))
        if is_connected(g):
            return g
    raise GraphGenerationError(
        f"no connected sample after {max_retries} attempts (n={n}, edge_prob={edge_prob})"
    )


def degrees(g: Graph) -> np.ndarray:
    return np.array([len(a) for a in g.adjacency_lists()], dtype=np.int64)


def adjacency(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    if g.edges:
        e = g.edge_array()
        a[e[:, 0], e[:, 1]] = 1.0
        a[e[:, 1], e[:, 0]] = 1.0
    return a


def laplacian(g: Graph) -> np.ndarray:
    """``L = D - A``."""
    return np.diag(degrees(g).astype(float)) - adjacency(g)


def neighbors(g: Graph, i: int) -> frozenset[int]:
    if not 0 <= i < g.n:
        raise IndexError(f"node {i} out of range for n={g.n}")
    return frozenset(g.adjacency_lists()[i])


def max_degree(g: Graph) -> int:
    return int(degrees(g).max())


def is_connected(g: Graph) -> bool:
    adj = g.adjacency_lists()
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(w)
    return count == g.n


def graph_hash(g: Graph) -> str:
    h = hashlib.sha256(f"n={g.n}\n".encode())
    for a, b in g.edges:
        h.update(f"{a} {b}\n".encode())
    return h.hexdigest()[:16]


def read_edgelist(path: str | Path) -> tuple[Graph, list[int]]:
    """Parse an edge-list file.

    Returns the graph and the original label of each dense node index.
    With a ``nodes <n>`` header the labels must already be ``0..n-1``;
    otherwise the labels that occur are remapped in sorted order.
    Connectivity is not checked here; call :func:`is_connected`.
    """
    declared = None
    pairs = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "nodes":
            if len(parts) != 2 or declared is not None:
                raise GraphFormatError(f"line {lineno}: bad nodes header")
            declared = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'i j', got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: non-integer label") from exc
        if a < 0 or b < 0:
            raise GraphFormatError(f"line {lineno}: negative label")
        pairs.append((a, b))

    if declared is not None:
        labels = list(range(declared))
        index = {k: k for k in labels}
    else:
        labels = sorted({x for pair in pairs for x in pair})
        index = {lab: k for k, lab in enumerate(labels)}
    try:
        edges = {tuple(sorted((index[a], index[b]))) for a, b in pairs}
        return Graph(len(labels), tuple(edges)), labels
    except (KeyError, ValueError) as exc:
        raise GraphFormatError(str(exc)) from exc


def write_edgelist(g: Graph, path: str | Path) -> None:
    lines = [f"nodes {g.n}"] + [f"{a} {b}" for a, b in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")
