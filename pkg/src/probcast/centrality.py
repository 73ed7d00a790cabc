"""Node scores and the capped-proportional broadcast-probability design."""
from __future__ import annotations

from collections import deque
from pathlib import Path

import numpy as np

from .errors import PageRankConvergenceError, ProbabilityError
from .graph import Graph, degrees

__all__ = [
    "degree_scores",
    "pagerank_scores",
    "betweenness_scores",
    "shifted_scores",
    "default_beta",
    "probability_vector",
    "uniform_probability",
    "check_probability_vector",
    "read_probability_vector",
    "write_probability_vector",
]


def degree_scores(g: Graph) -> np.ndarray:
    return degrees(g).astype(float)


def pagerank_scores(
    g: Graph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 10_000
) -> np.ndarray:
    """PageRank of an undirected graph by power iteration.

    Iterates ``pr_i <- (1 - damping)/n + damping * sum_{j ~ i} pr_j / d_j``
    until the max-norm change drops below ``tol``.  Isolated nodes spread
    their mass uniformly so the scores keep summing to one.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    n = g.n
    e = g.edge_array()
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    deg = degrees(g).astype(float)
    dangling = deg == 0
    inv_deg = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, deg))

    pr = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        share = pr * inv_deg
        nxt = np.bincount(dst, weights=share[src], minlength=n)
        nxt = (1.0 - damping) / n + damping * (nxt + pr[dangling].sum() / n)
        residual = float(np.max(np.abs(nxt - pr)))
        pr = nxt
        if residual < tol:
            return pr / pr.sum()
    raise PageRankConvergenceError(
        f"PageRank did not converge in {max_iter} iterations (residual {residual:.3e})", residual
    )


def betweenness_scores(g: Graph) -> np.ndarray:
    """Unnormalized shortest-path betweenness (Brandes), counted per unordered pair."""
    n = g.n
    adj = g.adjacency_lists()
    bc = np.zeros(n)
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = [-1] * n
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        for w in reversed(order):
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                bc[w] += delta[w]
    # every unordered pair was visited from both ends
    return bc / 2.0


def default_beta(scores: np.ndarray) -> float:
    """``0.01 * max(scores)``, or 0.01 when every score is zero."""
    top = float(np.max(scores)) if len(scores) else 0.0
    return 1e-2 * (top if top > 0 else 1.0)


def shifted_scores(scores: np.ndarray, beta: float) -> np.ndarray:
    if beta <= 0:
        raise ValueError("beta must be positive")
    return np.asarray(scores, dtype=float) + beta


def probability_vector(scores: np.ndarray, K: float, return_gamma: bool = False):
    """Solve ``p_i = min(1, gamma * s_i)`` with ``sum(p) = K``.

    ``gamma`` is found exactly by walking the sorted breakpoints ``1/s_i``:
    with the ``k`` largest scores capped, ``gamma = (K - k) / sum(rest)``.
    """
    s = np.asarray(scores, dtype=float)
    n = s.size
    if n == 0:
        raise ProbabilityError("empty score vector")
    if np.any(~np.isfinite(s)) or np.any(s <= 0):
        raise ProbabilityError(
            "scores must be strictly positive; zero scores (e.g. betweenness of leaves) "
            "need shifted_scores(scores, beta) first"
        )
    if not 0 < K <= n:
        raise ProbabilityError(f"budget K={K} must lie in (0, N={n}]")

    if K >= n:
        p, gamma = np.ones(n), 1.0 / s.min()
    else:
        desc = np.sort(s)[::-1]
        tail = np.cumsum(desc[::-1])[::-1]  # tail[k] = sum(desc[k:])
        gamma = None
        for k in range(n):
            g = (K - k) / tail[k]
            if g * desc[k] <= 1.0 and (k == 0 or g * desc[k - 1] >= 1.0):
                gamma = g
                break
        if gamma is None:  # pragma: no cover - guaranteed by K < n
            raise ProbabilityError("no breakpoint satisfied the budget")
        p = np.minimum(1.0, gamma * s)
    return (p, gamma) if return_gamma else p


def uniform_probability(n: int, K: float) -> np.ndarray:
    if not 0 < K <= n:
        raise ProbabilityError(f"budget K={K} must lie in (0, N={n}]")
    return np.full(n, K / n)


def check_probability_vector(p: np.ndarray, K: float | None = None, atol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise ProbabilityError("probabilities must lie in [0, 1]")
    if K is not None and abs(p.sum() - K) > atol:
        raise ProbabilityError(f"probabilities sum to {p.sum():.12g}, expected K={K}")
    return p


def write_probability_vector(p: np.ndarray, path: str | Path) -> None:
    Path(path).write_text("".join(f"{i} {float(x)!r}\n" for i, x in enumerate(p)))


def read_probability_vector(path: str | Path) -> np.ndarray:
    rows = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        i, x = line.split()
        rows.append((int(i), float(x)))
    rows.sort()
    if [i for i, _ in rows] != list(range(len(rows))):
        raise ProbabilityError(f"{path}: indices must be 0..n-1 without gaps")
    return check_probability_vector(np.array([x for _, x in rows]))
