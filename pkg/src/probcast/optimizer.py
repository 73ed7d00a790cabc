"""SPSA search for broadcast probabilities that minimize the expected-matrix spectral radius."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EigenConvergenceError, InfeasibleProjectionError
from .mixing import expected_matrix, projected_spectral_radius
from .streams import Stream

__all__ = [
    "SpsaConfig",
    "OptimizationTrace",
    "objective",
    "project_capped_simplex",
    "spsa_optimize",
    "write_trace_csv",
]


def objective(W: np.ndarray, p: np.ndarray) -> float:
    """``rho(E[Wbar] - u u^T / n)`` for broadcast probabilities ``p``."""
    return projected_spectral_radius(expected_matrix(W, p))


def project_capped_simplex(
    y: np.ndarray, K: float, lo: float = 0.0, hi: float = 1.0, tol: float = 1e-12, max_iter: int = 200
) -> np.ndarray:
    """Euclidean projection onto ``{p : sum(p) = K, lo <= p_i <= hi}``.

    The minimizer is ``clip(y - lam, lo, hi)`` for the shift ``lam`` that
    meets the budget; the sum is monotone in ``lam`` so bisection finds it.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    slack = 1e-12 * max(1.0, abs(K))
    if not (n * lo - slack <= K <= n * hi + slack) or lo > hi:
        raise InfeasibleProjectionError(f"K={K} outside [{n * lo}, {n * hi}]")
    left = float(np.min(y)) - hi  # sum = n*hi
    right = float(np.max(y)) - lo  # sum = n*lo
    for _ in range(max_iter):
        mid = 0.5 * (left + right)
        total = np.clip(y - mid, lo, hi).sum()
        if total > K:
            left = mid
        else:
            right = mid
        if right - left <= tol:
            break
    p = np.clip(y - 0.5 * (left + right), lo, hi)
    # push the last rounding error of the sum onto the free coordinates
    free = (p > lo) & (p < hi)
    if free.any():
        p[free] += (K - p.sum()) / free.sum()
        p = np.clip(p, lo, hi)
    return p


@dataclass(frozen=True)
class SpsaConfig:
    iterations: int = 500
    a: float = 0.5
    A: float | None = None  # stability offset; None means 10% of iterations
    c: float = 0.05
    alpha_gain: float = 0.602
    gamma_gain: float = 0.101
    p_min: float = 0.01
    seed: int = 0

    @property
    def offset(self) -> float:
        return 0.1 * self.iterations if self.A is None else self.A

    def step(self, k: int) -> float:
        return self.a / (k + 1 + self.offset) ** self.alpha_gain

    def perturbation(self, k: int) -> float:
        return self.c / (k + 1) ** self.gamma_gain


@dataclass
class OptimizationTrace:
    iterates: list[np.ndarray] = field(default_factory=list)
    objectives: list[float] = field(default_factory=list)  # exact objective of each iterate
    best_p: np.ndarray | None = None
    best_f: float = np.inf
    evaluations: int = 0

    def record(self, p: np.ndarray, f: float) -> None:
        self.iterates.append(p.copy())
        self.objectives.append(f)
        if f < self.best_f:
            self.best_f = f
            self.best_p = p.copy()

    @property
    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(np.array(self.objectives))


def spsa_optimize(
    W: np.ndarray, K: float, p_init: np.ndarray, cfg: SpsaConfig = SpsaConfig()
) -> tuple[np.ndarray, OptimizationTrace]:
    """Projected two-sided SPSA on the capped simplex with floor ``cfg.p_min``.

    Both probes are projected before evaluation.  The returned vector is
    the best iterate seen, judged by the exact objective.
    """
    n = len(p_init)
    if not 0.0 <= cfg.p_min < K / n:
        raise ValueError(f"p_min={cfg.p_min} must lie in [0, K/N={K / n})")
    deltas = Stream(cfg.seed, "spsa")
    trace = OptimizationTrace()

    def f(p, k):
        trace.evaluations += 1
        try:
            return objective(W, p)
        except EigenConvergenceError as exc:
            raise EigenConvergenceError(f"SPSA iteration {k}: {exc}", exc.iterations) from exc

    p = project_capped_simplex(p_init, K, cfg.p_min, 1.0)
    trace.record(p, f(p, 0))
    for k in range(cfg.iterations):
        ck = cfg.perturbation(k)
        delta = deltas.rademacher(k, n)
        plus = project_capped_simplex(p + ck * delta, K, cfg.p_min, 1.0)
        minus = project_capped_simplex(p - ck * delta, K, cfg.p_min, 1.0)
        grad = (f(plus, k) - f(minus, k)) / (2.0 * ck * delta)
        p = project_capped_simplex(p - cfg.step(k) * grad, K, cfg.p_min, 1.0)
        trace.record(p, f(p, k))
    return trace.best_p.copy(), trace


def write_trace_csv(trace: OptimizationTrace, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["iteration", "objective"])
        for k, f in enumerate(trace.objectives):
            out.writerow([k, repr(float(f))])
