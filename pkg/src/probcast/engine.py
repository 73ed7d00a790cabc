"""Consensus runs under probabilistic broadcast scheduling, and their metrics."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import NumericalFailure
from .scheduler import schedule, slots
from .streams import Stream

__all__ = [
    "StopRule",
    "Trajectory",
    "MetricsRow",
    "SparseMixer",
    "run_consensus",
    "dense_run",
    "spread",
    "stddev",
    "rmse",
    "metrics_series",
    "aggregate",
    "slots_to_threshold",
    "write_metrics_csv",
    "write_aggregate_csv",
]

CONVERGED = "converged"
ITERATION_CAP = "iteration-cap"
SLOT_BUDGET = "slot-budget"


@dataclass(frozen=True)
class StopRule:
    """Stop when the spread drops below ``tol``, or at a round / slot cap."""

    tol: float | None = 1e-8
    max_rounds: int = 10_000
    max_slots: int | None = None


@dataclass
class Trajectory:
    states: np.ndarray  # (rounds + 1, n); row 0 is x(0)
    round_slots: np.ndarray  # (rounds,) broadcasts in each round
    status: str

    @property
    def rounds(self) -> int:
        return len(self.round_slots)

    @property
    def cumulative_slots(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.round_slots)])

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


class MetricsRow(NamedTuple):
    cumulative_slots: int
    stddev: float
    rmse: float


class SparseMixer:
    """Applies the compensated update of one round without forming the matrix.

    Row ``i`` becomes ``x_i + sum_j w_ij v_j (x_j - x_i)``, which is the
    product with the round matrix.  Neighbours are visited in a fixed
    padded order, so a matrix of stacked columns is updated with exactly
    the same floating-point operations as each column on its own.
    """

    def __init__(self, W: np.ndarray):
        W = np.asarray(W, dtype=float)
        n = W.shape[0]
        off = W.copy()
        np.fill_diagonal(off, 0.0)
        rows = [np.flatnonzero(off[i]) for i in range(n)]
        width = max((len(r) for r in rows), default=0)
        self.n = n
        self.nbr = np.tile(np.arange(n)[:, None], (1, width))
        self.w = np.zeros((n, width))
        for i, r in enumerate(rows):
            self.nbr[i, : len(r)] = r
            self.w[i, : len(r)] = off[i, r]

    def apply(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        if x.ndim == 1:
            acc = np.zeros_like(x)
            for k in range(self.w.shape[1]):
                j = self.nbr[:, k]
                acc += (self.w[:, k] * v[j]) * (x[j] - x)
        else:
            acc = np.zeros_like(x)
            for k in range(self.w.shape[1]):
                j = self.nbr[:, k]
                acc += (self.w[:, k] * v[j])[:, None] * (x[j] - x)
        return x + acc


def spread(x: np.ndarray) -> float:
    return float(np.max(x) - np.min(x))


def stddev(x: np.ndarray) -> float:
    """Population standard deviation around the current mean."""
    return float(np.sqrt(np.mean((x - np.mean(x)) ** 2)))


def rmse(x: np.ndarray, target: float) -> float:
    return float(np.sqrt(np.mean((np.asarray(x) - target) ** 2)))


def run_consensus(
    W: np.ndarray,
    x0: np.ndarray,
    p: np.ndarray,
    stream: Stream,
    stop: StopRule = StopRule(),
    mixer: SparseMixer | None = None,
) -> Trajectory:
    """Iterate ``x(t+1) = Wbar(t) x(t)`` with round ``t`` scheduled by ``stream``."""
    mixer = mixer or SparseMixer(W)
    x = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NumericalFailure("non-finite initial state", 0)
    p = np.asarray(p, dtype=float)
    states = [x]
    used = []
    total = 0
    status = ITERATION_CAP
    for t in range(stop.max_rounds + 1):
        if stop.tol is not None and spread(x) < stop.tol:
            status = CONVERGED
            break
        if t == stop.max_rounds:
            break
        if stop.max_slots is not None and total >= stop.max_slots:
            status = SLOT_BUDGET
            break
        v = schedule(stream, p, t)
        x = mixer.apply(x, v)
        if not np.all(np.isfinite(x)):
            raise NumericalFailure(f"non-finite state after round {t}", t)
        k = slots(v)
        total += k
        used.append(k)
        states.append(x)
    return Trajectory(np.array(states), np.array(used, dtype=np.int64), status)


def dense_run(W: np.ndarray, x0: np.ndarray, p: np.ndarray, stream: Stream, rounds: int) -> np.ndarray:
    """Reference path: explicit round matrices, ``rounds`` steps, all states returned."""
    from .mixing import round_matrix

    xs = [np.array(x0, dtype=float)]
    for t in range(rounds):
        xs.append(round_matrix(W, schedule(stream, p, t)) @ xs[-1])
    return np.array(xs)


def metrics_series(traj: Trajectory, target: float) -> list[MetricsRow]:
    cum = traj.cumulative_slots
    return [MetricsRow(int(c), stddev(x), rmse(x, target)) for c, x in zip(cum, traj.states)]


def aggregate(runs: Sequence[Sequence[MetricsRow]], grid: Sequence[int] | None = None) -> list[MetricsRow]:
    """Average several metric series on common slot checkpoints.

    Cumulative slots differ between realizations, so each series is
    sampled at its last row not beyond the checkpoint.
    """
    if not runs:
        raise ValueError("aggregate needs at least one series")
    if grid is None:
        grid = sorted({r.cumulative_slots for run in runs for r in run})
    grid = np.asarray(grid, dtype=np.int64)
    sd = np.zeros(grid.size)
    er = np.zeros(grid.size)
    for run in runs:
        cum = np.array([r.cumulative_slots for r in run])
        idx = np.searchsorted(cum, grid, side="right") - 1
        idx = np.clip(idx, 0, None)
        sd += np.array([r.stddev for r in run])[idx]
        er += np.array([r.rmse for r in run])[idx]
    m = len(runs)
    return [MetricsRow(int(g), float(s / m), float(e / m)) for g, s, e in zip(grid, sd, er)]


def slots_to_threshold(series: Sequence[MetricsRow], threshold: float) -> float:
    """First cumulative slot count with stddev below ``threshold`` (inf if never)."""
    for row in series:
        if row.stddev < threshold:
            return float(row.cumulative_slots)
    return float("inf")


def write_metrics_csv(series_by_realization: Sequence[Sequence[MetricsRow]], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["realization", "round", "cumulative_slots", "stddev", "rmse"])
        for r, series in enumerate(series_by_realization):
            for t, row in enumerate(series):
                out.writerow([r, t, row.cumulative_slots, repr(float(row.stddev)), repr(float(row.rmse))])


def write_aggregate_csv(series: Sequence[MetricsRow], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["cumulative_slots", "mean_stddev", "mean_rmse"])
        for row in series:
            out.writerow([row.cumulative_slots, repr(float(row.stddev)), repr(float(row.rmse))])
