"""Pre-compensation: estimate the limit weights and remove the consensus bias.

The product of round matrices tends to ``u alpha^T``, so a biased run
lands on ``alpha^T x(0)`` instead of the mean.  Replaying the same
schedules from ``x(0) = e_i`` reveals ``alpha_i``; dividing the initial
values by ``n * alpha_i`` then makes the replayed run finish on the mean.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import SparseMixer, StopRule, Trajectory, run_consensus
from .errors import CalibrationError, DegenerateAlphaError
from .scheduler import schedule, slots
from .streams import Stream

__all__ = [
    "AlphaWeights",
    "estimate_alpha",
    "estimate_alpha_by_columns",
    "precompensate",
    "corrected_run",
    "CorrectedRun",
    "probability_hash",
    "alpha_cache_key",
    "save_alpha",
    "load_alpha",
]

CALIBRATION_STOP = StopRule(tol=1e-12, max_rounds=100_000)


@dataclass(frozen=True)
class AlphaWeights:
    alpha: np.ndarray
    seed: int
    label: str
    rounds: int  # J, calibration rounds
    spread: float  # worst column spread at termination
    slots: int  # broadcasts actually scheduled over the J rounds

    @property
    def n(self) -> int:
        return self.alpha.size

    @property
    def separate_run_slots(self) -> int:
        """Slot cost when the n unit-vector runs are executed one after another."""
        return self.n * self.slots

    def nominal_slots(self, K: float) -> float:
        """``J * K * n``, the expected cost of n separate runs."""
        return self.rounds * K * self.n


def estimate_alpha(
    W: np.ndarray, p: np.ndarray, stream: Stream, stop: StopRule = CALIBRATION_STOP
) -> AlphaWeights:
    """Run all ``n`` unit-vector processes at once as ``M(t+1) = Wbar(t) M(t)``, ``M(0) = I``.

    Column ``i`` of ``M`` is exactly the run started from ``e_i``.  Stops
    once every column has spread below ``stop.tol``; ``alpha_i`` is the
    mean of column ``i``.
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    mixer = SparseMixer(W)
    M = np.eye(n)
    tol = stop.tol if stop.tol is not None else 0.0
    total = 0
    t = 0
    worst = float(np.max(M.max(axis=0) - M.min(axis=0)))
    while worst >= tol:
        if t >= stop.max_rounds:
            raise CalibrationError(
                f"calibration stopped at {t} rounds with column spread {worst:.3e} >= {tol:.1e}", worst
            )
        v = schedule(stream, p, t)
        M = mixer.apply(M, v)
        total += slots(v)
        t += 1
        worst = float(np.max(M.max(axis=0) - M.min(axis=0)))
    return AlphaWeights(M.mean(axis=0), stream.seed, stream.label, t, worst, total)


def estimate_alpha_by_columns(
    W: np.ndarray, p: np.ndarray, stream: Stream, rounds: int
) -> np.ndarray:
    """Reference path: ``n`` separate vector runs for a fixed number of rounds.

    Returns the final states as columns, for comparison with the matrix form.
    """
    n = len(p)
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        traj = run_consensus(W, e, p, stream, StopRule(tol=None, max_rounds=rounds))
        cols.append(traj.final)
    return np.column_stack(cols)


def precompensate(x0: np.ndarray, alpha: AlphaWeights | np.ndarray, threshold: float = 1e-12) -> np.ndarray:
    """``x_i(0) / (alpha_i * n)``."""
    a = alpha.alpha if isinstance(alpha, AlphaWeights) else np.asarray(alpha, dtype=float)
    if np.any(a <= threshold):
        bad = np.flatnonzero(a <= threshold)
        raise DegenerateAlphaError(f"alpha too small at nodes {bad[:10].tolist()} (threshold {threshold})")
    return np.asarray(x0, dtype=float) / (a * a.size)


@dataclass
class CorrectedRun:
    trajectory: Trajectory
    alpha: AlphaWeights
    x0: np.ndarray  # original, uncompensated initial values

    @property
    def target(self) -> float:
        return float(np.mean(self.x0))


def corrected_run(
    W: np.ndarray,
    x0: np.ndarray,
    p: np.ndarray,
    stream: Stream,
    stop: StopRule = StopRule(),
    calibration_stop: StopRule = CALIBRATION_STOP,
    alpha: AlphaWeights | None = None,
) -> CorrectedRun:
    """Calibrate on ``stream``, pre-compensate, then run on the same stream.

    A previously computed ``alpha`` may be passed in; it is only valid for
    the schedule stream it was calibrated on.
    """
    if alpha is None:
        alpha = estimate_alpha(W, p, stream, calibration_stop)
    xt = precompensate(x0, alpha)
    traj = run_consensus(W, xt, p, stream, stop)
    return CorrectedRun(traj, alpha, np.array(x0, dtype=float))


def probability_hash(p: np.ndarray) -> str:
    data = np.ascontiguousarray(np.asarray(p, dtype="<f8")).tobytes()
    return hashlib.sha256(data).hexdigest()[:16]


def alpha_cache_key(graph_hash: str, p: np.ndarray, seed: int, label: str) -> str:
    raw = f"{graph_hash}|{probability_hash(p)}|{seed}|{label}"
    return hashlib.sha256(raw.encode()).hexdigest()[:24]


def save_alpha(alpha: AlphaWeights, path: str | Path, graph_hash: str, p: np.ndarray) -> None:
    header = (
        f"# graph={graph_hash} p={probability_hash(p)} seed={alpha.seed} label={alpha.label} "
        f"J={alpha.rounds} spread={alpha.spread!r} slots={alpha.slots}\n"
    )
    body = "".join(f"{i} {float(a)!r}\n" for i, a in enumerate(alpha.alpha))
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(header + body)
    tmp.replace(path)


def load_alpha(path: str | Path) -> tuple[AlphaWeights, dict[str, str]]:
    """Read an alpha file; also returns the header fields (graph and p hashes)."""
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("#"):
        raise ValueError(f"{path}: missing alpha header")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    values = [float(line.split()[1]) for line in lines[1:] if line.strip()]
    alpha = AlphaWeights(
        np.array(values),
        int(meta["seed"]),
        meta["label"],
        int(meta["J"]),
        float(meta["spread"]),
        int(meta.get("slots", 0)),
    )
    return alpha, meta
