"""Per-round broadcast schedules and transmission-slot accounting."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np

from .streams import Stream

__all__ = ["ScheduleStream", "schedule", "slots", "write_schedule_log"]


class ScheduleStream(Stream):
    """Stream whose block ``t`` decides who broadcasts in round ``t``."""

    def __init__(self, seed: int, label: str = "schedule"):
        super().__init__(seed, label)


def schedule(stream: Stream, p: np.ndarray, t: int) -> np.ndarray:
    """Independent Bernoulli(p_i) broadcast indicators for round ``t`` (int8 0/1)."""
    p = np.asarray(p, dtype=float)
    return (stream.uniform(t, p.size) < p).astype(np.int8)


def slots(v: np.ndarray) -> int:
    return int(np.sum(v))


def write_schedule_log(stream: Stream, p: np.ndarray, rounds: Iterable[int], path: str | Path) -> None:
    """Audit log: one ``t: bitstring`` line per round."""
    with open(path, "w") as fh:
        for t in rounds:
            fh.write(f"{t}: {''.join(map(str, schedule(stream, p, t)))}\n")
