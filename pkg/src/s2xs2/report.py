"""The per-check result record shared by the sweep checks and the CLI."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    name: str
    anchor: str
    samples: int
    max_error: float
    tolerance: float
    wall_time_ms: float = 0.0
    note: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.max_error = float(self.max_error)
        self.passed = bool(self.max_error < self.tolerance)

    def as_dict(self, timing=True):
        d = {
            "name": self.name,
            "anchor": self.anchor,
            "samples": int(self.samples),
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "note": self.note,
        }
        if timing:
            d["wall_time_ms"] = round(self.wall_time_ms, 3)
        return d


@contextmanager
def stopwatch():
    """Yields a one-element list that holds elapsed milliseconds on exit."""
    box = [0.0]
    t0 = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = (time.perf_counter() - t0) * 1e3
