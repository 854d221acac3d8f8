"""Speaker activity intervals and interval IoU."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class ActivityTrack:
    """Sorted, non-overlapping (start_s, end_s) intervals within a clip."""

    intervals: tuple[tuple[float, float], ...]
    total_duration_s: float

    def __post_init__(self):
        iv = tuple((float(a), float(b)) for a, b in self.intervals)
        prev_end = 0.0
        for a, b in iv:
            if a < -1e-9 or b > self.total_duration_s + 1e-9:
                raise ValueError(f"interval ({a}, {b}) outside [0, {self.total_duration_s}]")
            if b <= a:
                raise ValueError(f"empty or inverted interval ({a}, {b})")
            if a < prev_end - 1e-9:
                raise ValueError("intervals must be sorted and non-overlapping")
            prev_end = b
        object.__setattr__(self, "intervals", iv)

    @property
    def active_s(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def is_empty(self) -> bool:
        return len(self.intervals) == 0

    def to_json(self) -> str:
        return json.dumps([[a, b] for a, b in self.intervals])

    @classmethod
    def from_json(cls, text: str, total_duration_s: float) -> "ActivityTrack":
        return cls(tuple((a, b) for a, b in json.loads(text)), total_duration_s)


def _overlap(a: tuple[float, float], b: tuple[float, float]) -> float:
    return max(0.0, min(a[1], b[1]) - max(a[0], b[0]))


def pairwise_iou(a: ActivityTrack, b: ActivityTrack) -> float:
    """Intersection-over-union of active time; 0 when the union is empty."""
    if abs(a.total_duration_s - b.total_duration_s) > 1e-9:
        raise ValueError("tracks cover different durations")
    inter = sum(_overlap(ia, ib) for ia in a.intervals for ib in b.intervals)
    union = a.active_s + b.active_s - inter
    if union <= 0.0:
        return 0.0
    return inter / union
