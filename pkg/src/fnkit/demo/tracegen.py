"""Deterministic generator for the bundled 60 s drive.

The drive accelerates onto a rolling road, closes in on a slower lead vehicle
(briefly inside the minimum gap), and loses the speed signal for a short
stretch near the end so that timeouts fire.
"""

from __future__ import annotations

import math
import random
from typing import Iterator

from ..canonical import canonical_dumps
from .functions import ALTITUDE, DISTANCE, SPEED, SPEED_SET

# path -> period in ms
PERIODS = {SPEED: 20, DISTANCE: 50, SPEED_SET: 100, ALTITUDE: 100}
SPEED_DROPOUT_MS = (50_000, 50_300)


def _speed(t: float) -> float:
    if t < 15.0:
        return 110.0 * t / 15.0
    return 110.0 + 6.0 * math.sin(2 * math.pi * (t - 15.0) / 20.0)


def _set_speed(t: float) -> float:
    if t < 1.0:
        return 0.0
    if t < 25.0:
        return 100.0
    if t < 45.0:
        return 120.0
    return 90.0


def _distance(t: float) -> float:
    if t < 20.0:
        return 120.0
    if t < 40.0:
        return 120.0 - 4.5 * (t - 20.0)
    if t < 43.0:
        return 30.0 - 8.5 * (t - 40.0)
    if t < 43.5:
        return 3.5
    return min(3.5 + 6.0 * (t - 43.5), 120.0)


def _altitude(t: float) -> float:
    return 240.0 + 35.0 * math.sin(2 * math.pi * t / 40.0) + 8.0 * math.sin(2 * math.pi * t / 7.0)


_SHAPES = {SPEED: (_speed, 0.3), DISTANCE: (_distance, 0.4), SPEED_SET: (_set_speed, 0.0), ALTITUDE: (_altitude, 0.2)}
_BOUNDS = {SPEED: (0.0, 250.0), DISTANCE: (0.0, 250.0), SPEED_SET: (0.0, 250.0), ALTITUDE: (-500.0, 9000.0)}


def generate(duration_ms: int = 60_000, seed: int = 2024) -> Iterator[dict]:
    """Records ``{"t_ms", "path", "value"}`` in time order (ties by path)."""
    rng = random.Random(seed)
    events = sorted(
        (t, path) for path, period in PERIODS.items() for t in range(0, duration_ms, period)
    )
    for t, path in events:
        if path == SPEED and SPEED_DROPOUT_MS[0] <= t < SPEED_DROPOUT_MS[1]:
            continue
        shape, noise = _SHAPES[path]
        value = shape(t / 1000.0) + (rng.gauss(0.0, noise) if noise else 0.0)
        lo, hi = _BOUNDS[path]
        yield {"t_ms": t, "path": path, "value": round(min(max(value, lo), hi), 2)}


def render(duration_ms: int = 60_000, seed: int = 2024) -> str:
    return "".join(canonical_dumps(rec) + "\n" for rec in generate(duration_ms, seed))
