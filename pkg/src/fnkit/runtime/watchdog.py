"""Software watchdog supervision over step executions.

The same checks run online inside the scheduler and offline over a recorded
:class:`RunTrace` via :func:`supervise`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..function_model import WatchdogSpec
from .faults import ms_to_us
from .trace import RunTrace


@dataclass(frozen=True)
class Violation:
    kind: str  # "alive" | "deadline" | "logical"
    error_name: str
    t_us: int
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "error": self.error_name, "detail": self.detail}


def check_deadline(wd: WatchdogSpec, duration_us: int, t_us: int) -> Violation | None:
    limits = wd.deadline_limits
    if "Deadline" not in wd.kinds or limits is None:
        return None
    lo, hi = ms_to_us(limits.min_duration), ms_to_us(limits.max_duration)
    if lo <= duration_us <= hi:
        return None
    return Violation(
        "deadline", limits.error_name, t_us, f"step took {duration_us} us, allowed [{lo}, {hi}] us"
    )


def check_logical(wd: WatchdogSpec, checkpoints: Sequence[str], t_us: int) -> Violation | None:
    check = wd.logical_check
    if "Logical" not in wd.kinds or check is None:
        return None
    if list(checkpoints) == list(check.expected_order):
        return None
    return Violation(
        "logical",
        check.error_name,
        t_us,
        f"checkpoints {list(checkpoints)} != expected {list(check.expected_order)}",
    )


def check_alive(wd: WatchdogSpec, count: int, t_us: int) -> Violation | None:
    limits = wd.alive_limits
    if "Alive" not in wd.kinds or limits is None:
        return None
    if limits.min_indications <= count <= limits.max_indications:
        return None
    return Violation(
        "alive",
        limits.error_name,
        t_us,
        f"{count} indications in window, allowed [{limits.min_indications}, {limits.max_indications}]",
    )


class AliveCounter:
    """Counts step executions per reference window anchored at ``start_us``."""

    def __init__(self, wd: WatchdogSpec, start_us: int):
        self.wd = wd
        self.window_us = ms_to_us(wd.alive_limits.reference_window) if wd.alive_limits else 0
        self.window_start = start_us
        self.count = 0

    def close_windows(self, now_us: int) -> list[Violation]:
        """Evaluate every window that ended at or before ``now_us``."""
        out = []
        if not self.window_us:
            return out
        while now_us >= self.window_start + self.window_us:
            end = self.window_start + self.window_us
            v = check_alive(self.wd, self.count, end)
            if v:
                out.append(v)
            self.window_start = end
            self.count = 0
        return out

    def indicate(self) -> None:
        self.count += 1


def supervise(
    watchdog: WatchdogSpec,
    trace: RunTrace,
    node: str | None = None,
    window: tuple[int, int] | None = None,
) -> list[Violation]:
    """Offline supervision of one node's steps.

    ``window`` is the analysed interval in microseconds; by default it runs from
    the node's first activation (or first step) to the last record in the trace.
    Only complete alive reference windows are judged.
    """
    records = [r for r in trace if node is None or r.node == node]
    if window is None:
        activations = [
            r.t_us for r in records if r.kind == "transition" and r.payload.get("to") == "Active"
        ]
        steps = [r.t_us for r in records if r.kind == "step_begin"]
        starts = activations or steps
        if not starts:
            return []
        window = (starts[0], trace[-1].t_us if len(trace) else starts[0])
    start, end = window

    violations: list[Violation] = []
    begin: int | None = None
    counter = AliveCounter(watchdog, start)
    for rec in records:
        if not start <= rec.t_us <= end:
            continue
        if rec.kind == "step_begin":
            violations.extend(counter.close_windows(rec.t_us))
            counter.indicate()
            begin = rec.t_us
        elif rec.kind == "step_end" and begin is not None:
            if v := check_deadline(watchdog, rec.t_us - begin, rec.t_us):
                violations.append(v)
            if v := check_logical(watchdog, rec.payload.get("checkpoints", []), rec.t_us):
                violations.append(v)
            begin = None
    violations.extend(counter.close_windows(end))
    return violations
