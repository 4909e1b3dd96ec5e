"""Timing and behavior KPIs derived from run traces."""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .canonical import canonical_dumps
from .runtime.trace import RunTrace


class KpiError(ValueError):
    pass


@dataclass(frozen=True)
class Stats:
    median: int
    p95: int
    max: int
    count: int

    @classmethod
    def of(cls, samples: Sequence[int]) -> "Stats":
        if not samples:
            return cls(0, 0, 0, 0)
        ordered = sorted(samples)
        n = len(ordered)
        # lower median; nearest-rank 95th percentile
        return cls(ordered[(n - 1) // 2], ordered[math.ceil(0.95 * n) - 1], ordered[-1], n)

    def as_dict(self) -> dict[str, int]:
        return {"median": self.median, "p95": self.p95, "max": self.max, "count": self.count}


def lower_median(samples: Sequence[int]) -> int:
    return Stats.of(samples).median


@dataclass
class NodeTiming:
    """Per-tick durations in microseconds, index-aligned across the three lists."""

    t_exec: list[int] = field(default_factory=list)
    t_adapter: list[int] = field(default_factory=list)
    t_logic: list[int] = field(default_factory=list)
    failed_steps: int = 0

    def stats(self) -> dict[str, Stats]:
        return {k: Stats.of(getattr(self, k)) for k in ("t_exec", "t_adapter", "t_logic")}

    def fraction_within(self, budget_us: int) -> float:
        if not self.t_exec:
            return 1.0
        return sum(1 for d in self.t_exec if d < budget_us) / len(self.t_exec)


_SEQUENCE = ("adapter_in_begin", "adapter_in_end", "step_begin", "step_end", "adapter_out_begin", "adapter_out_end")
_TICK_KINDS = frozenset(_SEQUENCE)


def node_timings(trace: RunTrace) -> dict[str, NodeTiming]:
    """Pair the begin/end records of every tick, per node."""
    timings: dict[str, NodeTiming] = {}
    open_ticks: dict[str, list] = {}
    for i, rec in enumerate(trace):
        if rec.kind not in _TICK_KINDS:
            continue
        node = rec.node
        seen = open_ticks.setdefault(node, [])
        expected = _SEQUENCE[len(seen)]
        if rec.kind != expected:
            raise KpiError(f"record {i}: unbalanced {rec.kind} for node {node!r}, expected {expected}")
        seen.append(rec.t_us)
        timing = timings.setdefault(node, NodeTiming())
        if rec.kind == "step_end" and rec.payload.get("failed"):
            timing.failed_steps += 1
            timing.t_logic.append(seen[3] - seen[2])
            open_ticks[node] = []
        elif len(seen) == len(_SEQUENCE):
            in_b, in_e, st_b, st_e, out_b, out_e = seen
            timing.t_exec.append(out_e - in_b)
            timing.t_adapter.append((in_e - in_b) + (out_e - out_b))
            timing.t_logic.append(st_e - st_b)
            open_ticks[node] = []
    for node, seen in open_ticks.items():
        if seen:
            raise KpiError(f"node {node!r}: tick left open after {_SEQUENCE[len(seen) - 1]}")
    return timings


# --- behavior equivalence -------------------------------------------------------


def bit_equal(a: Any, b: Any) -> bool:
    """Exact equality that also tells 0.0 from -0.0 and int from float."""
    if type(a) is not type(b):
        return False
    if isinstance(a, float):
        return struct.pack("<d", a) == struct.pack("<d", b)
    if isinstance(a, list):
        return len(a) == len(b) and all(bit_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(bit_equal(a[k], b[k]) for k in a)
    return a == b


@dataclass(frozen=True)
class Divergence:
    index: int
    t_expected_us: int | None
    t_actual_us: int | None
    expected: Any
    actual: Any


@dataclass(frozen=True)
class EventComparison:
    event: str
    expected_count: int
    actual_count: int
    matched: int
    first_divergence: Divergence | None

    @property
    def ok(self) -> bool:
        return self.first_divergence is None

    def as_dict(self) -> dict[str, Any]:
        d = self.first_divergence
        return {
            "event": self.event,
            "expected_count": self.expected_count,
            "actual_count": self.actual_count,
            "matched": self.matched,
            "first_divergence": None
            if d is None
            else {
                "index": d.index,
                "t_expected_us": d.t_expected_us,
                "t_actual_us": d.t_actual_us,
                "expected": d.expected,
                "actual": d.actual,
            },
        }


@dataclass(frozen=True)
class EquivalenceReport:
    events: tuple[EventComparison, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.events)

    def as_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "events": [e.as_dict() for e in self.events]}


class MissingEventError(KpiError):
    pass


def _stream(trace: RunTrace, event: str) -> list[tuple[int, Any]]:
    return [(r.t_us, r.payload["value"]) for r in trace if r.kind == "publish" and r.payload.get("topic") == event]


def compare_behavior(expected: RunTrace, actual: RunTrace, events: Iterable[str]) -> EquivalenceReport:
    """Compare the ordered published values of each event; timestamps are ignored."""
    out = []
    for event in events:
        a, b = _stream(expected, event), _stream(actual, event)
        if not a and not b:
            raise MissingEventError(f"event {event!r} is published in neither trace")
        if not a or not b:
            which = "expected" if not a else "actual"
            raise MissingEventError(f"event {event!r} is absent from the {which} trace")
        matched, divergence = 0, None
        for i in range(max(len(a), len(b))):
            ea = a[i] if i < len(a) else (None, None)
            eb = b[i] if i < len(b) else (None, None)
            if i < len(a) and i < len(b) and bit_equal(ea[1], eb[1]):
                matched += 1
                continue
            divergence = Divergence(i, ea[0], eb[0], ea[1], eb[1])
            break
        out.append(EventComparison(event, len(a), len(b), matched, divergence))
    return EquivalenceReport(tuple(out))


# --- report -----------------------------------------------------------------------


@dataclass
class KpiReport:
    nodes: dict[str, dict[str, Stats]]
    cycle_us: dict[str, int] = field(default_factory=dict)
    within_cycle: dict[str, float] = field(default_factory=dict)
    equivalence: EquivalenceReport | None = None
    loc: dict[str, dict[str, Any]] = field(default_factory=dict)
    config_time_ms: float | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "nodes": {
                n: {k: s.as_dict() for k, s in stats.items()} for n, stats in sorted(self.nodes.items())
            },
            "cycle_us": dict(sorted(self.cycle_us.items())),
            "within_cycle": dict(sorted(self.within_cycle.items())),
            "equivalence": self.equivalence.as_dict() if self.equivalence else None,
            "loc": dict(sorted(self.loc.items())),
            "config_time_ms": self.config_time_ms,
        }

    def to_json(self) -> str:
        return canonical_dumps(self.as_dict())

    def to_text(self) -> str:
        lines = []
        header = f"{'node':<12} {'metric':<10} {'median':>8} {'p95':>8} {'max':>8} {'count':>7}"
        lines.append(header)
        lines.append("-" * len(header))
        for node, stats in sorted(self.nodes.items()):
            for metric, s in stats.items():
                lines.append(f"{node:<12} {metric:<10} {s.median:>8} {s.p95:>8} {s.max:>8} {s.count:>7}")
        lines.append("(durations in microseconds)")
        for node, frac in sorted(self.within_cycle.items()):
            lines.append(f"{node}: {frac:.2%} of ticks finished within the {self.cycle_us[node]} us cycle")
        for comp, loc in sorted(self.loc.items()):
            lines.append(
                f"{comp}: {loc['generated_loc']} generated / {loc['manual_loc']} manual lines, "
                f"fraction {loc['fraction_generated']:.3f}"
            )
        if self.config_time_ms is not None:
            lines.append(f"configuration time: {self.config_time_ms:.1f} ms")
        if self.equivalence is not None:
            for e in self.equivalence.events:
                verdict = "PASS" if e.ok else "FAIL"
                detail = f"{e.matched}/{e.expected_count} values match"
                if e.first_divergence is not None:
                    d = e.first_divergence
                    detail += f"; first divergence at #{d.index}: expected {d.expected!r}, got {d.actual!r}"
                lines.append(f"equivalence {verdict} {e.event}: {detail}")
        return "\n".join(lines)


def measure(
    trace: RunTrace,
    cycle_us: Mapping[str, int] | None = None,
    equivalence: EquivalenceReport | None = None,
) -> KpiReport:
    timings = node_timings(trace)
    cycle_us = dict(cycle_us or {})
    within = {n: timings[n].fraction_within(c) for n, c in cycle_us.items() if n in timings}
    return KpiReport(
        nodes={n: t.stats() for n, t in timings.items()},
        cycle_us={n: c for n, c in cycle_us.items() if n in timings},
        within_cycle=within,
        equivalence=equivalence,
    )
