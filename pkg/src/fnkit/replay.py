"""Signal traces: loading, replay onto the bus, and the direct-call baseline."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterator, Sequence

from .function_model import FunctionModel
from .runtime.bus import Bus
from .runtime.clock import SimClock
from .runtime.faults import ms_to_us
from .runtime.function import PlatformFunction
from .runtime.trace import RunTrace
from .runtime.values import default_value, type_table
from .signals import SignalPathError, SignalTree, parse_signal_path


class TraceLoadError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class SignalRecord:
    t_ms: float
    path: str
    value: Any

    @property
    def t_us(self) -> int:
        return ms_to_us(self.t_ms)


@dataclass(frozen=True)
class SignalTrace:
    records: tuple[SignalRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SignalRecord]:
        return iter(self.records)

    def paths(self) -> list[str]:
        return sorted({r.path for r in self.records})

    def inputs(self) -> list[tuple[int, str, Any]]:
        """(t_us, topic, value) tuples as taken by the scheduler."""
        return [(r.t_us, r.path, r.value) for r in self.records]

    @property
    def duration_ms(self) -> float:
        return self.records[-1].t_ms if self.records else 0.0


def parse_trace(text: str, catalog: SignalTree | None = None) -> SignalTrace:
    records: list[SignalRecord] = []
    last = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceLoadError(lineno, f"invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict) or set(obj) != {"t_ms", "path", "value"}:
            raise TraceLoadError(lineno, "expected an object with exactly t_ms, path and value")
        t = obj["t_ms"]
        if isinstance(t, bool) or not isinstance(t, (int, float)) or t < 0:
            raise TraceLoadError(lineno, f"t_ms must be a non-negative number, got {t!r}")
        if last is not None and t < last:
            raise TraceLoadError(lineno, f"timestamp {t} ms is earlier than {last} ms")
        if not isinstance(obj["path"], str):
            raise TraceLoadError(lineno, f"bad signal path: expected a string, got {obj['path']!r}")
        try:
            parse_signal_path(obj["path"])
        except SignalPathError as exc:
            raise TraceLoadError(lineno, f"bad signal path: {exc}") from None
        if catalog is not None and catalog.lookup(obj["path"]) is None:
            raise TraceLoadError(lineno, f"unknown signal path {obj['path']}")
        last = t
        records.append(SignalRecord(t, obj["path"], obj["value"]))
    return SignalTrace(tuple(records))


def load_trace(path: "str | Path", catalog: SignalTree | None = None) -> SignalTrace:
    return parse_trace(Path(path).read_text(encoding="utf-8"), catalog)


def replay(
    trace: SignalTrace, bus: Bus, clock: SimClock, publisher: str = "replay", start_us: int = 0
) -> int:
    """Publish every record at its timestamp; returns the publication count."""
    count = 0
    for rec in trace:
        clock.advance_to(start_us + rec.t_us)
        bus.publish(rec.path, rec.value, max(start_us + rec.t_us, clock.now_us()), publisher=publisher)
        count += 1
    return count


# --- baseline harness ----------------------------------------------------------


@dataclass
class BaselineTask:
    """What the direct-call harness needs to know about one function."""

    name: str
    cycle_us: int
    offset_us: int
    priority: int
    defaults: dict[str, Any]
    function: PlatformFunction

    @classmethod
    def from_model(cls, model: FunctionModel, function: PlatformFunction) -> "BaselineTask":
        types = type_table(model.datatypes)
        sched = model.scheduling
        return cls(
            model.name,
            ms_to_us(sched.cycle_time),
            ms_to_us(sched.initial_offset or 0),
            sched.priority or 0,
            {i.name: default_value(i.datatype, types) for i in model.consumers()},
            function,
        )

    @classmethod
    def from_manifest(cls, manifest: Any, function: PlatformFunction) -> "BaselineTask":
        types = type_table(manifest.datatypes)
        return cls(
            manifest.component_name,
            ms_to_us(manifest.cycle_time),
            ms_to_us(manifest.initial_offset),
            manifest.priority,
            {s.event.topic: default_value(s.datatype, types) for s in manifest.subscriptions},
            function,
        )


def run_baseline(tasks: Sequence[BaselineTask], trace: SignalTrace, duration_us: int) -> RunTrace:
    """Drive the functions by direct calls, with no bus, adapter or lifecycle.

    Every function sees the latest value of each consumed signal (its default
    before the first one) and steps on its own cycle grid; functions due at
    the same instant step in (priority, name) order after the inputs due at
    that instant. Outputs are recorded as ``publish`` records so the result
    can be compared with an adapter run.
    """
    out = RunTrace()
    latest: dict[str, Any] = {}
    for task in tasks:
        task.function.init()

    heap = [(t.offset_us, t.priority, t.name, i) for i, t in enumerate(tasks) if t.offset_us < duration_us]
    heapq.heapify(heap)
    records = [r for r in trace if r.t_us < duration_us]
    cursor = 0
    seq: dict[str, int] = {}

    while heap:
        now = heap[0][0]
        while cursor < len(records) and records[cursor].t_us <= now:
            latest[records[cursor].path] = records[cursor].value
            cursor += 1
        while heap and heap[0][0] == now:
            _, prio, name, idx = heapq.heappop(heap)
            task = tasks[idx]
            fn = task.function
            fn.set_external_inputs({p: latest.get(p, d) for p, d in task.defaults.items()})
            fn.step()
            for topic, value in sorted(fn.get_external_outputs().items()):
                latest[topic] = value
                seq[topic] = seq.get(topic, 0) + 1
                out.record(now, "publish", name, topic=topic, value=value, seq=seq[topic])
            following = now + task.cycle_us
            if following < duration_us:
                heapq.heappush(heap, (following, prio, name, idx))
    for task in tasks:
        task.function.terminate()
    return out


def baseline_from_models(
    models: Sequence[FunctionModel],
    factory: Callable[[str], PlatformFunction],
    trace: SignalTrace,
    duration_us: int,
    names: Sequence[str] | None = None,
) -> RunTrace:
    """Baseline over the models named in ``names`` (default: all of them)."""
    chosen = [m for m in models if names is None or m.name in names]
    return run_baseline([BaselineTask.from_model(m, factory(m.name)) for m in chosen], trace, duration_us)
