"""RunTrace: the timestamped record of a simulation run, exported as JSON lines."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

from ..canonical import canonical_dumps

KINDS = frozenset(
    {
        "transition",
        "publish",
        "step_begin",
        "step_end",
        "step_skipped",
        "adapter_in_begin",
        "adapter_in_end",
        "adapter_out_begin",
        "adapter_out_end",
        "error_change",
        "safety_change",
        "watchdog_violation",
    }
)


@dataclass(frozen=True)
class TraceRecord:
    t_us: int
    kind: str
    node: str | None
    payload: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"t_us": self.t_us, "kind": self.kind, "node": self.node, "payload": self.payload}


class TraceFormatError(ValueError):
    pass


class RunTrace:
    def __init__(self, records: Iterable[TraceRecord] = ()):
        self.records: list[TraceRecord] = list(records)

    def record(self, t_us: int, kind: str, node: str | None, /, **payload: Any) -> TraceRecord:
        if kind not in KINDS:
            raise ValueError(f"unknown trace record kind {kind!r}")
        if self.records and t_us < self.records[-1].t_us:
            # wall clock readings are monotonic, virtual time never rewinds
            raise ValueError(f"trace time went backwards: {t_us} < {self.records[-1].t_us}")
        rec = TraceRecord(t_us, kind, node, payload)
        self.records.append(rec)
        return rec

    def __iter__(self) -> Iterator[TraceRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, i: int) -> TraceRecord:
        return self.records[i]

    def of_kind(self, *kinds: str, node: str | None = None) -> list[TraceRecord]:
        return [r for r in self.records if r.kind in kinds and (node is None or r.node == node)]

    def nodes(self) -> list[str]:
        return sorted({r.node for r in self.records if r.node is not None})

    def published_values(self, topic: str) -> list[Any]:
        return [r.payload["value"] for r in self.records if r.kind == "publish" and r.payload["topic"] == topic]

    def topics(self) -> list[str]:
        return sorted({r.payload["topic"] for r in self.records if r.kind == "publish"})

    def to_jsonl(self) -> str:
        return "".join(canonical_dumps(r.to_json()) + "\n" for r in self.records)

    def write(self, path: "str | Path") -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")

    @classmethod
    def from_jsonl(cls, text: str) -> "RunTrace":
        records = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                rec = TraceRecord(int(obj["t_us"]), str(obj["kind"]), obj["node"], dict(obj["payload"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise TraceFormatError(f"line {lineno}: {exc}") from None
            if rec.kind not in KINDS:
                raise TraceFormatError(f"line {lineno}: unknown kind {rec.kind!r}")
            records.append(rec)
        return cls(records)

    @classmethod
    def load(cls, path: "str | Path") -> "RunTrace":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))
