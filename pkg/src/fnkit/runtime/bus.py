"""Latest-value publish/subscribe bus.

Each topic retains only its most recent sample. Delivery is synchronous: a
publication invokes every subscriber callback before ``publish`` returns.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .trace import RunTrace
from .values import NO_TYPES, TypeTable, conforms


class BusError(ValueError):
    pass


class UnknownTopicError(BusError, KeyError):
    def __str__(self) -> str:
        return f"unknown topic {self.args[0]!r}"


@dataclass(frozen=True)
class Sample:
    topic: str
    value: Any
    t_us: int
    seq: int


Callback = Callable[[Sample], None]


class Bus:
    def __init__(self, types: TypeTable = NO_TYPES, trace: RunTrace | None = None):
        self._types = dict(types)
        self._datatypes: dict[str, Any] = {}
        self._retained: dict[str, Sample] = {}
        self._seq: dict[str, int] = {}
        self._subscribers: dict[str, list[Callback]] = {}
        self._lock = threading.RLock()
        self.trace = trace

    def register(self, topic: str, datatype: Any) -> None:
        with self._lock:
            prior = self._datatypes.get(topic)
            if prior is not None and prior != datatype:
                raise BusError(f"topic {topic!r} registered with two datatypes")
            self._datatypes[topic] = datatype
            self._seq.setdefault(topic, 0)
            self._subscribers.setdefault(topic, [])

    def add_types(self, types: Mapping[str, Any]) -> None:
        self._types.update(types)

    def __contains__(self, topic: object) -> bool:
        return topic in self._datatypes

    @property
    def topics(self) -> list[str]:
        return sorted(self._datatypes)

    def datatype(self, topic: str) -> Any:
        try:
            return self._datatypes[topic]
        except KeyError:
            raise UnknownTopicError(topic) from None

    def subscribe(self, topic: str, callback: Callback) -> None:
        with self._lock:
            if topic not in self._datatypes:
                raise UnknownTopicError(topic)
            self._subscribers[topic].append(callback)

    def retained(self, topic: str) -> Sample | None:
        if topic not in self._datatypes:
            raise UnknownTopicError(topic)
        return self._retained.get(topic)

    def sequence(self, topic: str) -> int:
        if topic not in self._datatypes:
            raise UnknownTopicError(topic)
        return self._seq[topic]

    def publish(self, topic: str, value: Any, t_us: int, publisher: str | None = None) -> int:
        """Replace the retained sample and notify subscribers; returns the
        topic's new sequence number."""
        with self._lock:
            datatype = self.datatype(topic)
            if not conforms(value, datatype, self._types):
                raise BusError(f"value {value!r} does not conform to the datatype of {topic!r}")
            seq = self._seq[topic] + 1
            self._seq[topic] = seq
            sample = Sample(topic, value, t_us, seq)
            self._retained[topic] = sample
            if self.trace is not None:
                self.trace.record(t_us, "publish", publisher, topic=topic, value=value, seq=seq)
            for callback in list(self._subscribers[topic]):
                callback(sample)
            return seq
