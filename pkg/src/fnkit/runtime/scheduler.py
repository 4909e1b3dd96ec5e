"""Cyclic scheduler driving lifecycle nodes and input replay on one clock."""

from __future__ import annotations

import heapq
from typing import Any, Iterable, Sequence

from .bus import Bus
from .clock import SimClock
from .lifecycle import LifecycleNode, LifecycleState
from .trace import RunTrace

Input = tuple[int, str, Any]  # (t_us, topic, value)


def register_topics(bus: Bus, manifests: Iterable[Any]) -> None:
    """Register every subscribed and published event of ``manifests`` on ``bus``."""
    for m in manifests:
        for s in m.subscriptions:
            bus.register(s.event.topic, s.datatype)
        for p in m.publications:
            bus.register(p.event.topic, p.datatype)


def tick_times(offset_us: int, cycle_us: int, duration_us: int) -> range:
    return range(offset_us, duration_us, cycle_us)


def run_scheduler(
    nodes: Sequence[LifecycleNode],
    bus: Bus,
    clock: SimClock,
    duration_us: int,
    inputs: Iterable[Input] = (),
    publisher: str = "replay",
    start_us: int = 0,
) -> RunTrace:
    """Run ``[start_us, start_us + duration_us)``; input times are relative to ``start_us``.

    At each instant, input publications due at or before it go out first, then
    the nodes due at it tick in (priority, name) order. Nodes that are not
    Active keep their tick grid but do nothing.
    """
    trace = bus.trace if bus.trace is not None else (nodes[0].trace if nodes else RunTrace())
    end_us = start_us + duration_us
    pending = sorted((start_us + t, i, topic, value) for i, (t, topic, value) in enumerate(inputs))
    pending = [p for p in pending if p[0] < end_us]
    cursor = 0

    # heap of (next tick, priority, name, index)
    heap = []
    for idx, node in enumerate(nodes):
        first = start_us + node.offset_us
        if first < end_us:
            heap.append((first, node.priority, node.name, idx))
    heapq.heapify(heap)

    def publish_until(t_us: int) -> None:
        nonlocal cursor
        while cursor < len(pending) and pending[cursor][0] <= t_us:
            t_in, _, topic, value = pending[cursor]
            clock.advance_to(t_in)
            bus.publish(topic, value, max(t_in, clock.now_us()), publisher=publisher)
            cursor += 1

    while heap:
        t_next = heap[0][0]
        publish_until(t_next)
        while heap and heap[0][0] == t_next:
            _, prio, name, idx = heapq.heappop(heap)
            node = nodes[idx]
            if node.state is LifecycleState.ACTIVE:
                node.tick(t_next)
            following = t_next + node.cycle_us
            if following < end_us:
                heapq.heappush(heap, (following, prio, name, idx))
    publish_until(end_us - 1)
    clock.advance_to(end_us)
    return trace


def run_lifecycle(
    nodes: Sequence[LifecycleNode],
    bus: Bus,
    clock: SimClock,
    duration_us: int,
    inputs: Iterable[Input] = (),
    publisher: str = "replay",
) -> RunTrace:
    """Configure and activate every node, run, then deactivate and shut down."""
    ordered = sorted(nodes, key=lambda n: n.sort_key)
    for node in ordered:
        node.trigger(LifecycleState.CONFIGURING)
    for node in ordered:
        if node.state is LifecycleState.INACTIVE:
            node.trigger(LifecycleState.ACTIVATING)
    start = clock.now_us()
    trace = run_scheduler(nodes, bus, clock, duration_us, inputs, publisher, start_us=start)
    for node in ordered:
        if node.state is LifecycleState.ACTIVE:
            node.trigger(LifecycleState.DEACTIVATING)
    for node in ordered:
        if node.state in (LifecycleState.UNCONFIGURED, LifecycleState.INACTIVE, LifecycleState.ACTIVE):
            node.trigger(LifecycleState.SHUTTING_DOWN)
    return trace
