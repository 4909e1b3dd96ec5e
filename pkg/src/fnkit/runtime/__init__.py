"""Deterministic service-oriented middleware simulator."""

from .bus import Bus, BusError, Sample, UnknownTopicError
from .clock import SimClock
from .faults import (
    ErrorState,
    ErrorStatus,
    UnknownErrorError,
    evaluate_errors,
    evaluate_safety,
    initial_states,
)
from .function import PlatformFunction
from .lifecycle import (
    EDGES,
    IllegalTransition,
    LifecycleNode,
    LifecycleState,
    create_node,
    trigger_transition,
)
from .scheduler import register_topics, run_lifecycle, run_scheduler
from .trace import KINDS, RunTrace, TraceFormatError, TraceRecord
from .watchdog import AliveCounter, Violation, supervise

__all__ = [
    "AliveCounter",
    "Bus",
    "BusError",
    "EDGES",
    "ErrorState",
    "ErrorStatus",
    "IllegalTransition",
    "KINDS",
    "LifecycleNode",
    "LifecycleState",
    "PlatformFunction",
    "RunTrace",
    "Sample",
    "SimClock",
    "TraceFormatError",
    "TraceRecord",
    "UnknownErrorError",
    "UnknownTopicError",
    "Violation",
    "create_node",
    "evaluate_errors",
    "evaluate_safety",
    "initial_states",
    "register_topics",
    "run_lifecycle",
    "run_scheduler",
    "supervise",
    "trigger_transition",
]
