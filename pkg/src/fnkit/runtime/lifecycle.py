"""Managed lifecycle nodes that execute an adapter manifest around a platform function."""

from __future__ import annotations

from enum import Enum
from typing import Any

from ..codegen.manifest import AdapterManifest, Subscription
from .bus import Bus, Sample, UnknownTopicError
from .clock import SimClock
from .faults import ErrorStatus, evaluate_errors, evaluate_safety, initial_states, ms_to_us
from .function import PlatformFunction
from .trace import RunTrace
from .values import default_value, in_range, type_table
from .watchdog import AliveCounter, check_deadline, check_logical


class LifecycleState(str, Enum):
    UNCONFIGURED = "Unconfigured"
    INACTIVE = "Inactive"
    ACTIVE = "Active"
    FINALIZED = "Finalized"
    CONFIGURING = "Configuring"
    CLEANING_UP = "CleaningUp"
    ACTIVATING = "Activating"
    DEACTIVATING = "Deactivating"
    SHUTTING_DOWN = "ShuttingDown"
    ERROR_PROCESSING = "ErrorProcessing"


S = LifecycleState
PRIMARY_STATES = (S.UNCONFIGURED, S.INACTIVE, S.ACTIVE, S.FINALIZED)
TRANSITIONS = (S.CONFIGURING, S.CLEANING_UP, S.ACTIVATING, S.DEACTIVATING, S.SHUTTING_DOWN)

# (from, transition) -> destination on success
EDGES: dict[tuple[LifecycleState, LifecycleState], LifecycleState] = {
    (S.UNCONFIGURED, S.CONFIGURING): S.INACTIVE,
    (S.INACTIVE, S.ACTIVATING): S.ACTIVE,
    (S.ACTIVE, S.DEACTIVATING): S.INACTIVE,
    (S.INACTIVE, S.CLEANING_UP): S.UNCONFIGURED,
    (S.UNCONFIGURED, S.SHUTTING_DOWN): S.FINALIZED,
    (S.INACTIVE, S.SHUTTING_DOWN): S.FINALIZED,
    (S.ACTIVE, S.SHUTTING_DOWN): S.FINALIZED,
}


class IllegalTransition(RuntimeError):
    def __init__(self, state: LifecycleState, transition: LifecycleState):
        self.state = state
        self.transition = transition
        super().__init__(f"transition {transition.value} is not allowed from {state.value}")


class LifecycleNode:
    """One adapter instance on the bus.

    Subscriptions are registered at creation and stay inert until the node is
    Active. Incoming samples are written to local buffers immediately; the
    cyclic tick copies buffers into the function, steps it and publishes its
    outputs.
    """

    def __init__(
        self,
        manifest: AdapterManifest,
        function: PlatformFunction,
        bus: Bus,
        clock: SimClock | None = None,
        trace: RunTrace | None = None,
    ):
        self.manifest = manifest
        self.function = function
        self.bus = bus
        self.clock = clock or SimClock()
        self.trace = trace if trace is not None else (bus.trace or RunTrace())
        self.state = S.UNCONFIGURED
        self.types = type_table(manifest.datatypes)
        bus.add_types(self.types)

        for ref in [s.event.topic for s in manifest.subscriptions] + [p.event.topic for p in manifest.publications]:
            if ref not in bus:
                raise UnknownTopicError(ref)

        self._subs: dict[str, Subscription] = {s.event.topic: s for s in manifest.subscriptions}
        self.buffers: dict[str, Any] = {t: default_value(s.datatype, self.types) for t, s in self._subs.items()}
        self.received_us: dict[str, int | None] = {t: None for t in self._subs}
        self.init_values: dict[str, Any] = dict(self.buffers)
        self.activated_us = 0
        self.pending_conditions: dict[str, bool] = {}
        self.range_violations: list[tuple[int, str, Any]] = []
        self.error_states = initial_states(manifest.errors)
        self.safety_status = {r.name: False for r in manifest.safety_reactions}
        self.alive: AliveCounter | None = None
        self.last_step_end_us: int | None = None
        self.init_calls = 0
        self.terminate_calls = 0
        self.step_calls = 0
        for topic in self._subs:
            bus.subscribe(topic, self._on_sample)

    # -- identity / scheduling --------------------------------------------------

    @property
    def name(self) -> str:
        return self.manifest.component_name

    @property
    def cycle_us(self) -> int:
        return ms_to_us(self.manifest.cycle_time)

    @property
    def offset_us(self) -> int:
        return ms_to_us(self.manifest.initial_offset)

    @property
    def priority(self) -> int:
        return self.manifest.priority

    @property
    def sort_key(self) -> tuple[int, str]:
        return (self.priority, self.name)

    # -- lifecycle --------------------------------------------------------------

    def trigger(self, transition: "LifecycleState | str") -> LifecycleState:
        transition = LifecycleState(transition)
        if transition not in TRANSITIONS:
            raise IllegalTransition(self.state, transition)
        target = EDGES.get((self.state, transition))
        if target is None:
            raise IllegalTransition(self.state, transition)
        origin = self.state
        self.state = transition
        try:
            self._run_transition(transition)
        except Exception as exc:  # noqa: BLE001 - any callback failure routes through ErrorProcessing
            self._record_transition(origin, transition, S.ERROR_PROCESSING, ok=False, error=repr(exc))
            self._error_processing(transition)
            return self.state
        self.state = target
        self._record_transition(origin, transition, target, ok=True)
        return self.state

    def _record_transition(self, origin, transition, target, ok: bool, error: str | None = None) -> None:
        payload = {"from": origin.value, "transition": transition.value, "to": target.value, "ok": ok}
        if error is not None:
            payload["error"] = error
        self.trace.record(self.clock.now_us(), "transition", self.name, **payload)

    def _error_processing(self, failed: LifecycleState) -> None:
        self.state = S.ERROR_PROCESSING
        self.alive = None
        # a failed shutdown cannot be recovered; anything else falls back to
        # Unconfigured so the node can be configured again
        target = S.FINALIZED if failed is S.SHUTTING_DOWN else S.UNCONFIGURED
        self.state = target
        self.trace.record(
            self.clock.now_us(),
            "transition",
            self.name,
            **{"from": S.ERROR_PROCESSING.value, "transition": "ErrorProcessing", "to": target.value, "ok": True},
        )

    def _run_transition(self, transition: LifecycleState) -> None:
        if transition is S.CONFIGURING:
            self.init_calls += 1
            self.function.init()
            self.init_values = dict(self.buffers)
            self.error_states = initial_states(self.manifest.errors)
        elif transition is S.ACTIVATING:
            now = self.clock.now_us()
            self.activated_us = now
            self.alive = AliveCounter(self.manifest.watchdog, now)
            self.last_step_end_us = None
            for topic in self._subs:
                sample = self.bus.retained(topic)
                if sample is not None:
                    self._store(topic, sample.value, sample.t_us)
        elif transition is S.DEACTIVATING:
            self._close_alive(self.clock.now_us())
        elif transition is S.SHUTTING_DOWN:
            self._close_alive(self.clock.now_us())
            self.terminate_calls += 1
            self.function.terminate()

    # -- data path ----------------------------------------------------------------

    def _on_sample(self, sample: Sample) -> None:
        if self.state is not S.ACTIVE:
            return
        self._store(sample.topic, sample.value, sample.t_us)

    def _store(self, topic: str, value: Any, t_us: int) -> None:
        sub = self._subs[topic]
        if not in_range(value, sub.datatype, self.types):
            self.pending_conditions[self.manifest.range_error_name] = True
            self.range_violations.append((t_us, topic, value))
            if sub.range_error_action == "Default":
                value = default_value(sub.datatype, self.types)
            elif sub.range_error_action == "Init":
                value = self.init_values[topic]
        self.buffers[topic] = value
        self.received_us[topic] = t_us

    def _timeouts(self, t_us: int) -> dict[str, bool]:
        raised = {}
        for topic, sub in self._subs.items():
            if sub.timeout_value is None or sub.timeout_error is None:
                continue
            last = self.received_us[topic]
            reference = last if last is not None else self.activated_us
            if t_us - reference > ms_to_us(sub.timeout_value):
                raised[sub.timeout_error] = True
        return raised

    # -- cyclic execution -----------------------------------------------------------

    def tick(self, t_sched_us: int) -> None:
        """Run one activation: setExternalInputs -> step -> getExternalOutputs."""
        if self.state is not S.ACTIVE:
            return
        clock, trace, name = self.clock, self.trace, self.name
        clock.advance_to(t_sched_us)
        debounce = self.manifest.debounce_time
        if (
            debounce is not None
            and self.last_step_end_us is not None
            and clock.now_us() - self.last_step_end_us < ms_to_us(debounce)
        ):
            trace.record(clock.now_us(), "step_skipped", name, scheduled_us=t_sched_us, reason="debounce")
            return

        trace.record(clock.now_us(), "adapter_in_begin", name, scheduled_us=t_sched_us)
        conditions = dict(self.pending_conditions)
        self.pending_conditions = {}
        conditions.update(self._timeouts(t_sched_us))
        self.function.set_external_inputs(dict(self.buffers))
        trace.record(clock.now_us(), "adapter_in_end", name)

        violations = self.alive.close_windows(clock.now_us()) if self.alive else []
        if self.alive:
            self.alive.indicate()
        begin = clock.now_us()
        trace.record(begin, "step_begin", name)
        self.step_calls += 1
        try:
            self.function.step()
        except Exception as exc:  # noqa: BLE001 - step failures are isolated per node
            trace.record(clock.now_us(), "step_end", name, failed=True, error=repr(exc))
            self.state = S.ERROR_PROCESSING
            self._record_step_failure(exc)
            return
        end = clock.now_us()
        checkpoints = list(getattr(self.function, "checkpoints", []))
        trace.record(end, "step_end", name, checkpoints=checkpoints)
        self.last_step_end_us = end

        trace.record(clock.now_us(), "adapter_out_begin", name)
        outputs = self.function.get_external_outputs()
        for pub in self.manifest.publications:
            topic = pub.event.topic
            value = outputs[topic]
            if not in_range(value, pub.datatype, self.types):
                conditions[self.manifest.range_error_name] = True
            self.bus.publish(topic, value, clock.now_us(), publisher=name)

        wd = self.manifest.watchdog
        for v in (check_deadline(wd, end - begin, end), check_logical(wd, checkpoints, end)):
            if v is not None:
                violations.append(v)
        for v in violations:
            trace.record(clock.now_us(), "watchdog_violation", name, **v.to_json())
            conditions[v.error_name] = True
        conditions.update(getattr(self.function, "conditions", {}) or {})
        self._evaluate_faults(conditions, t_sched_us)
        trace.record(clock.now_us(), "adapter_out_end", name)

    def _record_step_failure(self, exc: Exception) -> None:
        self.trace.record(
            self.clock.now_us(),
            "transition",
            self.name,
            **{"from": S.ACTIVE.value, "transition": "ErrorProcessing", "to": S.ERROR_PROCESSING.value,
               "ok": False, "error": repr(exc)},
        )
        self._error_processing(S.ACTIVE)

    def _evaluate_faults(self, conditions: dict[str, bool], t_us: int) -> None:
        known = {k: v for k, v in conditions.items() if k in self.error_states}
        changed = evaluate_errors(self.error_states, known, t_us)
        now = self.clock.now_us()
        for err in changed:
            self.trace.record(now, "error_change", self.name, error=err, status=self.error_states[err].status.value)
        if changed:
            status = evaluate_safety(self.manifest.safety_reactions, self.error_states)
            for reaction, active in sorted(status.items()):
                if self.safety_status.get(reaction) != active:
                    self.safety_status[reaction] = active
                    self.trace.record(now, "safety_change", self.name, reaction=reaction, active=active)

    def _close_alive(self, now_us: int) -> None:
        if self.alive is None:
            return
        for v in self.alive.close_windows(now_us):
            self.trace.record(self.clock.now_us(), "watchdog_violation", self.name, **v.to_json())
        self.alive = None

    def error_status(self, name: str) -> ErrorStatus:
        return self.error_states[name].status


def create_node(
    manifest: AdapterManifest,
    function: PlatformFunction,
    bus: Bus,
    clock: SimClock | None = None,
    trace: RunTrace | None = None,
) -> LifecycleNode:
    return LifecycleNode(manifest, function, bus, clock, trace)


def trigger_transition(node: LifecycleNode, transition: "LifecycleState | str") -> LifecycleState:
    return node.trigger(transition)
