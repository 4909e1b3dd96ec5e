"""Adapter manifest: the machine-readable half of a generated function adapter."""

from __future__ import annotations

from pathlib import Path
from typing import Literal, Optional

from pydantic import Field, ValidationError, field_validator

from ..canonical import canonical_dumps
from ..function_model import (
    Datatype,
    ErrorSpec,
    ModelError,
    NamedDatatype,
    SafetyReaction,
    StrictModel,
    WatchdogSpec,
    _finish_schema,
    _schema_issues,
    json_schema_of,
    to_document,
)

ACTIVE_CYCLE = ("setExternalInputs", "step", "getExternalOutputs")


class EventRef(StrictModel):
    service: str
    event: str
    service_id: int
    event_id: int
    topic: str = Field(description="Bus topic: the event's VSS source path")


class Subscription(StrictModel):
    event: EventRef
    buffer_name: str
    datatype: Datatype
    range_error_action: Optional[Literal["Default", "Init"]] = None
    timeout_value: Optional[float] = Field(default=None, ge=0, description="milliseconds")
    timeout_error: Optional[str] = None


class Publication(StrictModel):
    event: EventRef
    buffer_name: str
    datatype: Datatype


class LifecycleBindings(StrictModel):
    configuring: Literal["init"] = "init"
    shutting_down: Literal["terminate"] = "terminate"
    active_cycle: tuple[str, str, str] = ACTIVE_CYCLE

    @field_validator("active_cycle")
    @classmethod
    def _fixed_cycle(cls, value: tuple[str, str, str]) -> tuple[str, str, str]:
        if tuple(value) != ACTIVE_CYCLE:
            raise ValueError(f"active cycle is fixed to {list(ACTIVE_CYCLE)}")
        return value


class AdapterManifest(StrictModel):
    component_name: str
    executable_name: str
    function_name: str
    cycle_time: float = Field(gt=0, description="milliseconds")
    initial_offset: float = Field(default=0, ge=0, description="milliseconds")
    priority: int = 0
    debounce_time: Optional[float] = Field(default=None, ge=0, description="milliseconds")
    subscriptions: list[Subscription]
    publications: list[Publication]
    lifecycle_bindings: LifecycleBindings = LifecycleBindings()
    watchdog: WatchdogSpec
    errors: list[ErrorSpec]
    safety_reactions: list[SafetyReaction]
    datatypes: list[NamedDatatype] = []

    @property
    def name(self) -> str:
        return self.component_name

    @property
    def range_error_name(self) -> str:
        return f"{self.function_name}_RangeError_ErrorSts"

    def dumps(self) -> str:
        return canonical_dumps(to_document(self))


def parse_manifest(text: str) -> AdapterManifest:
    try:
        return AdapterManifest.model_validate_json(text, strict=True)
    except ValidationError as exc:
        raise ModelError("schema violation", _schema_issues(exc)) from None


def load_manifest(path: "str | Path") -> AdapterManifest:
    return parse_manifest(Path(path).read_text(encoding="utf-8"))


def emit_manifest_schema() -> str:
    return _finish_schema(json_schema_of(AdapterManifest), "urn:fnkit:adapter-manifest", "AdapterManifest")
