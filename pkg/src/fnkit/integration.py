"""Platform-bound Integration Model and the Function -> Integration transform.

Services are formed by grouping interface paths on their leading segments:
with grouping depth ``d`` the service of ``Vehicle.ADAS.ACC.Status`` is
``Vehicle_ADAS_ACC`` and its event is ``Status``. Paths with ``d`` or fewer
segments keep their last segment as the event name.
"""

from __future__ import annotations

import json
import os
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal, Mapping, Optional, Sequence

from pydantic import Field, ValidationError

from . import __version__
from .canonical import canonical_dumps, digest
from .function_model import (
    Datatype,
    FunctionModel,
    ModelError,
    NamedDatatype,
    NamedRecord,
    Parameter,
    StrictModel,
    TypeReference,
    _finish_schema,
    _schema_issues,
    iter_datatypes,
    json_schema_of,
    load_json,
    serialize_function_model,
    to_document,
)
from .report import ValidationReport
from .signals import parse_signal_path


# --- model ------------------------------------------------------------------


class PlatformDescriptor(StrictModel):
    platform_name: str = Field(min_length=1)
    serialization: Literal["binary-le", "json-lines"]
    service_grouping_depth: int = Field(ge=1)
    id_base: int = Field(ge=0)
    transport_label: str


class PlatformInfo(StrictModel):
    name: str
    serialization: Literal["binary-le", "json-lines"]
    transport_label: str


class MetaInformation(StrictModel):
    tool_version: str
    created_at: str = Field(description="RFC 3339 UTC timestamp")
    source_function_model_digests: list[str]
    platform: PlatformInfo


class ApplicationInformation(StrictModel):
    name: str = Field(min_length=1)
    description: str = ""


class ServiceEvent(StrictModel):
    name: str = Field(min_length=1)
    event_id: int = Field(ge=0)
    datatype: Datatype
    source_path: str = Field(description="VSS path the event carries")


class ServiceInterface(StrictModel):
    name: str = Field(min_length=1)
    service_id: int = Field(ge=0)
    direction: Literal["Provided", "Required"] = Field(alias="ProvidedOrRequired")
    events: list[ServiceEvent]
    methods: Optional[list[NamedRecord]] = None


class Component(StrictModel):
    name: str = Field(min_length=1)
    executable_name: str = Field(min_length=1)
    function_group_modes: list[str]
    function_list: list[FunctionModel]
    parameter_list: Optional[list[Parameter]] = None
    service_interface_list: list[ServiceInterface]

    @property
    def functions(self) -> list[FunctionModel]:
        return self.function_list

    @property
    def service_interfaces(self) -> list[ServiceInterface]:
        return self.service_interface_list


class IntegrationModel(StrictModel):
    meta: MetaInformation = Field(alias="MetaInformation")
    application: ApplicationInformation = Field(alias="ApplicationInformation")
    components: list[Component] = Field(alias="ComponentList")
    datatypes: Optional[list[NamedDatatype]] = Field(default=None, alias="DataTypes")

    def component(self, name: str) -> Component:
        for comp in self.components:
            if comp.name == name:
                return comp
        raise KeyError(name)


# --- topology ---------------------------------------------------------------


class TopologyError(ValueError):
    pass


@dataclass
class ComponentTopology:
    """function name -> component name, component name -> executable name."""

    functions: dict[str, str]
    executables: dict[str, str]
    function_group_modes: dict[str, list[str]] = field(default_factory=dict)
    application_name: str = "Application"
    application_description: str = ""

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "ComponentTopology":
        known = {"functions", "executables", "function_group_modes", "application"}
        unknown = set(data) - known
        if unknown:
            raise TopologyError(f"unknown topology members {sorted(unknown)}")
        try:
            functions = dict(data["functions"])
            executables = dict(data["executables"])
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"topology needs 'functions' and 'executables' maps ({exc})") from None
        app = data.get("application", {})
        return cls(
            functions=functions,
            executables=executables,
            function_group_modes={k: list(v) for k, v in data.get("function_group_modes", {}).items()},
            application_name=app.get("name", "Application"),
            application_description=app.get("description", ""),
        )

    @classmethod
    def load(cls, path: "str | Path") -> "ComponentTopology":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


def load_platform(path: "str | Path") -> PlatformDescriptor:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return PlatformDescriptor.model_validate_json(text, strict=True)
    except ValidationError as exc:
        raise ModelError("schema violation", _schema_issues(exc)) from None


# --- transform --------------------------------------------------------------


class TransformError(ValueError):
    pass


def service_key(path: str, depth: int) -> tuple[str, str]:
    """Split a signal path into (service group name, event name)."""
    segs = parse_signal_path(path).segments
    cut = min(depth, len(segs) - 1)
    return "_".join(segs[:cut]), "_".join(segs[cut:])


def _created_at() -> str:
    # reproducible-build convention; fixed epoch otherwise so output is a pure
    # function of the inputs
    epoch = int(os.environ.get("SOURCE_DATE_EPOCH", "0"))
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class _Binding:
    component: str
    service: str
    event: str
    path: str
    datatype: Any
    direction: str


def transform(
    functions: Sequence[FunctionModel],
    platform: PlatformDescriptor,
    topology: ComponentTopology,
    *,
    created_at: str | None = None,
) -> IntegrationModel:
    """Bind function models to components and derive service interfaces.

    Each Provider leaf becomes one Provided event on its owning component and
    each Consumer leaf one Required event on the consuming component. When a
    service group is provided by more than one component the group is split
    per provider, suffixing the service name with the providing component.
    """
    by_name: dict[str, FunctionModel] = {}
    for fn in functions:
        if fn.name in by_name:
            raise TransformError(f"duplicate function {fn.name!r}")
        by_name[fn.name] = fn
    for name in sorted(by_name):
        if name not in topology.functions:
            raise TransformError(f"unassigned function {name!r}")
    for name, comp in sorted(topology.functions.items()):
        if name not in by_name:
            raise TransformError(f"topology assigns unknown function {name!r}")
        if comp not in topology.executables or not topology.executables[comp]:
            raise TransformError(f"component {comp!r} has no executable")

    depth = platform.service_grouping_depth

    provider_of: dict[str, tuple[str, str]] = {}  # path -> (function, component)
    for fname in sorted(by_name):
        comp = topology.functions[fname]
        for iface in by_name[fname].providers():
            if iface.name in provider_of:
                raise TransformError(
                    f"two providers for {iface.name}: {provider_of[iface.name][0]} and {fname}"
                )
            provider_of[iface.name] = (fname, comp)

    group_providers: dict[str, set[str]] = defaultdict(set)
    for path, (_, comp) in provider_of.items():
        group_providers[service_key(path, depth)[0]].add(comp)

    def service_name(group: str, provider: str | None) -> str:
        owners = group_providers.get(group, set())
        if provider is None:
            return group if not owners else f"{group}_Unbound"
        return group if len(owners) == 1 else f"{group}_{provider}"

    bindings: list[_Binding] = []
    for fname in sorted(by_name):
        comp = topology.functions[fname]
        for iface in by_name[fname].interface_data:
            group, event = service_key(iface.name, depth)
            if iface.role == "Provider":
                svc = service_name(group, comp)
                direction = "Provided"
            else:
                owner = provider_of.get(iface.name)
                svc = service_name(group, owner[1] if owner else None)
                direction = "Required"
            bindings.append(_Binding(comp, svc, event, iface.name, iface.datatype, direction))

    service_names = sorted({b.service for b in bindings})
    service_ids = {name: platform.id_base + i for i, name in enumerate(service_names)}
    events_of: dict[str, list[str]] = defaultdict(list)
    for b in bindings:
        if b.event not in events_of[b.service]:
            events_of[b.service].append(b.event)
    event_ids = {
        (svc, ev): i + 1 for svc, evs in events_of.items() for i, ev in enumerate(sorted(evs))
    }

    components: list[Component] = []
    for comp in sorted(set(topology.functions.values())):
        fns = [by_name[f] for f in sorted(by_name) if topology.functions[f] == comp]
        grouped: dict[tuple[str, str], list[_Binding]] = defaultdict(list)
        for b in bindings:
            if b.component == comp:
                grouped[(b.service, b.direction)].append(b)
        interfaces = [
            ServiceInterface(
                name=svc,
                service_id=service_ids[svc],
                direction=direction,
                events=[
                    ServiceEvent(
                        name=b.event,
                        event_id=event_ids[(svc, b.event)],
                        datatype=b.datatype,
                        source_path=b.path,
                    )
                    for b in sorted(items, key=lambda b: b.event)
                ],
            )
            for (svc, direction), items in sorted(grouped.items())
        ]
        params = [p for fn in fns for p in fn.parameters]
        components.append(
            Component(
                name=comp,
                executable_name=topology.executables[comp],
                function_group_modes=topology.function_group_modes.get(comp, []),
                function_list=fns,
                parameter_list=params or None,
                service_interface_list=interfaces,
            )
        )

    datatypes: dict[str, NamedDatatype] = {}
    for fname in sorted(by_name):
        for nd in by_name[fname].named_datatypes:
            prior = datatypes.get(nd.name)
            if prior is not None and prior != nd:
                raise TransformError(f"conflicting definitions of datatype {nd.name!r}")
            datatypes[nd.name] = nd

    return IntegrationModel(
        meta=MetaInformation(
            tool_version=__version__,
            created_at=created_at or _created_at(),
            source_function_model_digests=[
                digest(serialize_function_model(by_name[f])) for f in sorted(by_name)
            ],
            platform=PlatformInfo(
                name=platform.platform_name,
                serialization=platform.serialization,
                transport_label=platform.transport_label,
            ),
        ),
        application=ApplicationInformation(
            name=topology.application_name, description=topology.application_description
        ),
        components=components,
        datatypes=[datatypes[k] for k in sorted(datatypes)] or None,
    )


# --- validation, counting, IO ------------------------------------------------


def validate_integration(model: IntegrationModel) -> ValidationReport:
    report = ValidationReport()
    id_of: dict[str, int] = {}
    name_of: dict[int, str] = {}
    provided: dict[tuple[str, str], tuple[int, str, str]] = {}  # (svc, event) -> (id, path, comp)
    required: list[tuple[str, ServiceInterface, ServiceEvent, str]] = []
    type_names = {d.name for d in model.datatypes or []}

    for ci, comp in enumerate(model.components):
        cwhere = f"ComponentList[{ci}]"
        if not comp.executable_name.strip():
            report.error(f"{cwhere}.ExecutableName", "executable name is blank")
        seen_entries: set[tuple[str, str]] = set()
        for si, svc in enumerate(comp.service_interfaces):
            where = f"{cwhere}.ServiceInterfaceList[{si}]"
            if (svc.name, svc.direction) in seen_entries:
                report.error(where, f"service {svc.name} listed twice as {svc.direction}")
            seen_entries.add((svc.name, svc.direction))
            if id_of.setdefault(svc.name, svc.service_id) != svc.service_id:
                report.error(where, f"service {svc.name} has conflicting ids {id_of[svc.name]} and {svc.service_id}")
            if name_of.setdefault(svc.service_id, svc.name) != svc.name:
                report.error(where, f"duplicate service_id {svc.service_id} ({name_of[svc.service_id]}, {svc.name})")
            names = [e.name for e in svc.events]
            for dup in sorted({n for n in names if names.count(n) > 1}):
                report.error(where, f"duplicate event name {dup!r}")
            for ei, ev in enumerate(svc.events):
                for path, dt in iter_datatypes(ev.datatype, f"{where}.Events[{ei}].Datatype"):
                    if isinstance(dt, TypeReference) and dt.name not in type_names:
                        report.error(path, f"unresolved type reference {dt.name!r}")
                if svc.direction == "Provided":
                    key = (svc.name, ev.name)
                    if key in provided:
                        report.error(where, f"event {svc.name}.{ev.name} provided twice")
                    provided[key] = (ev.event_id, ev.source_path, comp.name)
                else:
                    required.append((where, svc, ev, comp.name))

        # consumer/provider closure against the component's own functions
        bound = defaultdict(int)
        for svc in comp.service_interfaces:
            for ev in svc.events:
                bound[(ev.source_path, svc.direction)] += 1
        for fn in comp.functions:
            for iface in fn.interface_data:
                direction = "Provided" if iface.role == "Provider" else "Required"
                n = bound.get((iface.name, direction), 0)
                if n != 1:
                    report.error(
                        cwhere,
                        f"{iface.role} {iface.name} of {fn.name} has {n} {direction} bindings (expected 1)",
                    )

    for where, svc, ev, comp in required:
        match = provided.get((svc.name, ev.name))
        if match is None:
            report.error(where, f"required event {svc.name}.{ev.name} ({ev.source_path}) has no provider")
            continue
        if match[0] != ev.event_id:
            report.error(where, f"event id of {svc.name}.{ev.name} differs from provider ({match[0]})")
        if match[1] != ev.source_path:
            report.error(where, f"event {svc.name}.{ev.name} maps {ev.source_path}, provider maps {match[1]}")
    return report


@dataclass(frozen=True)
class EntityCounts:
    executables: int
    services: int
    events: int

    def as_dict(self) -> dict[str, int]:
        return {"executables": self.executables, "services": self.services, "events": self.events}


def count_entities(model: IntegrationModel) -> EntityCounts:
    """Unique executables, service interface bindings and event bindings.

    A service a component provides and another requires counts once per
    binding, so event totals equal the number of interface leaves.
    """
    executables = {c.executable_name for c in model.components}
    services = {(c.name, s.name, s.direction) for c in model.components for s in c.service_interfaces}
    events = sum(len(s.events) for c in model.components for s in c.service_interfaces)
    return EntityCounts(len(executables), len(services), events)


def parse_integration_model(json_text: str) -> IntegrationModel:
    load_json(json_text)
    try:
        return IntegrationModel.model_validate_json(json_text, strict=True)
    except ValidationError as exc:
        raise ModelError("schema violation", _schema_issues(exc)) from None


def serialize_integration_model(model: IntegrationModel) -> str:
    return canonical_dumps(to_document(model))


def emit_integration_schema() -> str:
    return _finish_schema(json_schema_of(IntegrationModel), "urn:fnkit:integration-model", "Integration")


def events_by_path(model: IntegrationModel) -> dict[str, ServiceEvent]:
    out: dict[str, ServiceEvent] = {}
    for comp in model.components:
        for svc in comp.service_interfaces:
            for ev in svc.events:
                out.setdefault(ev.source_path, ev)
    return out


__all__ = [
    "ComponentTopology",
    "EntityCounts",
    "IntegrationModel",
    "PlatformDescriptor",
    "ServiceEvent",
    "ServiceInterface",
    "TopologyError",
    "TransformError",
    "count_entities",
    "emit_integration_schema",
    "events_by_path",
    "load_platform",
    "parse_integration_model",
    "serialize_integration_model",
    "service_key",
    "transform",
    "validate_integration",
]
