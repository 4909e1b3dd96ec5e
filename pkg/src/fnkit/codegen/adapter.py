"""Function adapter generation: rendered source plus an adapter manifest."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Literal, Mapping

from .. import __version__
from ..function_model import FunctionModel, NumericalDatatype
from ..integration import Component, IntegrationModel, ServiceEvent, ServiceInterface
from ..runtime.values import default_value, resolve, type_table
from .manifest import AdapterManifest, EventRef, Publication, Subscription
from .template import TemplateSet

MANUAL_BEGIN = re.compile(r"^\s*# <<< MANUAL BEGIN: (?P<slot>[\w-]+) >>>\s*$")
MANUAL_END = re.compile(r"^\s*# <<< MANUAL END: (?P<slot>[\w-]+) >>>\s*$")
SUBSCRIBE_MARK = re.compile(r"^\s*# @subscribe (?P<topic>\S+)\s*$")
PUBLISH_MARK = re.compile(r"^\s*# @publish (?P<topic>\S+)\s*$")

Origin = Literal["generated", "manual_slot"]


class CodegenError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratedFile:
    path: str
    text: str
    origin: Origin


@dataclass
class GeneratedArtifact:
    files: list[GeneratedFile]
    manifest: AdapterManifest
    dropped_slots: list[str] = field(default_factory=list)

    def write(self, out_dir: "str | Path") -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for f in self.files:
            target = out_dir / f.path
            target.write_text(f.text, encoding="utf-8")
            written.append(target)
        manifest_path = out_dir / "adapter_manifest.json"
        manifest_path.write_text(self.manifest.dumps() + "\n", encoding="utf-8")
        written.append(manifest_path)
        return written


def default_templates() -> TemplateSet:
    root = resources.files("fnkit") / "templates" / "sim"
    found = {
        entry.name[: -len(".tmpl")]: entry.read_text(encoding="utf-8")
        for entry in root.iterdir()
        if entry.name.endswith(".tmpl")
    }
    return TemplateSet(found, platform="sim")


# --- manual slots -----------------------------------------------------------


def extract_slots(text: str) -> dict[str, list[str]]:
    """Body lines of each manual slot, keyed by slot id."""
    slots: dict[str, list[str]] = {}
    current: str | None = None
    for lineno, line in enumerate(text.splitlines(keepends=True), start=1):
        begin, end = MANUAL_BEGIN.match(line), MANUAL_END.match(line)
        if begin:
            if current is not None:
                raise CodegenError(f"line {lineno}: slot {begin['slot']!r} opened inside {current!r}")
            current = begin["slot"]
            if current in slots:
                raise CodegenError(f"line {lineno}: slot {current!r} appears twice")
            slots[current] = []
        elif end:
            if end["slot"] != current:
                raise CodegenError(f"line {lineno}: unexpected end of slot {end['slot']!r}")
            current = None
        elif current is not None:
            slots[current].append(line)
    if current is not None:
        raise CodegenError(f"slot {current!r} never closed")
    return slots


def merge_slots(fresh: str, previous: str) -> tuple[str, list[str]]:
    """Carry slot bodies from ``previous`` into ``fresh``.

    Returns the merged text and the ids of previous slots that no longer exist.
    """
    kept = extract_slots(previous)
    out: list[str] = []
    current: str | None = None
    for line in fresh.splitlines(keepends=True):
        begin, end = MANUAL_BEGIN.match(line), MANUAL_END.match(line)
        if begin:
            current = begin["slot"]
            out.append(line)
            if current in kept:
                out.extend(kept[current])
        elif end:
            current = None
            out.append(line)
        elif current is None or current not in kept:
            out.append(line)
    fresh_ids = set(extract_slots(fresh))
    return "".join(out), sorted(set(kept) - fresh_ids)


# --- generation -------------------------------------------------------------


def buffer_name(direction: str, topic: str) -> str:
    return f"{direction}_{topic.replace('.', '_')}"


def _function_of(component: Component) -> FunctionModel:
    if len(component.functions) != 1:
        raise CodegenError(
            f"component {component.name!r} has {len(component.functions)} functions; "
            "adapters bind exactly one platform function"
        )
    return component.functions[0]


def _ref(svc: ServiceInterface, ev: ServiceEvent) -> EventRef:
    return EventRef(
        service=svc.name,
        event=ev.name,
        service_id=svc.service_id,
        event_id=ev.event_id,
        topic=ev.source_path,
    )


def build_manifest(model: IntegrationModel, component: str) -> AdapterManifest:
    try:
        comp = model.component(component)
    except KeyError:
        known = ", ".join(c.name for c in model.components) or "none"
        raise CodegenError(f"unknown component {component!r} (known: {known})") from None
    fn = _function_of(comp)
    ifaces = {i.name: i for i in fn.interface_data}
    subs, pubs = [], []
    for svc in comp.service_interfaces:
        for ev in svc.events:
            iface = ifaces.get(ev.source_path)
            if svc.direction == "Required":
                subs.append(
                    Subscription(
                        event=_ref(svc, ev),
                        buffer_name=buffer_name("in", ev.source_path),
                        datatype=ev.datatype,
                        range_error_action=iface.range_error_action if iface else None,
                        timeout_value=iface.timeout_value if iface else None,
                        timeout_error=iface.timeout_error if iface else None,
                    )
                )
            else:
                pubs.append(
                    Publication(
                        event=_ref(svc, ev),
                        buffer_name=buffer_name("out", ev.source_path),
                        datatype=ev.datatype,
                    )
                )
    subs.sort(key=lambda s: s.event.topic)
    pubs.sort(key=lambda p: p.event.topic)
    sched = fn.scheduling
    return AdapterManifest(
        component_name=comp.name,
        executable_name=comp.executable_name,
        function_name=fn.name,
        cycle_time=sched.cycle_time,
        initial_offset=sched.initial_offset or 0,
        priority=sched.priority or 0,
        debounce_time=sched.debounce_time,
        subscriptions=subs,
        publications=pubs,
        watchdog=fn.effective_watchdog,
        errors=fn.errors,
        safety_reactions=fn.safety_reactions,
        datatypes=list(model.datatypes or []) + [
            d for d in fn.named_datatypes if d not in (model.datatypes or [])
        ],
    )


def _us(ms: float) -> int:
    return int(round(ms * 1000))


def _range_context(datatype: Any, types: Mapping[str, Any], replacement: str | None) -> list[dict]:
    dt = resolve(datatype, types)
    if not isinstance(dt, NumericalDatatype):
        return []
    ctx: dict[str, Any] = {"min": repr(dt.min), "max": repr(dt.max), "replace": []}
    if replacement is not None:
        ctx["replace"] = [{"value": replacement}]
    return [ctx]


def adapter_context(manifest: AdapterManifest, platform: str) -> dict[str, Any]:
    types = type_table(manifest.datatypes)
    subs = []
    timeouts = []
    for s in manifest.subscriptions:
        default = repr(default_value(s.datatype, types))
        replacement = None
        if s.range_error_action == "Default":
            replacement = default
        elif s.range_error_action == "Init":
            replacement = f"self.{s.buffer_name}_init"
        subs.append(
            {
                "topic": s.event.topic,
                "buffer": s.buffer_name,
                "default": default,
                "range": _range_context(s.datatype, types, replacement),
            }
        )
        if s.timeout_value is not None and s.timeout_error is not None:
            timeouts.append(
                {"buffer": s.buffer_name, "timeout_us": _us(s.timeout_value), "error": s.timeout_error}
            )
    pubs = [
        {
            "topic": p.event.topic,
            "buffer": p.buffer_name,
            "default": repr(default_value(p.datatype, types)),
            "range": _range_context(p.datatype, types, None),
        }
        for p in manifest.publications
    ]
    return {
        "component": manifest.component_name,
        "executable": manifest.executable_name,
        "function": manifest.function_name,
        "class_name": re.sub(r"\W", "_", manifest.component_name) + "Adapter",
        "tool_version": __version__,
        "platform": platform,
        "cycle_time_us": _us(manifest.cycle_time),
        "initial_offset_us": _us(manifest.initial_offset),
        "priority": manifest.priority,
        "range_error": manifest.range_error_name,
        "subscriptions": subs,
        "publications": pubs,
        "timeouts": timeouts,
    }


def generate_adapter(
    model: IntegrationModel,
    component: str,
    templates: TemplateSet | None = None,
    previous: Mapping[str, str] | None = None,
) -> GeneratedArtifact:
    """Render the adapter for ``component``.

    ``previous`` maps file paths to the text of an earlier generation; manual
    slot bodies found there are carried over byte for byte.
    """
    templates = templates or default_templates()
    manifest = build_manifest(model, component)
    context = adapter_context(manifest, templates.platform)
    stem = re.sub(r"[^0-9A-Za-z]+", "_", manifest.component_name).lower()
    path = f"{stem}_adapter.py"
    text = templates.render("adapter", context)
    dropped: list[str] = []
    if previous and path in previous:
        text, dropped = merge_slots(text, previous[path])
    origin: Origin = "manual_slot" if extract_slots(text) else "generated"
    return GeneratedArtifact([GeneratedFile(path, text, origin)], manifest, dropped)


def read_previous(out_dir: "str | Path") -> dict[str, str]:
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        return {}
    return {p.name: p.read_text(encoding="utf-8") for p in sorted(out_dir.glob("*.py"))}


# --- metrics and coherence ----------------------------------------------------


@dataclass(frozen=True)
class LocReport:
    generated_loc: int
    manual_loc: int

    @property
    def fraction_generated(self) -> float:
        total = self.generated_loc + self.manual_loc
        return self.generated_loc / total if total else 1.0

    def as_dict(self) -> dict[str, Any]:
        return {
            "generated_loc": self.generated_loc,
            "manual_loc": self.manual_loc,
            "fraction_generated": self.fraction_generated,
        }


def _is_code(line: str) -> bool:
    stripped = line.strip()
    return bool(stripped) and not stripped.startswith("#")


def count_loc(text: str) -> LocReport:
    generated = manual = 0
    in_slot = False
    for line in text.splitlines():
        if MANUAL_BEGIN.match(line):
            in_slot = True
        elif MANUAL_END.match(line):
            in_slot = False
        elif _is_code(line):
            if in_slot:
                manual += 1
            else:
                generated += 1
    return LocReport(generated, manual)


def loc_report(artifact: GeneratedArtifact) -> LocReport:
    """Non-blank, non-comment lines split by origin: lines inside manual slots
    count as manual, everything else as generated."""
    generated = manual = 0
    for f in artifact.files:
        r = count_loc(f.text)
        generated += r.generated_loc
        manual += r.manual_loc
    return LocReport(generated, manual)


def marked_topics(text: str) -> tuple[list[str], list[str]]:
    """Topics announced by ``# @subscribe`` / ``# @publish`` markers, in order."""
    subs, pubs = [], []
    for line in text.splitlines():
        if m := SUBSCRIBE_MARK.match(line):
            subs.append(m["topic"])
        elif m := PUBLISH_MARK.match(line):
            pubs.append(m["topic"])
    return subs, pubs
