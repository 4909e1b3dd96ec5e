"""End-to-end workflow: function models -> integration model -> adapters -> simulated run."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .codegen.adapter import GeneratedArtifact, LocReport, generate_adapter, loc_report
from .codegen.manifest import AdapterManifest
from .codegen.template import TemplateSet
from .function_model import FunctionModel, parse_function_model
from .integration import ComponentTopology, IntegrationModel, PlatformDescriptor, transform
from .replay import SignalTrace
from .runtime.bus import Bus
from .runtime.clock import ClockMode, SimClock
from .runtime.function import PlatformFunction
from .runtime.lifecycle import LifecycleNode, create_node
from .runtime.scheduler import register_topics, run_lifecycle
from .runtime.trace import RunTrace

FunctionFactory = Callable[[str], PlatformFunction]


def load_function_models(paths: Sequence["str | Path"]) -> list[FunctionModel]:
    return [parse_function_model(Path(p).read_text(encoding="utf-8")) for p in paths]


def generate_all(
    model: IntegrationModel,
    components: Sequence[str],
    templates: TemplateSet | None = None,
    previous: Mapping[str, Mapping[str, str]] | None = None,
) -> dict[str, GeneratedArtifact]:
    previous = previous or {}
    return {c: generate_adapter(model, c, templates, previous.get(c)) for c in components}


def configure(
    functions: Sequence[FunctionModel],
    platform: PlatformDescriptor,
    topology: ComponentTopology,
    components: Sequence[str],
    templates: TemplateSet | None = None,
) -> tuple[IntegrationModel, dict[str, GeneratedArtifact]]:
    """transform + generate in one go."""
    integration = transform(functions, platform, topology)
    return integration, generate_all(integration, components, templates)


def loc_by_component(artifacts: Mapping[str, GeneratedArtifact]) -> dict[str, LocReport]:
    return {c: loc_report(a) for c, a in artifacts.items()}


@dataclass
class Simulation:
    bus: Bus
    clock: SimClock
    trace: RunTrace
    nodes: list[LifecycleNode]


def build_simulation(
    manifests: Sequence[AdapterManifest],
    factory: FunctionFactory,
    clock: ClockMode | SimClock = "virtual",
) -> Simulation:
    """One bus, one clock and a node per manifest, all Unconfigured."""
    trace = RunTrace()
    bus = Bus(trace=trace)
    for m in manifests:
        bus.add_types({nd.name: nd.datatype for nd in m.datatypes})
    register_topics(bus, manifests)
    clock = clock if isinstance(clock, SimClock) else SimClock(clock)
    nodes = [create_node(m, factory(m.function_name), bus, clock, trace) for m in manifests]
    return Simulation(bus, clock, trace, nodes)


def run_adapters(
    manifests: Sequence[AdapterManifest],
    factory: FunctionFactory,
    signals: SignalTrace,
    duration_us: int,
    clock: ClockMode | SimClock = "virtual",
) -> RunTrace:
    """Full lifecycle run: configure, activate, replay + schedule, deactivate, shut down."""
    sim = build_simulation(manifests, factory, clock)
    run_lifecycle(sim.nodes, sim.bus, sim.clock, duration_us, signals.inputs())
    return sim.trace
