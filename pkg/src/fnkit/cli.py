"""Command-line entry point: validate, schema, transform, generate, run, kpi, demo.

Exit codes: 0 success, 1 findings or model/behavior errors, 2 I/O problems.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from collections import Counter
from pathlib import Path
from typing import Any, Sequence

from . import demo
from .canonical import canonical_dumps
from .codegen import (
    CodegenError,
    TemplateError,
    TemplateSet,
    default_templates,
    emit_manifest_schema,
    generate_adapter,
    load_manifest,
    loc_report,
    read_previous,
)
from .function_model import ModelError, emit_function_schema, parse_function_model, validate_function_model
from .integration import (
    ComponentTopology,
    TopologyError,
    TransformError,
    count_entities,
    emit_integration_schema,
    load_platform,
    parse_integration_model,
    serialize_integration_model,
    transform,
    validate_integration,
)
from .kpi import KpiError, compare_behavior, measure
from .replay import BaselineTask, TraceLoadError, load_trace, run_baseline
from .report import Finding
from .runtime.bus import BusError
from .runtime.trace import RunTrace, TraceFormatError
from .signals import CatalogError, SignalTree, check_catalog_conformance, load_catalog
from .workflow import run_adapters

EXIT_OK, EXIT_FINDINGS, EXIT_IO = 0, 1, 2

# errors that describe bad content rather than unreadable files
CONTENT_ERRORS = (
    ModelError,
    TransformError,
    TopologyError,
    CodegenError,
    TemplateError,
    TraceLoadError,
    TraceFormatError,
    KpiError,
    CatalogError,
    BusError,
    KeyError,
    json.JSONDecodeError,
)


class Output:
    def __init__(self, fmt: str):
        self.fmt = fmt

    def emit(self, text: str, data: Any) -> None:
        if self.fmt == "json":
            print(canonical_dumps(data))
        elif text:
            print(text)


def _seconds_to_us(s: float) -> int:
    return int(round(s * 1_000_000))


# --- validate -----------------------------------------------------------------


def detect_kind(data: Any) -> str:
    return "integration" if isinstance(data, dict) and "MetaInformation" in data else "function"


def validate_text(text: str, catalog: SignalTree | None = None, kind: str = "auto") -> list[Finding]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        return [Finding("error", f"line {exc.lineno} col {exc.colno}", f"json syntax error: {exc.msg}")]
    if kind == "auto":
        kind = detect_kind(data)
    try:
        if kind == "integration":
            report = validate_integration(parse_integration_model(text))
        else:
            model = parse_function_model(text)
            report = validate_function_model(model)
            if catalog is not None:
                report.extend(check_catalog_conformance(model, catalog))
    except ModelError as exc:
        return [Finding("error", path, f"{exc.kind}: {msg}") for path, msg in exc.issues]
    return list(report)


def cmd_validate(args: argparse.Namespace, out: Output) -> int:
    catalog = load_catalog(Path(args.catalog)) if args.catalog else None
    rows, failed = [], False
    for path in args.paths:
        text = Path(path).read_text(encoding="utf-8")
        for f in validate_text(text, catalog, args.kind):
            failed |= f.severity == "error"
            rows.append({"file": str(path), "severity": f.severity, "path": f.path or "$", "message": f.message})
    text = "\n".join(f"{r['severity']} {r['file']}:{r['path']} {r['message']}" for r in rows)
    out.emit(text, {"ok": not failed, "findings": rows})
    return EXIT_FINDINGS if failed else EXIT_OK


# --- schema -------------------------------------------------------------------

SCHEMAS = {
    "function": emit_function_schema,
    "integration": emit_integration_schema,
    "manifest": emit_manifest_schema,
}


def cmd_schema(args: argparse.Namespace, out: Output) -> int:
    schema = SCHEMAS[args.kind]()
    if args.out:
        Path(args.out).write_text(schema + "\n", encoding="utf-8")
        out.emit(f"wrote {args.out}", {"kind": args.kind, "out": args.out})
    else:
        print(schema)
    return EXIT_OK


# --- transform ----------------------------------------------------------------


def run_transform(function_paths: Sequence[str], platform: str, topology: str, out_path: str | None):
    models, findings = [], []
    for p in function_paths:
        model = parse_function_model(Path(p).read_text(encoding="utf-8"))
        findings += [(str(p), f) for f in validate_function_model(model).errors]
        models.append(model)
    if findings:
        return None, findings
    integration = transform(models, load_platform(platform), ComponentTopology.load(topology))
    findings = [("<integration>", f) for f in validate_integration(integration).errors]
    if out_path and not findings:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(serialize_integration_model(integration) + "\n", encoding="utf-8")
    return integration, findings


def cmd_transform(args: argparse.Namespace, out: Output) -> int:
    integration, findings = run_transform(args.functions, args.platform, args.topology, args.out)
    if findings:
        lines = [f"{f.severity} {src}:{f.path or '$'} {f.message}" for src, f in findings]
        out.emit("\n".join(lines), {"ok": False, "findings": [dict(file=s, **vars(f)) for s, f in findings]})
        return EXIT_FINDINGS
    counts = count_entities(integration)
    out.emit(
        f"{counts.executables} executables, {counts.services} services, {counts.events} events"
        + (f" -> {args.out}" if args.out else ""),
        {"ok": True, "out": args.out, **vars(counts)},
    )
    return EXIT_OK


# --- generate -----------------------------------------------------------------


def resolve_templates(option: str | None) -> TemplateSet:
    directory = option or os.environ.get("FNKIT_TEMPLATES")
    if directory:
        if not Path(directory).is_dir():
            raise FileNotFoundError(f"template directory {directory} not found")
        return TemplateSet.load(directory)
    return default_templates()


def run_generate(integration_path: str, components: Sequence[str] | None, templates: TemplateSet, out_dir: str):
    model = parse_integration_model(Path(integration_path).read_text(encoding="utf-8"))
    if not components:
        components = [c.name for c in model.components if len(c.functions) == 1]
    results = {}
    for comp in components:
        target = Path(out_dir) / comp
        artifact = generate_adapter(model, comp, templates, read_previous(target))
        artifact.write(target)
        results[comp] = (artifact, loc_report(artifact))
    return results


def cmd_generate(args: argparse.Namespace, out: Output) -> int:
    results = run_generate(args.integration, args.component, resolve_templates(args.templates), args.out)
    lines, data = [], {}
    for comp, (artifact, loc) in results.items():
        lines.append(
            f"{comp}: {loc.generated_loc} generated + {loc.manual_loc} manual lines, "
            f"fraction_generated {loc.fraction_generated:.3f} -> {Path(args.out) / comp}"
        )
        for slot in artifact.dropped_slots:
            lines.append(f"warning {comp}: manual slot {slot!r} no longer exists and was dropped")
        data[comp] = {**loc.as_dict(), "dropped_slots": artifact.dropped_slots}
    out.emit("\n".join(lines), data)
    return EXIT_OK


# --- run ----------------------------------------------------------------------


def manifest_paths(items: Sequence[str]) -> list[Path]:
    paths: list[Path] = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            found = sorted(p.rglob("adapter_manifest.json"))
            if not found:
                raise FileNotFoundError(f"no adapter_manifest.json under {p}")
            paths += found
        else:
            if not p.is_file():
                raise FileNotFoundError(f"manifest {p} not found")
            paths.append(p)
    return paths


def run_once(
    manifests: Sequence[Any], trace_path: str, duration_s: float, clock: str, harness: str, catalog: str | None
) -> RunTrace:
    signals = load_trace(trace_path, load_catalog(Path(catalog)) if catalog else None)
    duration = _seconds_to_us(duration_s)
    if harness == "baseline":
        tasks = [BaselineTask.from_manifest(m, demo.make_function(m.function_name)) for m in manifests]
        return run_baseline(tasks, signals, duration)
    return run_adapters(manifests, demo.make_function, signals, duration, clock)


def step_counts(trace: RunTrace) -> dict[str, int]:
    return dict(sorted(Counter(r.node for r in trace.of_kind("step_begin")).items()))


def split_replayed(manifests: Sequence[Any]) -> tuple[list[Any], list[str]]:
    """Functions without a bundled implementation are fed from the trace instead."""
    runnable = [m for m in manifests if m.function_name in demo.DEMO_FUNCTIONS]
    skipped = sorted(m.component_name for m in manifests if m.function_name not in demo.DEMO_FUNCTIONS)
    return runnable, skipped


def cmd_run(args: argparse.Namespace, out: Output) -> int:
    manifests, skipped = split_replayed([load_manifest(p) for p in manifest_paths(args.manifests)])
    if not manifests:
        raise KeyError(f"none of the manifests has a bundled implementation (skipped {', '.join(skipped)})")
    started = time.perf_counter()
    trace = run_once(manifests, args.trace, args.duration, args.clock, args.harness, args.catalog)
    elapsed = time.perf_counter() - started
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        trace.write(args.out)
    steps = step_counts(trace)
    publishes = len(trace.of_kind("publish"))
    text = (
        f"{args.harness} run over {args.duration:g} s ({args.clock} clock) took {elapsed:.2f} s: "
        f"{len(trace)} records, {publishes} publications"
    )
    if steps and args.harness == "adapter":
        text += ", steps " + ", ".join(f"{n}={c}" for n, c in sorted(steps.items()))
    if skipped:
        text += f"; skipped {', '.join(skipped)} (no implementation, events come from the trace)"
    if args.out:
        text += f" -> {args.out}"
    out.emit(
        text, {"records": len(trace), "publications": publishes, "steps": steps, "skipped": skipped, "out": args.out}
    )
    return EXIT_OK


# --- kpi ----------------------------------------------------------------------


def infer_cycles(trace: RunTrace) -> dict[str, int]:
    """Cycle time per node from the spacing of its scheduled ticks."""
    scheduled: dict[str, list[int]] = {}
    for r in trace.of_kind("adapter_in_begin"):
        scheduled.setdefault(r.node, []).append(r.payload["scheduled_us"])
    out = {}
    for node, times in scheduled.items():
        gaps = [b - a for a, b in zip(times, times[1:]) if b > a]
        if gaps:
            out[node] = min(gaps)
    return out


def cmd_kpi(args: argparse.Namespace, out: Output) -> int:
    baseline = RunTrace.load(args.baseline) if args.baseline else None
    status, texts, data = EXIT_OK, [], []
    for path in args.run:
        trace = RunTrace.load(path)
        equivalence = None
        if baseline is not None:
            events = args.events or baseline.topics()
            equivalence = compare_behavior(baseline, trace, events)
            if not equivalence.ok:
                status = EXIT_FINDINGS
        report = measure(trace, infer_cycles(trace), equivalence)
        texts.append(f"== {path}\n{report.to_text()}")
        data.append({"run": str(path), **report.as_dict()})
    out.emit("\n".join(texts), data if len(data) > 1 else data[0])
    return status


# --- demo ---------------------------------------------------------------------


def run_demo(out_dir: Path, duration_s: float = 60.0) -> dict[str, Any]:
    catalog = load_catalog(demo.data_file("catalog.json"))
    findings = []
    for path in demo.function_files():
        findings += [f for f in validate_text(path.read_text(encoding="utf-8"), catalog) if f.severity == "error"]

    integration_path = out_dir / "integration.json"
    t0 = time.perf_counter()
    integration, tf_findings = run_transform(
        [str(p) for p in demo.function_files()],
        str(demo.data_file("platform.json")),
        str(demo.data_file("topology.json")),
        str(integration_path),
    )
    findings += [f for _, f in tf_findings]
    generated = run_generate(str(integration_path), demo.ADAPTED_COMPONENTS, default_templates(), str(out_dir / "generated"))
    config_ms = (time.perf_counter() - t0) * 1000

    manifests = [a.manifest for a, _ in generated.values()]
    trace_path = str(demo.data_file(demo.TRACE_FILE))
    adapter = run_once(manifests, trace_path, duration_s, "virtual", "adapter", None)
    baseline = run_once(manifests, trace_path, duration_s, "virtual", "baseline", None)
    adapter.write(out_dir / "run_adapter.jsonl")
    baseline.write(out_dir / "run_baseline.jsonl")
    equivalence = compare_behavior(baseline, adapter, demo.ACC_EVENTS)
    report = measure(adapter, infer_cycles(adapter), equivalence)
    report.loc = {c: loc.as_dict() for c, (_, loc) in generated.items()}
    report.config_time_ms = config_ms
    return {
        "findings": [str(f) for f in findings],
        "counts": vars(count_entities(integration)) if integration else None,
        "steps": step_counts(adapter),
        "report": report,
        "ok": not findings and equivalence.ok,
    }


def cmd_demo(args: argparse.Namespace, out: Output) -> int:
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        result = run_demo(out_dir, args.duration)
    else:
        with tempfile.TemporaryDirectory(prefix="fnkit-demo-") as tmp:
            result = run_demo(Path(tmp), args.duration)
    report = result["report"]
    counts = result["counts"] or {}
    lines = [
        "Predictive ACC demo: validate -> transform -> generate -> run -> kpi",
        f"validation: {'clean' if not result['findings'] else '; '.join(result['findings'])}",
        f"integration: {counts.get('executables')} executables, {counts.get('services')} services, "
        f"{counts.get('events')} events",
        "steps: " + ", ".join(f"{n}={c}" for n, c in sorted(result["steps"].items())),
        report.to_text(),
        f"equivalence: {'PASS' if report.equivalence and report.equivalence.ok else 'FAIL'}",
    ]
    if args.out:
        lines.append(f"artifacts in {args.out}")
    out.emit("\n".join(lines), {**report.as_dict(), "counts": counts, "steps": result["steps"], "ok": result["ok"]})
    return EXIT_OK if result["ok"] else EXIT_FINDINGS


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fnkit", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check function or integration documents")
    p.add_argument("paths", nargs="+")
    p.add_argument("--catalog", help="signal catalog for conformance checks")
    p.add_argument("--kind", choices=("auto", "function", "integration"), default="auto")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("schema", parents=[common], help="print a JSON Schema")
    p.add_argument("--kind", choices=sorted(SCHEMAS), default="function")
    p.add_argument("--out")
    p.set_defaults(func=cmd_schema)

    p = sub.add_parser("transform", parents=[common], help="function models -> integration model")
    p.add_argument("functions", nargs="+")
    p.add_argument("--platform", required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("generate", parents=[common], help="integration model -> function adapters")
    p.add_argument("integration")
    p.add_argument("--component", action="append", help="repeatable; default: every single-function component")
    p.add_argument("--templates", help="template directory (default: $FNKIT_TEMPLATES or the built-in set)")
    p.add_argument("--out", default="generated")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", parents=[common], help="replay a signal trace through the simulator")
    p.add_argument("--manifests", nargs="+", required=True, help="manifest files or directories")
    p.add_argument("--trace", required=True)
    p.add_argument("--duration", type=float, default=60.0, help="seconds")
    p.add_argument("--clock", choices=("virtual", "wall"), default="virtual")
    p.add_argument("--harness", choices=("adapter", "baseline"), default="adapter")
    p.add_argument("--catalog")
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("kpi", parents=[common], help="timing and equivalence report for run traces")
    p.add_argument("--run", nargs="+", required=True)
    p.add_argument("--baseline")
    p.add_argument("--events", nargs="+")
    p.set_defaults(func=cmd_kpi)

    p = sub.add_parser("demo", parents=[common], help="run the bundled application end to end")
    p.add_argument("--out", help="keep artifacts here (default: a temporary directory)")
    p.add_argument("--duration", type=float, default=60.0, help="seconds")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = Output(args.format)
    try:
        return args.func(args, out)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CONTENT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FINDINGS


if __name__ == "__main__":
    sys.exit(main())
