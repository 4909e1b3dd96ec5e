from .adapter import (
    CodegenError,
    GeneratedArtifact,
    GeneratedFile,
    LocReport,
    build_manifest,
    default_templates,
    extract_slots,
    generate_adapter,
    loc_report,
    marked_topics,
    merge_slots,
    read_previous,
)
from .manifest import AdapterManifest, emit_manifest_schema, load_manifest, parse_manifest
from .template import TemplateError, TemplateSet, render_template

__all__ = [
    "AdapterManifest",
    "CodegenError",
    "GeneratedArtifact",
    "GeneratedFile",
    "LocReport",
    "TemplateError",
    "TemplateSet",
    "build_manifest",
    "default_templates",
    "emit_manifest_schema",
    "extract_slots",
    "generate_adapter",
    "load_manifest",
    "loc_report",
    "marked_topics",
    "merge_slots",
    "parse_manifest",
    "read_previous",
    "render_template",
]
