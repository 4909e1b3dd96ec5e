"""VSS-style signal catalog: dot-path parsing, the signal tree, and the naming
conventions for error, safety-reaction, mode and scheduling interfaces."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Iterator, Mapping, Sequence

from .canonical import canonical_dumps
from .report import ValidationReport

if TYPE_CHECKING:
    from .function_model import FunctionModel

IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9]*")


class SignalPathError(ValueError):
    def __init__(self, text: str, message: str, index: int | None = None):
        self.text = text
        self.index = index
        super().__init__(f"{text!r}: {message}")


@dataclass(frozen=True, order=True)
class SignalPath:
    segments: tuple[str, ...]

    def __str__(self) -> str:
        return ".".join(self.segments)

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def parent(self) -> tuple[str, ...]:
        return self.segments[:-1]


def parse_signal_path(text: str) -> SignalPath:
    if not text:
        raise SignalPathError(text, "empty path")
    segments = text.split(".")
    for i, seg in enumerate(segments):
        if not seg:
            raise SignalPathError(text, f"empty segment at index {i}", i)
        if not IDENTIFIER.fullmatch(seg):
            raise SignalPathError(text, f"illegal character in segment {i} ({seg!r})", i)
    if len(segments) < 2:
        raise SignalPathError(text, "fewer than 2 segments")
    return SignalPath(tuple(segments))


def is_signal_path(text: str) -> bool:
    try:
        parse_signal_path(text)
    except SignalPathError:
        return False
    return True


# --- signal tree ------------------------------------------------------------


@dataclass(frozen=True)
class SignalLeaf:
    path: SignalPath
    datatype: str
    unit: str = ""
    min: float | None = None
    max: float | None = None
    default: Any = None
    description: str = ""
    asil: str = "QM"

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "path": str(self.path),
            "datatype": self.datatype,
            "unit": self.unit,
            "description": self.description,
            "asil": self.asil,
        }
        for key in ("min", "max", "default"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        return out


@dataclass
class Branch:
    name: str
    children: dict[str, "Branch | SignalLeaf"] = field(default_factory=dict)


class CatalogError(ValueError):
    pass


class SignalTree:
    """Immutable hierarchy of branches and leaves built by :func:`build_tree`."""

    def __init__(self, roots: dict[str, Branch]):
        self._roots = roots

    @property
    def roots(self) -> Mapping[str, Branch]:
        return self._roots

    def _node(self, segments: Sequence[str]) -> "Branch | SignalLeaf | None":
        node: Branch | SignalLeaf | None = self._roots.get(segments[0])
        for seg in segments[1:]:
            if not isinstance(node, Branch):
                return None
            node = node.children.get(seg)
        return node

    def lookup(self, path: "SignalPath | str") -> SignalLeaf | None:
        if isinstance(path, str):
            path = parse_signal_path(path)
        node = self._node(path.segments)
        return node if isinstance(node, SignalLeaf) else None

    def is_branch(self, path: "SignalPath | str") -> bool:
        segs = path.segments if isinstance(path, SignalPath) else tuple(path.split("."))
        return isinstance(self._node(segs), Branch)

    def __contains__(self, path: object) -> bool:
        if not isinstance(path, (str, SignalPath)):
            return False
        try:
            return self.lookup(path) is not None
        except SignalPathError:
            return False

    def leaves(self) -> Iterator[SignalLeaf]:
        def walk(node: Branch | SignalLeaf) -> Iterator[SignalLeaf]:
            if isinstance(node, SignalLeaf):
                yield node
                return
            for name in sorted(node.children):
                yield from walk(node.children[name])

        for name in sorted(self._roots):
            yield from walk(self._roots[name])

    def __len__(self) -> int:
        return sum(1 for _ in self.leaves())

    def to_json(self) -> list[dict[str, Any]]:
        return [leaf.to_json() for leaf in self.leaves()]

    def dumps(self) -> str:
        return canonical_dumps(self.to_json())


def build_tree(leaves: Iterable[SignalLeaf | tuple[SignalPath, Mapping[str, Any]]]) -> SignalTree:
    """Insert leaves into a fresh tree.

    Raises :class:`CatalogError` on duplicate paths and on a path that is both a
    leaf and the prefix of another path. The result does not depend on input
    order: conflicts are detected symmetrically and children are read back sorted.
    """
    normalized: list[SignalLeaf] = []
    for item in leaves:
        if isinstance(item, SignalLeaf):
            normalized.append(item)
        else:
            path, meta = item
            normalized.append(SignalLeaf(path=path, **dict(meta)))

    roots: dict[str, Branch] = {}
    for leaf in normalized:
        segs = leaf.path.segments
        container = roots
        for depth, seg in enumerate(segs[:-1]):
            node = container.get(seg)
            if node is None:
                node = container[seg] = Branch(seg)
            elif isinstance(node, SignalLeaf):
                raise CatalogError(
                    f"leaf/branch conflict: {'.'.join(segs[: depth + 1])} is a leaf "
                    f"and a prefix of {leaf.path}"
                )
            container = node.children
        last = segs[-1]
        existing = container.get(last)
        if isinstance(existing, SignalLeaf):
            raise CatalogError(f"duplicate leaf path {leaf.path}")
        if isinstance(existing, Branch):
            raise CatalogError(f"leaf/branch conflict: {leaf.path} is a branch and a leaf")
        container[last] = leaf
    return SignalTree(roots)


_LEAF_KEYS = {"path", "datatype", "unit", "min", "max", "default", "description", "asil"}


def load_catalog(source: "str | Path") -> SignalTree:
    """Read a flat JSON catalog (list of leaf records) from a file path or JSON text."""
    if isinstance(source, Path) or not source.lstrip().startswith("["):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    records = json.loads(text)
    if not isinstance(records, list):
        raise CatalogError("catalog must be a JSON list of leaf records")
    leaves = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "path" not in rec or "datatype" not in rec:
            raise CatalogError(f"record {i}: needs at least 'path' and 'datatype'")
        unknown = set(rec) - _LEAF_KEYS
        if unknown:
            raise CatalogError(f"record {i}: unknown members {sorted(unknown)}")
        try:
            path = parse_signal_path(rec["path"])
        except SignalPathError as exc:
            raise CatalogError(f"record {i}: {exc}") from None
        meta = {k: v for k, v in rec.items() if k != "path"}
        leaves.append(SignalLeaf(path=path, **meta))
    return build_tree(leaves)


# --- naming conventions -----------------------------------------------------


class InterfaceKind(str, Enum):
    ERROR = "Error"
    SAFETY_REACTION = "SafetyReaction"
    MODE_IN = "ModeIn"
    MODE_OUT = "ModeOut"
    INIT = "Init"
    STEP = "Step"
    TERMINATE = "Terminate"


_ID = "[A-Za-z][A-Za-z0-9]*"

# (number of parts, rendering suffix)
_CONVENTIONS: dict[InterfaceKind, tuple[int, str]] = {
    InterfaceKind.ERROR: (2, "_ErrorSts"),
    InterfaceKind.SAFETY_REACTION: (1, "_SftyCondSts"),
    InterfaceKind.MODE_IN: (1, "_Mode_In"),
    InterfaceKind.MODE_OUT: (1, "_Mode_Out"),
    InterfaceKind.INIT: (1, "_Init"),
    InterfaceKind.STEP: (1, "_Step"),
    InterfaceKind.TERMINATE: (1, "_Terminate"),
}

NAME_PATTERNS: dict[InterfaceKind, re.Pattern[str]] = {
    kind: re.compile("_".join([_ID] * nparts) + re.escape(suffix))
    for kind, (nparts, suffix) in _CONVENTIONS.items()
}


@dataclass(frozen=True)
class DerivedInterfaceName:
    kind: InterfaceKind
    parts: tuple[str, ...]
    rendered: str

    def __str__(self) -> str:
        return self.rendered


def derive_interface_name(kind: "InterfaceKind | str", parts: Sequence[str]) -> DerivedInterfaceName:
    kind = InterfaceKind(kind)
    nparts, suffix = _CONVENTIONS[kind]
    if len(parts) != nparts:
        raise ValueError(f"{kind.value} names take {nparts} part(s), got {len(parts)}")
    for part in parts:
        if not IDENTIFIER.fullmatch(part):
            raise ValueError(f"illegal identifier {part!r} in interface name")
    rendered = "_".join(parts) + suffix
    return DerivedInterfaceName(kind, tuple(parts), rendered)


def classify_interface_name(name: str) -> InterfaceKind | None:
    for kind, pattern in NAME_PATTERNS.items():
        if pattern.fullmatch(name):
            return kind
    return None


# --- conformance ------------------------------------------------------------


def _catalog_type_name(datatype: Any) -> str | None:
    category = getattr(datatype, "category", None)
    if category == "Numerical":
        return datatype.base.value
    if category == "String":
        return "string"
    if category == "Boolean":
        return "boolean"
    return None


def _check_leaf(report: ValidationReport, where: str, datatype: Any, leaf: SignalLeaf) -> None:
    declared = _catalog_type_name(datatype)
    if declared is not None and declared != leaf.datatype:
        report.error(where, f"datatype {declared} does not match catalog {leaf.datatype}")
    if getattr(datatype, "category", None) != "Numerical":
        return
    if leaf.unit and datatype.unit != leaf.unit:
        report.error(where, f"unit {datatype.unit!r} does not match catalog {leaf.unit!r}")
    if leaf.min is not None and datatype.min != leaf.min:
        report.error(where, f"min {datatype.min} does not match catalog {leaf.min}")
    if leaf.max is not None and datatype.max != leaf.max:
        report.error(where, f"max {datatype.max} does not match catalog {leaf.max}")


def check_catalog_conformance(model: "FunctionModel", tree: SignalTree) -> ValidationReport:
    """Compare a function model's interfaces against the catalog.

    Error and safety-reaction names live outside the tree and are only checked
    against the naming conventions (warning severity).
    """
    report = ValidationReport()
    for i, iface in enumerate(model.interface_data):
        where = f"InterfaceData[{i}]"
        if not is_signal_path(iface.name):
            # malformed names are reported by validate_function_model
            continue
        leaf = tree.lookup(iface.name)
        if leaf is None:
            what = "branch, not a signal" if tree.is_branch(iface.name) else "unknown signal"
            report.error(where, f"{what}: {iface.name}")
            continue
        _check_leaf(report, where, iface.datatype, leaf)

    for i, param in enumerate(model.parameters):
        where = f"ParameterList[{i}]"
        if is_signal_path(param.name) and param.name in tree:
            _check_leaf(report, where, param.datatype, tree.lookup(param.name))
        elif is_signal_path(param.name):
            report.warning(where, f"parameter {param.name} not in catalog")

    for i, err in enumerate(model.errors):
        where = f"ErrorList[{i}]"
        if not NAME_PATTERNS[InterfaceKind.ERROR].fullmatch(err.name):
            report.warning(where, f"error name {err.name!r} does not follow FunctionName_ErrorName_ErrorSts")
        elif not err.name.startswith(model.name + "_"):
            report.warning(where, f"error name {err.name!r} is not prefixed with function name {model.name!r}")
    for i, sr in enumerate(model.safety_reactions):
        if not NAME_PATTERNS[InterfaceKind.SAFETY_REACTION].fullmatch(sr.name):
            report.warning(
                f"SafetyReactionList[{i}]",
                f"safety reaction name {sr.name!r} does not follow <SafetyCondition>_SftyCondSts",
            )
    return report
