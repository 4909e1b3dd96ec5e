"""Platform-agnostic Function Model.

JSON member names are PascalCase (``Name``, ``InterfaceData``...). Python
attributes are snake_case aliases of them. Parsing is strict: unknown members
and out-of-set literals are rejected at the boundary. Semantic checks that a
JSON Schema cannot express (ranges, offsets, references) are reported by
:func:`validate_function_model`.
"""

from __future__ import annotations

import json
import math
import warnings
from enum import Enum
from typing import Annotated, Any, Iterator, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError
from pydantic.alias_generators import to_pascal
from pydantic.json_schema import PydanticJsonSchemaWarning

from .canonical import canonical_dumps
from .report import ValidationReport
from .signals import SignalPathError, parse_signal_path

SCHEMA_DIALECT = "https://json-schema.org/draft/2020-12/schema"

Duration = Annotated[float, Field(ge=0, description="Duration in milliseconds")]


class AsilLevel(str, Enum):
    QM = "QM"
    A = "A"
    B = "B"
    C = "C"
    D = "D"

    @property
    def rank(self) -> int:
        return _ASIL_ORDER.index(self.value)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, AsilLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: object) -> bool:
        if not isinstance(other, AsilLevel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: object) -> bool:
        if not isinstance(other, AsilLevel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: object) -> bool:
        if not isinstance(other, AsilLevel):
            return NotImplemented
        return self.rank >= other.rank


_ASIL_ORDER = ("QM", "A", "B", "C", "D")


class NumericBase(str, Enum):
    UINT8 = "uint8"
    UINT16 = "uint16"
    UINT32 = "uint32"
    UINT64 = "uint64"
    INT8 = "int8"
    INT16 = "int16"
    INT32 = "int32"
    INT64 = "int64"
    FLOAT32 = "float32"
    FLOAT64 = "float64"

    @property
    def is_integer(self) -> bool:
        return not self.value.startswith("float")

    @property
    def limits(self) -> tuple[float, float]:
        return BASE_LIMITS[self]


_F32_MAX = 3.4028234663852886e38
BASE_LIMITS: dict[NumericBase, tuple[float, float]] = {
    NumericBase.UINT8: (0, 2**8 - 1),
    NumericBase.UINT16: (0, 2**16 - 1),
    NumericBase.UINT32: (0, 2**32 - 1),
    NumericBase.UINT64: (0, 2**64 - 1),
    NumericBase.INT8: (-(2**7), 2**7 - 1),
    NumericBase.INT16: (-(2**15), 2**15 - 1),
    NumericBase.INT32: (-(2**31), 2**31 - 1),
    NumericBase.INT64: (-(2**63), 2**63 - 1),
    NumericBase.FLOAT32: (-_F32_MAX, _F32_MAX),
    NumericBase.FLOAT64: (-1.7976931348623157e308, 1.7976931348623157e308),
}


class StrictModel(BaseModel):
    model_config = ConfigDict(
        extra="forbid",
        strict=True,
        frozen=True,
        alias_generator=to_pascal,
        populate_by_name=True,
        use_enum_values=False,
    )


# --- datatypes --------------------------------------------------------------


def _require_category(schema: dict[str, Any]) -> None:
    # the tag has a Python-side default but is mandatory in documents
    schema["required"] = ["Category", *schema.get("required", [])]


class DatatypeModel(StrictModel):
    model_config = ConfigDict(json_schema_extra=_require_category)


class NumericalDatatype(DatatypeModel):
    category: Literal["Numerical"] = "Numerical"
    base: NumericBase
    min: float = Field(description="Minimum limit of interface range (engineering units)")
    max: float = Field(description="Maximum limit of interface range (engineering units)")
    unit: str
    default: float


class StringDatatype(DatatypeModel):
    category: Literal["String"] = "String"
    max_length: int = Field(ge=0)
    default: str = ""


class BooleanDatatype(DatatypeModel):
    category: Literal["Boolean"] = "Boolean"
    default: bool = False


class StructField(StrictModel):
    name: str = Field(min_length=1)
    datatype: "Datatype"


class StructDatatype(DatatypeModel):
    category: Literal["Struct"] = "Struct"
    fields: list[StructField] = Field(min_length=1)


class ArrayDatatype(DatatypeModel):
    category: Literal["Array"] = "Array"
    element: "Datatype"
    length: int = Field(ge=1)


class EnumerationLiteral(StrictModel):
    name: str = Field(min_length=1)
    value: int


class EnumerationDatatype(DatatypeModel):
    category: Literal["Enumeration"] = "Enumeration"
    literals: list[EnumerationLiteral] = Field(min_length=1)
    default: Optional[str] = None


class TypeReference(DatatypeModel):
    category: Literal["TypeReference"] = "TypeReference"
    name: str = Field(min_length=1)


Datatype = Annotated[
    Union[
        NumericalDatatype,
        StringDatatype,
        BooleanDatatype,
        StructDatatype,
        ArrayDatatype,
        EnumerationDatatype,
        TypeReference,
    ],
    Field(discriminator="category"),
]


class NamedDatatype(StrictModel):
    name: str = Field(min_length=1)
    datatype: Datatype


# --- interfaces, parameters, errors ------------------------------------------

Role = Literal["Consumer", "Provider"]
RangeErrorAction = Literal["Default", "Init"]


class InterfaceDatatype(StrictModel):
    name: str = Field(min_length=1, description="VSS dot-separated signal path")
    description: str
    role: Role
    kind: str = Field(alias="Type", min_length=1)
    datatype: Datatype
    range_error_action: Optional[RangeErrorAction] = None
    timeout_value: Optional[Duration] = None
    timeout_error: Optional[str] = None
    asil: AsilLevel = Field(alias="AsilInfo")


class Parameter(StrictModel):
    name: str = Field(min_length=1)
    description: str
    asil: AsilLevel = Field(alias="AsilInfo")
    datatype: Datatype
    range_error_action: Optional[RangeErrorAction] = None
    attribute: Literal["NA", "Normal", "LearningParameter"]


class ErrorSpec(StrictModel):
    name: str = Field(min_length=1)
    datatype: Datatype
    maturation_time: Duration
    severity: str
    reset_time: Duration
    reset_condition: str
    description: str
    dependencies: Optional[list[str]] = None


class SafetyReaction(StrictModel):
    name: str = Field(min_length=1)
    datatype: Datatype
    error_list: list[str] = Field(min_length=1)
    description: str


# --- scheduling and watchdog -------------------------------------------------

SUPERVISION_PATTERN = r"^(None|Alive(\+Deadline)?(\+Logical)?|Deadline(\+Logical)?|Logical)$"


class AliveLimits(StrictModel):
    min_indications: int = Field(ge=0)
    max_indications: int = Field(ge=0)
    reference_window: float = Field(gt=0, description="Reference window in milliseconds")
    error_name: str


class DeadlineLimits(StrictModel):
    min_duration: Duration
    max_duration: Duration
    error_name: str


class LogicalCheck(StrictModel):
    expected_order: list[str] = Field(min_length=1)
    error_name: str


class WatchdogSpec(StrictModel):
    supervision_type: str = Field(
        pattern=SUPERVISION_PATTERN,
        description="None, or '+'-joined subset of Alive, Deadline, Logical in that order",
    )
    alive_limits: Optional[AliveLimits] = None
    deadline_limits: Optional[DeadlineLimits] = None
    logical_check: Optional[LogicalCheck] = None

    @property
    def kinds(self) -> frozenset[str]:
        if self.supervision_type == "None":
            return frozenset()
        return frozenset(self.supervision_type.split("+"))


class SchedulingInfo(StrictModel):
    run_type: str = Field(min_length=1, description="e.g. init, cyclic, event")
    cycle_time: Duration
    description: str
    initial_offset: Optional[Duration] = None
    priority: Optional[int] = None
    scheduling_hint: Optional[str] = Field(default=None, alias="FunctionScheduling")
    debounce_time: Optional[Duration] = None
    implemented_asil: AsilLevel = Field(alias="ImplementedAsil")
    previous_runnable: Optional[str] = None
    supervision: WatchdogSpec
    stack_size: Optional[int] = Field(default=None, ge=0, description="Stack size in bytes")

    @property
    def is_cyclic(self) -> bool:
        return self.run_type.lower() == "cyclic"


class NamedRecord(StrictModel):
    """Message and method entries are carried opaquely."""

    name: str = Field(min_length=1)
    description: str = ""


class AllocationInfo(StrictModel):
    required_memory: int = Field(ge=0, description="Memory requirement in bytes")


class FunctionModel(StrictModel):
    name: str = Field(min_length=1)
    description: str
    interface_data: list[InterfaceDatatype]
    scheduling: SchedulingInfo = Field(alias="SchedulingInfo")
    messages: Optional[list[NamedRecord]] = Field(default=None, alias="MessageList")
    methods: Optional[list[NamedRecord]] = Field(default=None, alias="MethodList")
    parameter_list: Optional[list[Parameter]] = Field(default=None, alias="ParameterList")
    error_list: Optional[list[ErrorSpec]] = Field(default=None, alias="ErrorList")
    safety_reaction_list: Optional[list[SafetyReaction]] = Field(default=None, alias="SafetyReactionList")
    watchdog: Optional[WatchdogSpec] = None
    allocation: Optional[AllocationInfo] = Field(default=None, alias="AllocationInfo")
    datatypes: Optional[list[NamedDatatype]] = Field(default=None, alias="DataTypes")

    # absent optional lists read as empty everywhere downstream
    @property
    def parameters(self) -> list[Parameter]:
        return self.parameter_list or []

    @property
    def errors(self) -> list[ErrorSpec]:
        return self.error_list or []

    @property
    def safety_reactions(self) -> list[SafetyReaction]:
        return self.safety_reaction_list or []

    @property
    def named_datatypes(self) -> list[NamedDatatype]:
        return self.datatypes or []

    @property
    def effective_watchdog(self) -> WatchdogSpec:
        return self.watchdog if self.watchdog is not None else self.scheduling.supervision

    def consumers(self) -> list[InterfaceDatatype]:
        return [i for i in self.interface_data if i.role == "Consumer"]

    def providers(self) -> list[InterfaceDatatype]:
        return [i for i in self.interface_data if i.role == "Provider"]


StructField.model_rebuild()
ArrayDatatype.model_rebuild()


# --- parsing ----------------------------------------------------------------


class ModelError(ValueError):
    """Raised when a document cannot be turned into a model.

    ``issues`` holds ``(path, message)`` pairs, one per problem found.
    """

    def __init__(self, kind: str, issues: list[tuple[str, str]]):
        self.kind = kind
        self.issues = issues
        lines = "; ".join(f"{p or '$'}: {m}" for p, m in issues[:5])
        more = f" (+{len(issues) - 5} more)" if len(issues) > 5 else ""
        super().__init__(f"{kind}: {lines}{more}")


def _loc_to_path(loc: tuple[Any, ...]) -> str:
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        elif part in {
            "Numerical", "String", "Boolean", "Struct", "Array", "Enumeration", "TypeReference",
        }:
            continue  # discriminator tags, not document members
        else:
            out += ("." if out else "") + str(part)
    return out


def _schema_issues(exc: ValidationError) -> list[tuple[str, str]]:
    issues = []
    for err in exc.errors(include_url=False):
        msg = err["msg"]
        if "input" in err and err["type"] not in ("missing",):
            msg = f"{msg} (got {err['input']!r})" if not isinstance(err["input"], (dict, list)) else msg
        issues.append((_loc_to_path(err["loc"]), msg))
    return issues


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("json syntax error", [(f"line {exc.lineno} col {exc.colno}", exc.msg)]) from None


def parse_function_model(json_text: str) -> FunctionModel:
    """Parse and structurally validate a Function JSON document.

    Raises :class:`ModelError` with kind ``json syntax error``,
    ``schema violation`` or ``unresolved reference``.
    """
    load_json(json_text)
    try:
        model = FunctionModel.model_validate_json(json_text, strict=True)
    except ValidationError as exc:
        raise ModelError("schema violation", _schema_issues(exc)) from None
    dangling = unresolved_references(model)
    if dangling:
        raise ModelError("unresolved reference", dangling)
    return model


def iter_datatypes(datatype: Any, path: str) -> Iterator[tuple[str, Any]]:
    yield path, datatype
    if isinstance(datatype, StructDatatype):
        for i, f in enumerate(datatype.fields):
            yield from iter_datatypes(f.datatype, f"{path}.Fields[{i}].Datatype")
    elif isinstance(datatype, ArrayDatatype):
        yield from iter_datatypes(datatype.element, f"{path}.Element")


def _all_datatypes(model: FunctionModel) -> Iterator[tuple[str, Any]]:
    for i, nd in enumerate(model.named_datatypes):
        yield from iter_datatypes(nd.datatype, f"DataTypes[{i}].Datatype")
    for i, iface in enumerate(model.interface_data):
        yield from iter_datatypes(iface.datatype, f"InterfaceData[{i}].Datatype")
    for i, p in enumerate(model.parameters):
        yield from iter_datatypes(p.datatype, f"ParameterList[{i}].Datatype")
    for i, e in enumerate(model.errors):
        yield from iter_datatypes(e.datatype, f"ErrorList[{i}].Datatype")
    for i, s in enumerate(model.safety_reactions):
        yield from iter_datatypes(s.datatype, f"SafetyReactionList[{i}].Datatype")


def unresolved_references(model: FunctionModel) -> list[tuple[str, str]]:
    """Dangling names that make a model unusable: safety-reaction error lists,
    interface timeout errors and type references."""
    errors = {e.name for e in model.errors}
    types = {d.name for d in model.named_datatypes}
    out: list[tuple[str, str]] = []
    for i, sr in enumerate(model.safety_reactions):
        for j, name in enumerate(sr.error_list):
            if name not in errors:
                out.append((f"SafetyReactionList[{i}].ErrorList[{j}]", f"undeclared error {name!r}"))
    for i, iface in enumerate(model.interface_data):
        if iface.timeout_error is not None and iface.timeout_error not in errors:
            out.append((f"InterfaceData[{i}].TimeoutError", f"undeclared error {iface.timeout_error!r}"))
    for path, dt in _all_datatypes(model):
        if isinstance(dt, TypeReference) and dt.name not in types:
            out.append((path, f"unresolved type reference {dt.name!r}"))
    return out


# --- semantic validation -----------------------------------------------------


def _is_integral(x: float) -> bool:
    return float(x).is_integer()


def check_datatype(report: ValidationReport, where: str, datatype: Any) -> None:
    """Range and well-formedness findings for one datatype (recursively)."""
    for path, dt in iter_datatypes(datatype, where):
        if isinstance(dt, NumericalDatatype):
            lo, hi = dt.base.limits
            if not all(math.isfinite(v) for v in (dt.min, dt.max, dt.default)):
                report.error(path, "limits and default must be finite")
                continue
            if dt.min > dt.max:
                report.error(path, f"range inverted: min {dt.min} > max {dt.max}")
            elif not dt.min <= dt.default <= dt.max:
                report.error(path, f"default {dt.default} outside [{dt.min}, {dt.max}]")
            for label, v in (("min", dt.min), ("max", dt.max)):
                if not lo <= v <= hi:
                    report.error(path, f"{label} {v} not representable in {dt.base.value}")
            if dt.base.is_integer:
                for label, v in (("min", dt.min), ("max", dt.max), ("default", dt.default)):
                    if not _is_integral(v):
                        report.error(path, f"{label} {v} is not an integer but base is {dt.base.value}")
        elif isinstance(dt, StringDatatype):
            if len(dt.default) > dt.max_length:
                report.error(path, f"default longer than MaxLength {dt.max_length}")
        elif isinstance(dt, StructDatatype):
            names = [f.name for f in dt.fields]
            for dup in sorted({n for n in names if names.count(n) > 1}):
                report.error(path, f"duplicate struct field {dup!r}")
        elif isinstance(dt, EnumerationDatatype):
            names = [lit.name for lit in dt.literals]
            values = [lit.value for lit in dt.literals]
            for dup in sorted({n for n in names if names.count(n) > 1}):
                report.error(path, f"duplicate enumeration literal {dup!r}")
            for dup in sorted({v for v in values if values.count(v) > 1}):
                report.error(path, f"duplicate enumeration value {dup}")
            if dt.default is not None and dt.default not in names:
                report.error(path, f"default {dt.default!r} is not a literal")


def _duplicates(names: list[str]) -> list[str]:
    seen: set[str] = set()
    dups = []
    for n in names:
        if n in seen and n not in dups:
            dups.append(n)
        seen.add(n)
    return dups


def check_watchdog(report: ValidationReport, where: str, wd: WatchdogSpec) -> None:
    selected = {
        "Alive": wd.alive_limits,
        "Deadline": wd.deadline_limits,
        "Logical": wd.logical_check,
    }
    member = {"Alive": "AliveLimits", "Deadline": "DeadlineLimits", "Logical": "LogicalCheck"}
    for kind, limits in selected.items():
        if kind in wd.kinds and limits is None:
            report.error(f"{where}.{member[kind]}", f"{kind} supervision selected but limits missing")
        if kind not in wd.kinds and limits is not None:
            report.error(f"{where}.{member[kind]}", f"limits given but {kind} supervision not selected")
    if wd.alive_limits and wd.alive_limits.min_indications > wd.alive_limits.max_indications:
        report.error(f"{where}.AliveLimits", "MinIndications > MaxIndications")
    if wd.deadline_limits and wd.deadline_limits.min_duration > wd.deadline_limits.max_duration:
        report.error(f"{where}.DeadlineLimits", "MinDuration > MaxDuration")


def _dependency_cycles(errors: list[ErrorSpec]) -> list[list[str]]:
    graph = {e.name: [d for d in (e.dependencies or []) if d != e.name] for e in errors}
    cycles: list[list[str]] = []
    state: dict[str, int] = {}
    stack: list[str] = []

    def visit(n: str) -> None:
        state[n] = 1
        stack.append(n)
        for m in graph.get(n, []):
            if m not in graph:
                continue
            if state.get(m) == 1:
                cycles.append(stack[stack.index(m):] + [m])
            elif m not in state:
                visit(m)
        stack.pop()
        state[n] = 2

    for name in sorted(graph):
        if name not in state:
            visit(name)
    return cycles


def validate_function_model(model: FunctionModel) -> ValidationReport:
    report = ValidationReport()
    for path, msg in unresolved_references(model):
        report.error(path, msg)

    iface_names = [i.name for i in model.interface_data]
    for dup in _duplicates(iface_names):
        report.error("InterfaceData", f"duplicate interface name {dup!r}")
    for i, iface in enumerate(model.interface_data):
        where = f"InterfaceData[{i}]"
        try:
            parse_signal_path(iface.name)
        except SignalPathError as exc:
            report.error(f"{where}.Name", f"not a signal path: {exc}")
        if not iface.kind.strip():
            report.error(f"{where}.Type", "must not be blank")
        if (iface.timeout_value is None) != (iface.timeout_error is None):
            report.error(where, "TimeoutValue and TimeoutError must be given together")
        if iface.timeout_value is not None and iface.timeout_value == 0:
            report.error(f"{where}.TimeoutValue", "timeout must be positive")
        check_datatype(report, f"{where}.Datatype", iface.datatype)

    for dup in _duplicates([p.name for p in model.parameters]):
        report.error("ParameterList", f"duplicate parameter name {dup!r}")
    for i, p in enumerate(model.parameters):
        check_datatype(report, f"ParameterList[{i}].Datatype", p.datatype)

    type_names = [d.name for d in model.named_datatypes]
    for dup in _duplicates(type_names):
        report.error("DataTypes", f"duplicate datatype name {dup!r}")
    for i, d in enumerate(model.named_datatypes):
        check_datatype(report, f"DataTypes[{i}].Datatype", d.datatype)

    error_names = [e.name for e in model.errors]
    for dup in _duplicates(error_names):
        report.error("ErrorList", f"duplicate error name {dup!r}")
    for i, e in enumerate(model.errors):
        for dep in e.dependencies or []:
            if dep == e.name:
                report.error(f"ErrorList[{i}].Dependencies", f"error {e.name!r} depends on itself")
            elif dep not in error_names:
                report.warning(f"ErrorList[{i}].Dependencies", f"external dependency {dep!r}")
    for cycle in _dependency_cycles(model.errors):
        report.error("ErrorList", "dependency cycle: " + " -> ".join(cycle))

    for dup in _duplicates([s.name for s in model.safety_reactions]):
        report.error("SafetyReactionList", f"duplicate safety reaction name {dup!r}")

    sched = model.scheduling
    if sched.is_cyclic and sched.cycle_time <= 0:
        report.error("SchedulingInfo.CycleTime", "cyclic functions need CycleTime > 0")
    if sched.initial_offset is not None and sched.cycle_time > 0 and sched.initial_offset >= sched.cycle_time:
        report.error(
            "SchedulingInfo.InitialOffset",
            f"offset {sched.initial_offset} ms not below cycle time {sched.cycle_time} ms",
        )
    if sched.debounce_time is not None and sched.debounce_time > sched.cycle_time:
        report.error(
            "SchedulingInfo.DebounceTime",
            f"debounce {sched.debounce_time} ms exceeds cycle time {sched.cycle_time} ms",
        )
    check_watchdog(report, "SchedulingInfo.Supervision", sched.supervision)
    if model.watchdog is not None:
        check_watchdog(report, "Watchdog", model.watchdog)
    return report


# --- serialization and schema ------------------------------------------------


def to_document(model: BaseModel) -> dict[str, Any]:
    return model.model_dump(mode="json", by_alias=True, exclude_none=True)


def serialize_function_model(model: FunctionModel) -> str:
    return canonical_dumps(to_document(model))


def _finish_schema(schema: dict[str, Any], schema_id: str, title: str) -> str:
    schema = {"$schema": SCHEMA_DIALECT, "$id": schema_id, "title": title, **schema}
    return canonical_dumps(schema)


def json_schema_of(model_cls: type[BaseModel]) -> dict[str, Any]:
    with warnings.catch_warnings():
        # recursive discriminated unions fall back to plain oneOf, which is exact
        # here because every variant pins a required Category constant
        warnings.simplefilter("ignore", PydanticJsonSchemaWarning)
        return model_cls.model_json_schema(by_alias=True, mode="validation")


def emit_function_schema() -> str:
    schema = json_schema_of(FunctionModel)
    return _finish_schema(schema, "urn:fnkit:function-model", "Function")
