"""Runtime values for model datatypes: defaults, type conformance, range checks."""

from __future__ import annotations

from types import MappingProxyType
from typing import Any, Mapping

from ..function_model import (
    ArrayDatatype,
    BooleanDatatype,
    EnumerationDatatype,
    NamedDatatype,
    NumericalDatatype,
    StringDatatype,
    StructDatatype,
    TypeReference,
)

TypeTable = Mapping[str, Any]
NO_TYPES: TypeTable = MappingProxyType({})


def type_table(named: "list[NamedDatatype] | None") -> dict[str, Any]:
    return {nd.name: nd.datatype for nd in named or []}


def resolve(datatype: Any, types: TypeTable) -> Any:
    seen = set()
    while isinstance(datatype, TypeReference):
        if datatype.name in seen or datatype.name not in types:
            raise KeyError(f"unresolved type reference {datatype.name!r}")
        seen.add(datatype.name)
        datatype = types[datatype.name]
    return datatype


def default_value(datatype: Any, types: TypeTable = NO_TYPES) -> Any:
    dt = resolve(datatype, types)
    if isinstance(dt, NumericalDatatype):
        return int(dt.default) if dt.base.is_integer else float(dt.default)
    if isinstance(dt, BooleanDatatype):
        return dt.default
    if isinstance(dt, StringDatatype):
        return dt.default
    if isinstance(dt, StructDatatype):
        return {f.name: default_value(f.datatype, types) for f in dt.fields}
    if isinstance(dt, ArrayDatatype):
        return [default_value(dt.element, types) for _ in range(dt.length)]
    if isinstance(dt, EnumerationDatatype):
        if dt.default is not None:
            return next(lit.value for lit in dt.literals if lit.name == dt.default)
        return dt.literals[0].value
    raise TypeError(f"no default for {type(dt).__name__}")


def conforms(value: Any, datatype: Any, types: TypeTable = NO_TYPES) -> bool:
    """Type conformance only; numeric range violations are a separate policy."""
    dt = resolve(datatype, types)
    if isinstance(dt, NumericalDatatype):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return False
        return isinstance(value, int) if dt.base.is_integer else True
    if isinstance(dt, BooleanDatatype):
        return isinstance(value, bool)
    if isinstance(dt, StringDatatype):
        return isinstance(value, str) and len(value) <= dt.max_length
    if isinstance(dt, StructDatatype):
        return (
            isinstance(value, dict)
            and set(value) == {f.name for f in dt.fields}
            and all(conforms(value[f.name], f.datatype, types) for f in dt.fields)
        )
    if isinstance(dt, ArrayDatatype):
        return (
            isinstance(value, list)
            and len(value) == dt.length
            and all(conforms(v, dt.element, types) for v in value)
        )
    if isinstance(dt, EnumerationDatatype):
        return not isinstance(value, bool) and value in {lit.value for lit in dt.literals}
    return False


def in_range(value: Any, datatype: Any, types: TypeTable = NO_TYPES) -> bool:
    dt = resolve(datatype, types)
    if isinstance(dt, NumericalDatatype):
        return dt.min <= value <= dt.max
    return True
