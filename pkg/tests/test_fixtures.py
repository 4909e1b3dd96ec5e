"""The schema gate: every fixture is judged the same way by the emitted JSON Schema and by the parser."""

import json

import jsonschema
import pytest

from fnkit.function_model import ModelError, emit_function_schema, parse_function_model, validate_function_model
from fnkit.integration import emit_integration_schema, parse_integration_model, validate_integration

from conftest import FIXTURES

KINDS = {
    "function": (emit_function_schema, parse_function_model, validate_function_model),
    "integration": (emit_integration_schema, parse_integration_model, validate_integration),
}


def corpus(kind, group):
    return sorted((FIXTURES / kind / group).glob("*.json"))


def cases(group):
    return [pytest.param(kind, p, id=f"{kind}/{p.stem}") for kind in KINDS for p in corpus(kind, group)]


@pytest.fixture(scope="module")
def validators():
    out = {}
    for kind, (emit, _, _) in KINDS.items():
        schema = json.loads(emit())
        jsonschema.Draft202012Validator.check_schema(schema)
        out[kind] = jsonschema.Draft202012Validator(schema)
    return out


@pytest.mark.parametrize("kind", KINDS)
def test_corpus_sizes(kind):
    assert len(corpus(kind, "valid")) >= 20
    assert len(corpus(kind, "invalid")) >= 20
    assert corpus(kind, "semantic_invalid")


@pytest.mark.parametrize("kind,path", cases("valid"))
def test_valid_accepted_by_both(validators, kind, path):
    text = path.read_text()
    assert list(validators[kind].iter_errors(json.loads(text))) == []
    model = KINDS[kind][1](text)
    assert not KINDS[kind][2](model).errors


@pytest.mark.parametrize("kind,path", cases("invalid"))
def test_invalid_rejected_by_both(validators, kind, path):
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if data is not None:
        assert list(validators[kind].iter_errors(data)), "schema accepted an invalid fixture"
    with pytest.raises(ModelError):
        KINDS[kind][1](text)


@pytest.mark.parametrize("kind,path", cases("semantic_invalid"))
def test_semantic_invalid_caught_by_builtin_validator(kind, path):
    try:
        model = KINDS[kind][1](path.read_text())
    except ModelError as exc:
        # cross references are resolved while parsing
        assert exc.kind == "unresolved reference"
        return
    assert KINDS[kind][2](model).errors
