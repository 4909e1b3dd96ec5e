"""Minimal logic-less template language.

``{{name}}`` substitutes a value, ``{{a.b}}`` walks mappings/attributes,
``{{#items}}...{{/items}}`` repeats its body once per element of a list
(element members shadow the outer context; ``{{.}}`` is the element itself).
An empty list renders nothing, which doubles as a conditional. A line holding
only a block tag is dropped entirely so blocks do not leave blank lines.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

_TAG = re.compile(r"\{\{\s*([#/]?)\s*([A-Za-z_.][A-Za-z0-9_.]*)\s*\}\}")
_STANDALONE = re.compile(r"^[ \t]*\{\{\s*[#/]\s*[A-Za-z_.][A-Za-z0-9_.]*\s*\}\}[ \t]*$")


class TemplateError(ValueError):
    def __init__(self, message: str, template: str = "<string>", line: int | None = None):
        self.template = template
        self.line = line
        where = f"{template}:{line}" if line is not None else template
        super().__init__(f"{where}: {message}")


@dataclass
class _Text:
    text: str


@dataclass
class _Var:
    name: str
    line: int


@dataclass
class _Block:
    name: str
    line: int
    body: list


def _strip_standalone(template: str) -> list[tuple[str, int]]:
    """Return (chunk, line number) pairs with standalone block-tag lines reduced
    to the bare tag."""
    out = []
    for lineno, line in enumerate(template.splitlines(keepends=True), start=1):
        if _STANDALONE.match(line.rstrip("\r\n")):
            out.append((line.strip(), lineno))
        else:
            out.append((line, lineno))
    return out


def _parse(template: str, name: str) -> list:
    root: list = []
    stack: list[_Block] = []
    current = root
    for chunk, lineno in _strip_standalone(template):
        pos = 0
        for m in _TAG.finditer(chunk):
            if m.start() > pos:
                current.append(_Text(chunk[pos : m.start()]))
            sigil, ident = m.group(1), m.group(2)
            if sigil == "#":
                block = _Block(ident, lineno, [])
                current.append(block)
                stack.append(block)
                current = block.body
            elif sigil == "/":
                if not stack or stack[-1].name != ident:
                    opened = stack[-1].name if stack else None
                    raise TemplateError(
                        f"malformed block: closing {ident!r} but open block is {opened!r}", name, lineno
                    )
                stack.pop()
                current = stack[-1].body if stack else root
            else:
                current.append(_Var(ident, lineno))
            pos = m.end()
        rest = chunk[pos:]
        if "{{" in rest or "}}" in rest:
            raise TemplateError(f"malformed tag in {rest.strip()!r}", name, lineno)
        if rest:
            current.append(_Text(rest))
    if stack:
        raise TemplateError(f"malformed block: {stack[-1].name!r} never closed", name, stack[-1].line)
    return root


_MISSING = object()


def _lookup(scopes: Sequence[Any], dotted: str) -> Any:
    if dotted == ".":
        return scopes[-1]
    head, *rest = dotted.split(".")
    value: Any = _MISSING
    for scope in reversed(scopes):
        value = _get(scope, head)
        if value is not _MISSING:
            break
    for part in rest:
        if value is _MISSING:
            break
        value = _get(value, part)
    return value


def _get(obj: Any, key: str) -> Any:
    if isinstance(obj, Mapping):
        return obj.get(key, _MISSING)
    return getattr(obj, key, _MISSING) if not isinstance(obj, (str, int, float)) else _MISSING


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    return str(value)


def _render(nodes: list, scopes: list[Any], name: str, out: list[str]) -> None:
    for node in nodes:
        if isinstance(node, _Text):
            out.append(node.text)
        elif isinstance(node, _Var):
            value = _lookup(scopes, node.name)
            if value is _MISSING:
                raise TemplateError(f"unbound placeholder {node.name!r}", name, node.line)
            out.append(_format(value))
        else:
            items = _lookup(scopes, node.name)
            if items is _MISSING:
                raise TemplateError(f"unbound block {node.name!r}", name, node.line)
            if not isinstance(items, (list, tuple)):
                raise TemplateError(f"block {node.name!r} needs a list, got {type(items).__name__}", name, node.line)
            for item in items:
                _render(node.body, scopes + [item], name, out)


def render_template(template: str, context: Mapping[str, Any], name: str = "<string>") -> str:
    tree = _parse(template, name)
    out: list[str] = []
    _render(tree, [context], name, out)
    return "".join(out)


class TemplateSet:
    """Named templates, usually loaded from ``templates/<platform>/*.tmpl``."""

    def __init__(self, templates: Mapping[str, str], platform: str = "sim"):
        self.templates = dict(templates)
        self.platform = platform

    @classmethod
    def load(cls, directory: "str | Path") -> "TemplateSet":
        directory = Path(directory)
        if not directory.is_dir():
            raise FileNotFoundError(f"template directory {directory} not found")
        found = {p.name[: -len(".tmpl")]: p.read_text(encoding="utf-8") for p in sorted(directory.glob("*.tmpl"))}
        if not found:
            raise FileNotFoundError(f"no *.tmpl files in {directory}")
        return cls(found, platform=directory.name)

    def render(self, name: str, context: Mapping[str, Any]) -> str:
        try:
            template = self.templates[name]
        except KeyError:
            raise TemplateError(f"no template named {name!r}", f"{self.platform}/{name}") from None
        return render_template(template, context, name=f"{self.platform}/{name}.tmpl")

    def __contains__(self, name: object) -> bool:
        return name in self.templates
