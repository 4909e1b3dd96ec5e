import pytest

from fnkit.codegen.template import TemplateError, TemplateSet, render_template


def test_substitution():
    assert render_template("Hello {{x}}", {"x": "World"}) == "Hello World"


def test_unbound_placeholder_is_named():
    with pytest.raises(TemplateError, match="'y'") as info:
        render_template("a\n{{y}}", {}, name="t.tmpl")
    assert info.value.template == "t.tmpl"
    assert info.value.line == 2


def test_block_repeats_in_order():
    out = render_template("{{#xs}}[{{.}}]{{/xs}}", {"xs": [1, 2, 3]})
    assert out == "[1][2][3]"


def test_block_members_shadow_outer():
    ctx = {"name": "outer", "items": [{"name": "a"}, {"k": 1}]}
    assert render_template("{{#items}}{{name}};{{/items}}", ctx) == "a;outer;"


def test_empty_block_is_a_conditional():
    assert render_template("x{{#flag}}yes{{/flag}}z", {"flag": []}) == "xz"


def test_standalone_block_lines_dropped():
    tmpl = "start\n{{#xs}}\n  - {{.}}\n{{/xs}}\nend\n"
    assert render_template(tmpl, {"xs": ["a", "b"]}) == "start\n  - a\n  - b\nend\n"


def test_dotted_lookup():
    assert render_template("{{a.b.c}}", {"a": {"b": {"c": 5}}}) == "5"


def test_booleans_render_as_python():
    assert render_template("{{t}} {{f}}", {"t": True, "f": False}) == "True False"


@pytest.mark.parametrize(
    "tmpl",
    ["{{#a}}no end", "{{#a}}x{{/b}}", "{{/a}}", "broken {{ tag"],
)
def test_malformed(tmpl):
    with pytest.raises(TemplateError, match="malformed"):
        render_template(tmpl, {"a": [], "b": []})


def test_block_needs_list():
    with pytest.raises(TemplateError, match="needs a list"):
        render_template("{{#a}}x{{/a}}", {"a": 3})


def test_template_set(tmp_path):
    (tmp_path / "greet.tmpl").write_text("hi {{who}}\n")
    ts = TemplateSet.load(tmp_path)
    assert ts.platform == tmp_path.name
    assert "greet" in ts
    assert ts.render("greet", {"who": "there"}) == "hi there\n"
    with pytest.raises(TemplateError, match="no template named"):
        ts.render("missing", {})


def test_template_set_missing_dir(tmp_path):
    with pytest.raises(FileNotFoundError):
        TemplateSet.load(tmp_path / "nope")
    with pytest.raises(FileNotFoundError):
        TemplateSet.load(tmp_path)
