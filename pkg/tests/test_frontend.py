from __future__ import annotations

import pytest

from jsdeob import nodes as N
from jsdeob.codegen import print_script
from jsdeob.frontend import ParseError, load, parse, parse_expression


def show(src) -> str:
    return print_script(load(src))


def test_numbers_and_escapes_are_decoded_at_parse_time():
    assert parse_expression("0x1F") == N.Lit(31.0)
    assert parse_expression("010") == N.Lit(8.0)
    assert parse_expression(".5e1") == N.Lit(5.0)
    assert parse_expression("'a\\x41\\u0042\\101'") == N.Lit("aAB" + "A")
    assert parse_expression("'\\ud83d\\ude00'") == N.Lit("\ud83d\ude00")
    assert parse_expression("'a\\\nb'") == N.Lit("ab")


def test_utf8_input_is_stored_as_utf16_code_units():
    script = load("x = '😀';".encode("utf-8"))
    assert script.body[0].expr.value == N.Lit("\ud83d\ude00")  # a surrogate pair


def test_byte_order_mark_is_skipped():
    assert show(b"\xef\xbb\xbfx = 1;") == "x = 1;\n"


def test_automatic_semicolon_insertion():
    assert show("a = 1\nb = 2") == "a = 1;\nb = 2;\n"
    assert show("a\n++b") == "a;\n++b;\n"
    assert show("a = b\n/c/g") == "a = b / c / g;\n"
    assert show("function f() { return\n1 }") == "function f() {\n  return;\n  1;\n}\n"


def test_regex_versus_division():
    assert show("x = /a\\/b/g.test(s);") == "x = /a\\/b/g.test(s);\n"
    assert show("x = a / b / c;") == "x = a / b / c;\n"


@pytest.mark.parametrize("src,line,column,fragment", [
    ("var = 3;", 1, 4, "unexpected token"),
    ("x = 1;\na = 1 +;", 2, 7, "unexpected token"),
    ("return 1;", 1, 0, "return outside function"),
    ("x = 'abc", 1, 4, ""),
    ("let a = 1;", 1, 0, "unsupported construct: let"),
    ("x = `t`;", 1, 4, "unsupported construct: template literal"),
    ("f(a => 1);", 1, 4, "unsupported construct: arrow function"),
])
def test_parse_errors_carry_positions(src, line, column, fragment):
    with pytest.raises(ParseError) as info:
        parse(src, "s.js")
    d = info.value.diagnostics[0]
    assert (d.line, d.column, d.severity) == (line, column, "error")
    assert fragment in d.message
    assert str(info.value).startswith(f"s.js:{line}:{column}:")


def test_invalid_utf8_is_a_parse_error():
    with pytest.raises(ParseError):
        load(b'x = "\xe9";')


def test_var_declarations_are_hoisted_to_function_heads():
    assert show("x = 1; var x = 2, y;") == "var x;\nvar y;\nx = 1;\nx = 2;\n"
    out = show("function f() { a(); for (var i in o) { var t = i; } }")
    assert out.splitlines()[1:3] == ["  var i;", "  var t;"]


def test_function_declarations_in_blocks_are_hoisted():
    assert show("if (a) function f() {}") == "function f() {}\nif (a) {}\n"


def test_hoisting_keeps_function_expression_names_local():
    out = load("var f = function g() { return g; };")
    assert [type(s).__name__ for s in out.body] == ["VarDecl", "ExprStmt"]


def test_no_with_remains_after_preprocessing():
    script = load("with (o) { a = b; }")
    assert not any(isinstance(n, N.With) for n in N.walk_body(script.body))
    assert "'a' in __with_0" in print_script(script)


def test_with_rewrite_picks_a_fresh_temporary():
    script = load("var __with_0 = 1; with (o) { x; }")
    assert "__with_1" in print_script(script)


def test_object_literals_and_control_flow_parse():
    src = ("x = {a: 1, 'b': 2, 3: 4};\n"
           "try { a(); } catch (e) { b(e); } finally { c(); }\n"
           "do x++; while (x < 3)\n"
           "l: for (;;) { if (x) break l; else continue; }\n"
           "switch (x) { case 1: y(); default: z(); }\n")
    script = load(src)
    assert N.structural_eq(load(print_script(script)), script)
    assert [type(s).__name__ for s in script.body] == [
        "ExprStmt", "Try", "DoWhile", "Labeled", "Switch"]
