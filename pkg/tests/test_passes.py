"""Behaviour of the individual rewrite passes."""

from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from jsdeob import nodes as N
from jsdeob.codegen import print_script
from jsdeob.frontend import load
from jsdeob.passes import constprop as CP
from jsdeob.passes.constfold import run_const_fold
from jsdeob.passes.deadbranch import run_dead_branch
from jsdeob.passes.eliminate import eliminate_redundant
from jsdeob.passes.inline import ReturnsLiteral, ReturnsNothing, ReturnsParam, find_inlinable, run_inline
from jsdeob.passes.scope import analyze_scopes
from jsdeob.passes.strdecode import run_str_decode


def apply(run, src):
    out = run(load(src))
    return print_script(out.script).replace("\n", " ").strip(), out.changed


def check(run, src, expected):
    text, changed = apply(run, src)
    assert text == expected
    assert changed == (text != print_script(load(src)).replace("\n", " ").strip())


# -- constant folding ----------------------------------------------------------

@pytest.mark.parametrize("src,expected", [
    ("x = 'a' + 'b' + c;", "x = 'ab' + c;"),
    ("x = c + 'a' + 'b';", "x = c + 'ab';"),
    ("x = 'abc'.charAt(1) + [1,2].join('-');", "x = 'b1-2';"),
    ("x = typeof 'a';", "x = 'string';"),
    ("x = typeof [];", "x = 'object';"),
    ("x = (1, 2);", "x = 2;"),
    ("x = (f(), 2);", "x = (f(), 2);"),
    ("x = 'abc'.length;", "x = 3;"),
    ("x = !![];", "x = true;"),
    ("x = 1 / 0;", "x = Infinity;"),
    ("x = isNaN('a') + isFinite('1');", "x = 2;"),
    ("x = 'und' + 'efin' + 'ed';", "x = 'undefined';"),
    ("x = parseInt('ff', 16);", "x = 255;"),
])
def test_fold(src, expected):
    check(run_const_fold, src, expected)


def test_fold_respects_shadowed_builtins():
    check(run_const_fold, "function f(parseInt) { return parseInt('12'); }",
          "function f(parseInt) {   return parseInt('12'); }")


def test_fold_does_not_touch_effectful_operands():
    check(run_const_fold, "x = f() * 0;", "x = f() * 0;")


# -- string decoding -----------------------------------------------------------

@pytest.mark.parametrize("src,expected", [
    ("x = String.fromCharCode(72, 105);", "x = 'Hi';"),
    ("x = String.fromCharCode(65.9, 65601);", "x = 'AA';"),
    ("x = unescape('%41%u0042');", "x = 'AB';"),
    ("x = decodeURIComponent('%E2%82%AC');", "x = '\\u20ac';"),
    ("x = decodeURIComponent('%E2');", "x = decodeURIComponent('%E2');"),
    ("x = String.fromCharCode(a);", "x = String.fromCharCode(a);"),
    ("var String = 1; x = String.fromCharCode(65);",
     "var String; String = 1; x = String.fromCharCode(65);"),
])
def test_strdecode(src, expected):
    check(run_str_decode, src, expected)


# -- lattice -------------------------------------------------------------------

elements = st.one_of(
    st.just(CP.BOTTOM), st.just(CP.TOP),
    st.sampled_from([0.0, -0.0, 1.0, float("nan"), "", "aabb", False, None, N.UNDEFINED]).map(CP.Const),
    st.sampled_from(["eval", "WScript"]).map(CP.KnownGlobal))


@given(elements, elements, elements)
def test_join_is_a_semilattice(a, b, c):
    assert CP.join(a, b) == CP.join(b, a)
    assert CP.join(a, CP.join(b, c)) == CP.join(CP.join(a, b), c)
    assert CP.join(a, a) == a
    assert CP.join(a, CP.BOTTOM) == a
    assert CP.join(a, CP.TOP) is CP.TOP
    assert CP.leq(a, CP.join(a, b)) and CP.leq(b, CP.join(a, b))


def test_const_distinguishes_signed_zero_and_matches_nan():
    assert CP.join(CP.Const(0.0), CP.Const(-0.0)) is CP.TOP
    assert CP.join(CP.Const(float("nan")), CP.Const(float("nan"))) == CP.Const(float("nan"))


def test_analyze_merges_branches():
    body = load("var x = 0; var y = 'aabb'; if (c) { x = 1; } else { x = 1; y = false; } z = x;").body
    exit_env, facts = CP.analyze(body)
    assert exit_env["x"] == CP.Const(1.0)
    assert exit_env["y"] is CP.TOP
    assert any(env.get("x") == CP.Const(0.0) for _, env in facts)


def test_analyze_accepts_an_entry_environment():
    exit_env, _ = CP.analyze(load("y = x + 1;").body, {"x": CP.Const(2.0)})
    assert exit_env["y"] == CP.Const(3.0)


# -- propagation -----------------------------------------------------------------

@pytest.mark.parametrize("src,expected", [
    ("var a = 'x'; log(a + a);", "log('x' + 'x');"),
    ("var a = 1; if (c) { a = 2; } log(a);", "var a; a = 1; if (c) {   a = 2; } log(a);"),
    ("var a = 1; while (c) { a = a + 1; } log(a);",
     "var a; a = 1; while (c) {   a = a + 1; } log(a);"),
    ("var a = 1; f(); log(a);", "f(); log(1);"),
    ("function g() { var a = 1; h(); return a; }", "function g() {   h();   return 1; }"),
    ("var e = eval; e('x');", "eval('x');"),
    ("var s = WScript; s.Echo(1);", "WScript.Echo(1);"),
    ("var x = 5; x += 1; log(x);", "log(6);"),
])
def test_propagate(src, expected):
    check(CP.run_propagate, src, expected)


def test_captured_variables_are_killed_at_calls():
    src = "var n = 1; function bump() { n = 2; } bump(); log(n);"
    text, _ = apply(CP.run_propagate, src)
    assert text.endswith("bump(); log(n);")


def test_unknown_eval_blocks_propagation_of_globals():
    src = "var a = 1; eval(s); log(a);"
    text, _ = apply(CP.run_propagate, src)
    assert text.endswith("log(a);")


def test_known_global_alias_only_replaces_callees():
    text, _ = apply(CP.run_propagate, "var f = String.fromCharCode; log(f(65), f);")
    assert "String.fromCharCode(65)" in text and "log(String.fromCharCode(65), f)" in text


# -- elimination -------------------------------------------------------------------

def test_eliminate_drops_dead_stores_and_unused_declarations():
    text = print_script(eliminate_redundant(load("var a, b; a = 1; a = 2; log(a);")).script)
    assert text == "var a;\na = 2;\nlog(a);\n"


def test_eliminate_keeps_host_objects_and_effects():
    src = "var s; s = new ActiveXObject('x'); var t; t = f();"
    text = print_script(eliminate_redundant(load(src)).script)
    assert "new ActiveXObject('x')" in text and "f();" in text


# -- dead branches -------------------------------------------------------------------

@pytest.mark.parametrize("src,expected", [
    ("if (1) { a(); } else { b(); }", "a();"),
    ("if ('') { a(); }", ""),
    ("while (0) { a(); }", ""),
    ("do { a(); } while (0);", "a();"),
    ("do { if (x) break; a(); } while (0);", "do {   if (x) {     break;   }   a(); } while (0);"),
    ("switch (2) { case 1: a(); case 2: b(); case 3: c(); break; default: d(); }", "b(); c();"),
    ("switch ('z') { case 'a': a(); default: d(); }", "d();"),
    ("switch (x) { case 1: a(); }", "switch (x) {   case 1:     a(); }"),
    ("x = 1 ? a : b;", "x = a;"),
    ("for (; false;) { a(); }", ""),
    ("3;", ""),
    ("'use strict';", "'use strict';"),
    ("while (1) { a(); }", "while (1) {   a(); }"),
])
def test_dead_branch(src, expected):
    check(run_dead_branch, src, expected)


def test_dead_branch_keeps_declarations():
    text, _ = apply(run_dead_branch, "function g() { if (0) { var x = 1; } return x; }")
    assert text == "function g() {   var x;   return x; }"


def test_conditional_callee_keeps_this_binding():
    text, _ = apply(run_dead_branch, "x = (1 ? o.m : n)();")
    assert text == "x = (1 ? o.m : n)();"


# -- inlining ------------------------------------------------------------------------

@pytest.mark.parametrize("src,expected", [
    ("function f() { return 'a'; } x = f() + f();", "x = 'a' + 'a';"),
    ("function f(a, b) { return b; } x = f(1, g);", "x = g;"),
    ("function f() {} f(); x = f();", "x = undefined;"),
    ("function f() { return [1, 'a']; } x = f();", "x = [1, 'a'];"),
    ("function f(a, a) { return a; } x = f(1, 2);", "x = 2;"),
    ("function f(a, b) { return b; } x = f(1);", "x = undefined;"),
])
def test_inline(src, expected):
    check(run_inline, src, expected)


@pytest.mark.parametrize("src", [
    "function f(a, b) { return b; } x = f(g(), 1);",  # would drop a call
    "function f() { return 1; } x = f; y = f();",  # escapes as a value
    "function f() { return 1; } function f() { return 2; } x = f();",
    "function f() { return 1; } f = g; x = f();",
])
def test_inline_refuses(src):
    text, changed = apply(run_inline, src)
    assert not changed


def test_templates():
    found = find_inlinable(load("function a() { return 'x'; } function b() {}"
                                " function c(p, q) { return q; } function d() { return f(); }"
                                " a(); b(); c(1, 2); d();"))
    t = {b.name: template for b, (_, template) in found.items()}
    assert t == {"a": ReturnsLiteral(N.Lit("x")), "b": ReturnsNothing(), "c": ReturnsParam(1)}


# -- scopes --------------------------------------------------------------------------

def test_scope_kinds_and_references():
    info = analyze_scopes(load("var g = 1; function f(p) { var l; try { } catch (e) { return e + l + p; } }"
                               " h = f;"))
    kinds = {b.name: b.kind for s in info.scopes for b in s.bindings.values()}
    assert kinds == {"g": "var", "f": "function", "p": "param", "l": "var", "e": "catch"}
    assert "h" in info.free_names()


def test_eval_exposure():
    assert not analyze_scopes(load("eval('1 + 1');")).eval_exposed
    assert analyze_scopes(load("eval(s);")).eval_exposed
    info = analyze_scopes(load("var a = 1; eval('a = 2');"))
    assert not info.eval_exposed and "a" in info.eval_names
